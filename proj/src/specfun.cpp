#include "kterm/specfun.hpp"

#include "kterm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <queue>
#include <string>

namespace kterm::specfun {

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

template <class T>
struct Panel {
    double a, b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

double magnitude(double v) { return std::fabs(v); }
double magnitude(const std::complex<double>& v) { return std::abs(v); }

// One Kronrod panel with the QUADPACK error heuristic.
template <class T, class F>
Panel<T> kronrod(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    T fv[15];
    fv[7] = f(c);
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - hl * kXgk[i]);
        fv[14 - i] = f(c + hl * kXgk[i]);
    }
    T rk = fv[7] * kWgk[7];
    T rg = fv[7] * kWg[3];
    double resabs = magnitude(fv[7]) * kWgk[7];
    for (int i = 0; i < 7; ++i) {
        rk += (fv[i] + fv[14 - i]) * kWgk[i];
        resabs += (magnitude(fv[i]) + magnitude(fv[14 - i])) * kWgk[i];
        if (i % 2 == 1) rg += (fv[i] + fv[14 - i]) * kWg[i / 2];
    }
    const T mean = rk * 0.5;
    double resasc = magnitude(fv[7] - mean) * kWgk[7];
    for (int i = 0; i < 7; ++i)
        resasc += (magnitude(fv[i] - mean) + magnitude(fv[14 - i] - mean)) * kWgk[i];
    const double ahl = std::fabs(hl);
    resabs *= ahl;
    resasc *= ahl;
    double err = magnitude((rk - rg) * hl);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
    Panel<T> p{a, b, rk * hl, err};
    // Roundoff floor reached: further bisection cannot help.
    if (err <= 50.0 * kEps * resabs * 1.0000001) p.error = -err;
    return p;
}

template <class T, class F>
QuadResult<T> adaptive(const F& f, const std::vector<double>& breaks, const QuadratureSpec& spec) {
    spec.validate();
    if (breaks.size() < 2) fail(ErrorCode::InvalidArgument, "integrate needs at least two break points");
    for (size_t i = 0; i + 1 < breaks.size(); ++i)
        if (!(breaks[i] < breaks[i + 1])) fail(ErrorCode::InvalidArgument, "integration breaks must be increasing");

    std::priority_queue<Panel<T>> active;
    T total{};
    double frozen_err = 0.0;
    T frozen{};
    double active_err = 0.0;
    auto push = [&](const Panel<T>& p) {
        if (!std::isfinite(magnitude(p.value))) fail(ErrorCode::NonConvergence, "non-finite integrand value");
        const double width_floor = 64.0 * kEps * std::max({std::fabs(p.a), std::fabs(p.b), 1e-300});
        if (p.error < 0.0 || (p.b - p.a) < width_floor) {
            frozen += p.value;
            frozen_err += std::fabs(p.error);
        } else {
            active.push(p);
            active_err += p.error;
        }
    };
    for (size_t i = 0; i + 1 < breaks.size(); ++i) push(kronrod<T>(f, breaks[i], breaks[i + 1]));

    int subdivisions = 0;
    auto current_total = [&]() {
        T s = frozen;
        auto copy = active;
        while (!copy.empty()) {
            s += copy.top().value;
            copy.pop();
        }
        return s;
    };
    total = current_total();
    while (!active.empty()) {
        const double tol = std::max(spec.abs_tol, spec.rel_tol * magnitude(total));
        if (active_err + frozen_err <= tol) break;
        if (active_err <= 0.05 * tol && frozen_err > tol) break; // roundoff limited
        if (subdivisions >= spec.max_subdivisions)
            fail(ErrorCode::NonConvergence, "quadrature exhausted " + std::to_string(spec.max_subdivisions) +
                                                " subdivisions (error estimate " +
                                                std::to_string(active_err + frozen_err) + ")");
        Panel<T> worst = active.top();
        active.pop();
        active_err -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        Panel<T> left = kronrod<T>(f, worst.a, mid);
        Panel<T> right = kronrod<T>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        push(left);
        push(right);
        ++subdivisions;
        // Keep the running error sum from drifting.
        if (subdivisions % 64 == 0) {
            active_err = 0.0;
            auto copy = active;
            while (!copy.empty()) {
                active_err += copy.top().error;
                copy.pop();
            }
            total = current_total();
        }
    }
    total = current_total();
    return QuadResult<T>{total, std::max(0.0, active_err) + frozen_err, subdivisions};
}

} // namespace

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1)
        fail(ErrorCode::InvalidArgument, "QuadratureSpec requires abs_tol > 0, rel_tol > 0, max_subdivisions >= 1");
}

QuadResult<double> integrate_detail(const RealFn& f, const std::vector<double>& breaks, const QuadratureSpec& spec) {
    return adaptive<double>(f, breaks, spec);
}

QuadResult<std::complex<double>> integrate_complex_detail(const ComplexFn& f, const std::vector<double>& breaks,
                                                          const QuadratureSpec& spec) {
    return adaptive<std::complex<double>>(f, breaks, spec);
}

double integrate(const RealFn& f, Interval domain, const QuadratureSpec& spec) {
    if (!(domain.lo < domain.hi)) fail(ErrorCode::InvalidArgument, "Interval requires lo < hi");
    return adaptive<double>(f, {domain.lo, domain.hi}, spec).value;
}

double integrate(const RealFn& f, const std::vector<double>& breaks, const QuadratureSpec& spec) {
    return adaptive<double>(f, breaks, spec).value;
}

std::complex<double> integrate_complex(const ComplexFn& f, const std::vector<double>& breaks,
                                       const QuadratureSpec& spec) {
    return adaptive<std::complex<double>>(f, breaks, spec).value;
}

double integrate_semi_infinite(const RealFn& f, double a, const QuadratureSpec& spec) {
    auto g = [&](double t) {
        const double s = 1.0 - t;
        return f(a + t / s) / (s * s);
    };
    return adaptive<double>(g, {0.0, 0.5, 1.0}, spec).value;
}

namespace {

// log of exp(-r (cosh t - 1)) cosh(nu t), nu >= 0.
double log_integrand(double nu, double r, double t) {
    const double sh = std::sinh(0.5 * t);
    const double nt = nu * t;
    return -2.0 * r * sh * sh + nt + std::log1p(std::exp(-2.0 * nt)) - std::log(2.0);
}

} // namespace

double log_bessel_k(double nu, double r) {
    if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorCode::DomainError, "bessel_k requires r > 0");
    nu = std::fabs(nu);
    // Peak of the log-integrand where r sinh t = nu.
    const double tpk = std::asinh(nu / r);
    const double gpk = log_integrand(nu, r, tpk);
    double step = std::max(0.5, 1.0 / std::sqrt(r + nu + 1.0));
    double T = tpk + step;
    while (log_integrand(nu, r, T) > gpk - 50.0) {
        T += step;
        step *= 1.5;
    }
    auto g = [&](double t) { return std::exp(log_integrand(nu, r, t) - gpk); };
    QuadratureSpec q{1e-300, 1e-13, 4000};
    std::vector<double> br;
    if (tpk > 0.0) br = {0.0, tpk, T};
    else br = {0.0, T};
    const double s = adaptive<double>(g, br, q).value;
    return -r + gpk + std::log(s);
}

double bessel_k(double nu, double r) { return std::exp(log_bessel_k(nu, r)); }

GaussLegendre16::GaussLegendre16() {
    const int n = 16;
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1);
            const double dz = p1 / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-16) break;
        }
        x[i] = z;
        w[i] = 2.0 / ((1 - z * z) * dp * dp);
    }
}

const GaussLegendre16& gauss_legendre16() {
    static const GaussLegendre16 g;
    return g;
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (n > 50) fail(ErrorCode::InvalidArgument, "binomial order too large for exact arithmetic");
    k = std::min(k, n - k);
    std::uint64_t b = 1;
    for (int i = 1; i <= k; ++i) b = b * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return b;
}

double divided_difference(const RealFn& f, int n, double x) {
    if (n < 1 || 2 * n > 40) fail(ErrorCode::InvalidArgument, "divided_difference requires 1 <= n <= 20");
    long double sum = 0.0L;
    for (int j = -n; j <= n; ++j) {
        const long double c = static_cast<long double>(binomial(2 * n, j + n));
        const long double term = c * static_cast<long double>(f(x + j));
        sum += ((j + n) % 2 == 0) ? term : -term;
    }
    long double fact = 1.0L;
    for (int i = 2; i <= 2 * n; ++i) fact *= i;
    return static_cast<double>(sum / fact);
}

} // namespace kterm::specfun
