#include "kterm/kernels.hpp"

#include "kterm/cardinal.hpp"
#include "kterm/error.hpp"
#include "kterm/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>


namespace kterm::kernels {

using std::numbers::pi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool is_even_integer(double a) { return std::fabs(a / 2 - std::round(a / 2)) < 1e-12; }

double log_sum_exp(const std::vector<double>& v) {
    double m = -kInf;
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// log of the inverse multiquadric transform for decay exponent beta in dimension d at radius r >= 0.
double log_imq_ft(double beta, double c, int d, double r) {
    const double hd = 0.5 * d;
    if (r == 0.0) {
        if (beta <= hd) return kInf;
        return hd * std::log(pi) + std::lgamma(beta - hd) - std::lgamma(beta) + (d - 2 * beta) * std::log(c);
    }
    const double nu = hd - beta;
    return hd * std::log(2 * pi) + (1 - beta) * std::log(2.0) - std::lgamma(beta) + nu * (std::log(c) - std::log(r)) +
           specfun::log_bessel_k(nu, c * r);
}

// Divided-difference multiquadric floor(tau)_{2n}, tau(x) = (x^2+c^2)^{n-1/2}.
double dd_eval(int n, double c, double x) {
    x = std::fabs(x);
    const long double beta = n - 0.5L;
    long double fact = 1.0L;
    for (int i = 2; i <= 2 * n; ++i) fact *= i;
    if (x < 2.0 * (n + c)) {
        long double s = 0.0L;
        for (int j = -n; j <= n; ++j) {
            const long double y = x + j;
            const long double t = std::pow(y * y + static_cast<long double>(c) * c, beta);
            const long double w = static_cast<long double>(specfun::binomial(2 * n, j + n));
            s += ((j + n) % 2 == 0 ? w : -w) * t;
        }
        return static_cast<double>(s / fact);
    }
    // Asymptotic expansion free of cancellation: only k >= n survives.
    const long double X = x;
    const long double c2 = static_cast<long double>(c) * c;
    // D_m = sum_j (-1)^{j+n} C(2n, j+n) j^m.
    auto Dm = [&](int m) {
        long double s = 0.0L;
        for (int j = -n; j <= n; ++j) {
            const long double w = static_cast<long double>(specfun::binomial(2 * n, j + n));
            s += ((j + n) % 2 == 0 ? w : -w) * std::pow(static_cast<long double>(j), m);
        }
        return s;
    };
    std::vector<long double> D;
    const int m_cap = 2 * n + 120;
    for (int m = 0; m <= m_cap; ++m) D.push_back(m >= 2 * n && m % 2 == 0 ? Dm(m) : 0.0L);
    D[2 * n] = fact;
    // C(beta, k) up to k = n.
    long double cbk = 1.0L;
    for (int i = 0; i < n; ++i) cbk *= (beta - i) / (i + 1);
    long double total = 0.0L;
    for (int k = n; k < n + 200; ++k) {
        const long double gamma = 2 * beta - 2 * k;
        long double inner = 0.0L;
        long double cgm = 1.0L; // C(gamma, m)
        for (int m = 0; m <= m_cap; ++m) {
            if (m > 0) cgm *= (gamma - (m - 1)) / m;
            if (m >= 2 * n && m % 2 == 0) {
                const long double term = cgm * std::pow(X, gamma - m) * D[m];
                inner += term;
                if (m > 2 * n + 4 && std::fabs(term) < 1e-22L * std::fabs(inner)) break;
            }
        }
        const long double term = cbk * std::pow(c2, static_cast<long double>(k)) * inner;
        total += term;
        if (k > n + 2 && std::fabs(term) < 1e-22L * std::fabs(total)) break;
        cbk *= (beta - k) / (k + 1);
    }
    return static_cast<double>(total / fact);
}

double log_gaussian_ft(double alpha, int d, double r) {
    return d * std::log(alpha * std::sqrt(pi)) - 0.25 * alpha * alpha * r * r;
}

// log |sign| pair for the power kernel transform coefficient.
double power_log_coeff(double a, double* sign) {
    const double g = std::tgamma(-a / 2);
    if (sign) *sign = g < 0 ? -1.0 : 1.0;
    return 0.5 * std::log(2 * pi) + (a + 0.5) * std::log(2.0) + std::lgamma((a + 1) / 2) - std::lgamma(-a / 2);
}

double log_dd_ft(int n, double c, double r) {
    const double lg_fact = std::lgamma(2.0 * n + 1);
    const double lg_half = std::lgamma(0.5 - n); // lgamma gives log |Gamma|
    const double pre = 0.5 * std::log(2 * pi) + (n + 0.5) * std::log(2.0) - lg_half - lg_fact;
    if (r == 0.0) return pre + std::lgamma(static_cast<double>(n)) + (n - 1) * std::log(2.0);
    const double s = std::fabs(2.0 * std::sin(0.5 * r));
    if (s == 0.0) return -kInf;
    return pre + 2 * n * std::log(s) + n * (std::log(c) - std::log(r)) + specfun::log_bessel_k(n, c * r);
}

KernelSpec lattice_base(const KernelSpec& k) {
    const KernelSpec& b = *k.base;
    if (k.lattice_scale == 1.0) return b;
    Dilated dl = dilate(b, 1.0 / k.lattice_scale);
    if (!dl.closed) fail(ErrorCode::TailError, "cardinal base " + b.describe() + " is not dilation closed");
    return dl.kernel;
}

double log_periodization(const KernelSpec& b, double xi, int J) {
    const double x0 = xi - 2 * pi * std::round(xi / (2 * pi));
    std::vector<double> terms;
    terms.reserve(2 * J + 1);
    for (int j = -J; j <= J; ++j) terms.push_back(log_abs_ft(b, Point(x0 - 2 * pi * j)));
    return log_sum_exp(terms);
}

std::mutex g_cache_mutex;
std::map<std::string, std::shared_ptr<const Periodizer>> g_periodizer_cache;
std::map<std::string, std::shared_ptr<const CardinalFunction>> g_cardinal_cache;

std::shared_ptr<const Periodizer> cached_periodizer(const KernelSpec& b) {
    const std::string key = b.describe();
    {
        std::lock_guard<std::mutex> lk(g_cache_mutex);
        auto it = g_periodizer_cache.find(key);
        if (it != g_periodizer_cache.end()) return it->second;
    }
    auto p = std::make_shared<const Periodizer>(b);
    std::lock_guard<std::mutex> lk(g_cache_mutex);
    g_periodizer_cache[key] = p;
    return p;
}

// 1D lattice-coordinate base kernels whose cardinal factorizes over axes.
std::vector<KernelSpec> axis_bases(const KernelSpec& k) {
    KernelSpec b = lattice_base(k);
    if (b.dim == 1) return {b};
    if (b.family != Family::Gaussian)
        fail(ErrorCode::UnsupportedDim, "cardinal functions in d=2 are supported for Gaussian bases only");
    KernelSpec one = b;
    one.dim = 1;
    return std::vector<KernelSpec>(b.dim, one);
}

double log_cardinal_lattice(const KernelSpec& b1, double xi, int J) {
    return log_abs_ft(b1, Point(xi)) - log_periodization(b1, xi, J);
}

} // namespace

const char* family_name(Family f) {
    switch (f) {
    case Family::Gaussian: return "gaussian";
    case Family::InverseMultiquadric: return "imq";
    case Family::Matern: return "matern";
    case Family::Power: return "power";
    case Family::DividedDiffMultiquadric: return "ddmq";
    case Family::Cardinal: return "cardinal";
    }
    return "unknown";
}

Family parse_family(const std::string& s) {
    if (s == "gaussian") return Family::Gaussian;
    if (s == "imq" || s == "multiquadric" || s == "inverse_multiquadric" || s == "mq") return Family::InverseMultiquadric;
    if (s == "matern") return Family::Matern;
    if (s == "power") return Family::Power;
    if (s == "ddmq" || s == "dd_multiquadric" || s == "divided_difference_multiquadric")
        return Family::DividedDiffMultiquadric;
    if (s == "cardinal") return Family::Cardinal;
    fail(ErrorCode::ParseError, "unknown kernel family '" + s + "'");
}

void KernelSpec::validate() const {
    if (dim < 1 || dim > 2) fail(ErrorCode::UnsupportedDim, "only d = 1 and d = 2 are supported");
    if (!std::isfinite(alpha) || !std::isfinite(c)) fail(ErrorCode::InvalidArgument, "non-finite kernel parameter");
    switch (family) {
    case Family::Gaussian:
        if (!(alpha > 0)) fail(ErrorCode::InvalidArgument, "Gaussian requires alpha > 0");
        break;
    case Family::InverseMultiquadric:
        if (!(c > 0)) fail(ErrorCode::InvalidArgument, "inverse multiquadric requires c > 0");
        if (alpha == 0) fail(ErrorCode::InvalidArgument, "inverse multiquadric requires alpha != 0");
        break;
    case Family::Matern:
        if (!(c > 0) || !(alpha > 0.5 * dim)) fail(ErrorCode::InvalidArgument, "Matern requires alpha > d/2, c > 0");
        break;
    case Family::Power:
        if (dim != 1) fail(ErrorCode::UnsupportedDim, "power kernel is univariate");
        if (!(alpha > 0) || is_even_integer(alpha))
            fail(ErrorCode::InvalidArgument, "power kernel requires alpha > 0 not an even integer");
        break;
    case Family::DividedDiffMultiquadric:
        if (dim != 1) fail(ErrorCode::UnsupportedDim, "divided-difference multiquadric is univariate");
        if (!(alpha >= 1) || alpha != std::floor(alpha) || alpha > 20)
            fail(ErrorCode::InvalidArgument, "divided-difference multiquadric requires integer 1 <= alpha <= 20");
        if (!(c > 0)) fail(ErrorCode::InvalidArgument, "divided-difference multiquadric requires c > 0");
        break;
    case Family::Cardinal:
        if (!base) fail(ErrorCode::InvalidArgument, "cardinal kernel requires a base");
        if (!(lattice_scale > 0)) fail(ErrorCode::InvalidArgument, "cardinal lattice_scale must be positive");
        if (base->family == Family::Cardinal || base->family == Family::Power)
            fail(ErrorCode::InvalidArgument, "cardinal base transform must be strictly positive");
        if (base->dim != dim) fail(ErrorCode::InvalidArgument, "cardinal base dimension mismatch");
        base->validate();
        break;
    }
}

std::string KernelSpec::describe() const {
    std::string s = family_name(family);
    s += "(alpha=" + fmt17(alpha);
    if (family != Family::Gaussian && family != Family::Power && family != Family::Cardinal) s += ",c=" + fmt17(c);
    s += ",d=" + std::to_string(dim);
    if (family == Family::Cardinal) s += ",base=" + base->describe() + ",scale=" + fmt17(lattice_scale);
    return s + ")";
}

KernelSpec gaussian(double alpha, int dim) {
    KernelSpec k{Family::Gaussian, alpha, 1.0, dim, nullptr, 1.0};
    k.validate();
    return k;
}
KernelSpec inverse_multiquadric(double alpha, double c, int dim) {
    KernelSpec k{Family::InverseMultiquadric, alpha, c, dim, nullptr, 1.0};
    k.validate();
    return k;
}
KernelSpec matern(double alpha, double c, int dim) {
    KernelSpec k{Family::Matern, alpha, c, dim, nullptr, 1.0};
    k.validate();
    return k;
}
KernelSpec power(double alpha) {
    KernelSpec k{Family::Power, alpha, 1.0, 1, nullptr, 1.0};
    k.validate();
    return k;
}
KernelSpec dd_multiquadric(int alpha, double c) {
    KernelSpec k{Family::DividedDiffMultiquadric, static_cast<double>(alpha), c, 1, nullptr, 1.0};
    k.validate();
    return k;
}
KernelSpec cardinal(const KernelSpec& base, double lattice_scale) {
    KernelSpec k{Family::Cardinal, base.alpha, base.c, base.dim, std::make_shared<const KernelSpec>(base), lattice_scale};
    k.validate();
    return k;
}

double eval_radial(const KernelSpec& k, double r) {
    r = std::fabs(r);
    switch (k.family) {
    case Family::Gaussian: {
        const double u = r / k.alpha;
        return std::exp(-u * u);
    }
    case Family::InverseMultiquadric: return std::pow(r * r + k.c * k.c, -imq_beta(k));
    case Family::Matern: return std::exp(log_imq_ft(k.alpha, k.c, k.dim, r) - k.dim * std::log(2 * pi));
    case Family::Power: return r == 0.0 ? 0.0 : std::pow(r, k.alpha);
    case Family::DividedDiffMultiquadric: return dd_eval(static_cast<int>(k.alpha), k.c, r);
    case Family::Cardinal: break;
    }
    fail(ErrorCode::InvalidArgument, "cardinal kernels are not radial");
}

double eval(const KernelSpec& k, const Point& x) {
    if (x.dim != k.dim) fail(ErrorCode::ShapeMismatch, "point dimension does not match kernel");
    if (k.dim > 1 && (k.family == Family::Power || k.family == Family::DividedDiffMultiquadric))
        fail(ErrorCode::UnsupportedDim, "univariate kernel evaluated in d > 1");
    if (k.family != Family::Cardinal) return eval_radial(k, x.norm());

    const std::vector<KernelSpec> bases = axis_bases(k);
    double v = 1.0;
    for (int i = 0; i < k.dim; ++i) {
        const double t = x[i] / k.lattice_scale;
        const std::string key = bases[i].describe();
        std::shared_ptr<const CardinalFunction> cf;
        {
            std::lock_guard<std::mutex> lk(g_cache_mutex);
            auto it = g_cardinal_cache.find(key);
            if (it != g_cardinal_cache.end() && it->second->t_max() >= std::fabs(t)) cf = it->second;
        }
        if (!cf) {
            cf = std::make_shared<const CardinalFunction>(bases[i], std::max(16.0, 2.0 * std::fabs(t)));
            std::lock_guard<std::mutex> lk(g_cache_mutex);
            g_cardinal_cache[key] = cf;
        }
        v *= cf->value(t);
    }
    return v;
}

double log_abs_ft(const KernelSpec& k, const Point& xi) {
    if (xi.dim != k.dim) fail(ErrorCode::ShapeMismatch, "frequency dimension does not match kernel");
    const double r = xi.norm();
    switch (k.family) {
    case Family::Gaussian: return log_gaussian_ft(k.alpha, k.dim, r);
    case Family::InverseMultiquadric: return log_imq_ft(imq_beta(k), k.c, k.dim, r);
    case Family::Matern: return -k.alpha * std::log(r * r + k.c * k.c);
    case Family::Power:
        if (r == 0.0) return kInf;
        return power_log_coeff(k.alpha, nullptr) - (k.alpha + 1) * std::log(r);
    case Family::DividedDiffMultiquadric: return log_dd_ft(static_cast<int>(k.alpha), k.c, r);
    case Family::Cardinal: {
        const std::vector<KernelSpec> bases = axis_bases(k);
        const double s = k.lattice_scale;
        double v = k.dim * std::log(s);
        for (int i = 0; i < k.dim; ++i) v += cached_periodizer(bases[i])->log_lhat(s * xi[i]);
        return v;
    }
    }
    return kInf;
}

double eval_ft(const KernelSpec& k, const Point& xi) {
    if (k.family == Family::Matern) {
        if (xi.dim != k.dim) fail(ErrorCode::ShapeMismatch, "frequency dimension does not match kernel");
        const double r = xi.norm();
        return std::pow(r * r + k.c * k.c, -k.alpha);
    }
    const double l = log_abs_ft(k, xi);
    if (l == kInf) fail(ErrorCode::DomainError, "transform of " + k.describe() + " is singular at this frequency");
    double sign = 1.0;
    if (k.family == Family::Power) power_log_coeff(k.alpha, &sign);
    return sign * std::exp(l);
}

double eval_cardinal_ft(const KernelSpec& base, const Point& xi, int J) {
    if (J < 0) fail(ErrorCode::InvalidArgument, "truncation J must be nonnegative");
    KernelSpec k = cardinal(base, 1.0);
    const std::vector<KernelSpec> bases = axis_bases(k);
    double v = 0.0;
    for (int i = 0; i < k.dim; ++i) v += log_cardinal_lattice(bases[i], xi[i], J);
    return std::exp(v);
}

double log_cardinal_ft(const KernelSpec& base, const Point& xi) { return log_abs_ft(cardinal(base, 1.0), xi); }

double eval_cardinal_ft(const KernelSpec& base, const Point& xi) { return std::exp(log_cardinal_ft(base, xi)); }

double ft_tail_integral(const KernelSpec& k, double a) {
    if (k.dim != 1) fail(ErrorCode::UnsupportedDim, "ft_tail_integral is defined for 1D transforms");
    if (!(a > 0)) fail(ErrorCode::InvalidArgument, "ft_tail_integral requires a > 0");
    switch (k.family) {
    case Family::Gaussian: return pi * std::erfc(0.5 * k.alpha * a);
    case Family::Matern: return std::pow(a, 1 - 2 * k.alpha) / (2 * k.alpha - 1);
    case Family::InverseMultiquadric: {
        const double f0 = log_abs_ft(k, Point(a));
        specfun::QuadratureSpec q{1e-300, 1e-8, 2000};
        const double v = specfun::integrate_semi_infinite(
            [&](double u) { return std::exp(log_abs_ft(k, Point(u)) - f0); }, a, q);
        return (1 + 1e-6) * v * std::exp(f0);
    }
    default: break;
    }
    fail(ErrorCode::TailError, "no certified transform tail for " + k.describe());
}

int cardinal_truncation(const KernelSpec& base, double rel_tail) {
    KernelSpec b = base;
    if (b.dim == 2 && b.family == Family::Gaussian) b.dim = 1;
    if (b.dim != 1) fail(ErrorCode::UnsupportedDim, "cardinal truncation for d=2 needs a Gaussian base");
    return Periodizer(b, rel_tail).terms();
}

double radial_tail_integral(const KernelSpec& k, double a) {
    a = std::max(a, 0.0);
    const int d = k.dim;
    switch (k.family) {
    case Family::Gaussian:
        if (d == 1) return k.alpha * std::sqrt(pi) * std::erfc(a / k.alpha);
        return pi * k.alpha * k.alpha * std::exp(-(a / k.alpha) * (a / k.alpha));
    case Family::InverseMultiquadric: {
        const double beta = imq_beta(k);
        if (d == 2) {
            if (beta <= 1) break;
            return pi * std::pow(a * a + k.c * k.c, 1 - beta) / (beta - 1);
        }
        if (beta <= 0.5) break;
        const double c = k.c;
        double head = 0.0;
        double from = a;
        if (a < c) {
            head = 2 * specfun::integrate([&](double r) { return std::pow(r * r + c * c, -beta); }, specfun::Interval{a, c});
            from = c;
        }
        return head + 2 * std::pow(from, 1 - 2 * beta) / (2 * beta - 1);
    }
    case Family::Matern: {
        specfun::QuadratureSpec q{1e-300, 1e-9, 2000};
        const double v = specfun::integrate_semi_infinite(
            [&](double r) { return (d == 1 ? 2.0 : 2 * pi * r) * eval_radial(k, r); }, a, q);
        return (1 + 1e-6) * v;
    }
    default: break;
    }
    fail(ErrorCode::TailNotCertifiable, "no registered decay class for " + k.describe());
}

double aliasing_ratio(const AliasingQuery& q, const Point& xi) {
    if (!(q.h > 0) || !(q.band_radius > 0)) fail(ErrorCode::InvalidArgument, "aliasing query needs h > 0, R > 0");
    if (q.j.norm_inf() == 0) fail(ErrorCode::InvalidArgument, "aliasing query needs j != 0");
    const double ld = log_abs_ft(q.kernel, xi);
    if (ld == kInf) return 0.0;
    const double ln = log_abs_ft(q.kernel, xi + (2 * pi / q.h) * q.j);
    if (ln == -kInf) return 0.0;
    return std::exp(ln - ld);
}

namespace {

// Sum over j of grid maxima using points with index step `stride` of the fine grid.
double g_grid(const KernelSpec& k, double h, double R, int j_max, int n_fine, int stride) {
    const int d = k.dim;
    std::vector<Point> pts;
    for (int i = 0; i < n_fine; i += stride) {
        const double u = -R + 2 * R * i / (n_fine - 1);
        if (d == 1) {
            pts.emplace_back(u);
        } else {
            for (int l = 0; l < n_fine; l += stride) {
                const double w = -R + 2 * R * l / (n_fine - 1);
                if (u * u + w * w <= R * R * (1 + 1e-12)) pts.emplace_back(u, w);
            }
        }
    }
    std::vector<double> ld(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) ld[i] = log_abs_ft(k, pts[i]);
    double total = 0.0;
    auto add_j = [&](const Point& j) {
        double m = 0.0;
        for (size_t i = 0; i < pts.size(); ++i) {
            if (ld[i] == kInf) continue;
            const double ln = log_abs_ft(k, pts[i] + (2 * pi / h) * j);
            if (ln == -kInf) continue;
            m = std::max(m, std::exp(ln - ld[i]));
        }
        total += m;
    };
    if (d == 1) {
        for (int j = 1; j <= j_max; ++j) {
            add_j(Point(j));
            add_j(Point(-j));
        }
    } else {
        for (int a = -j_max; a <= j_max; ++a)
            for (int b = -j_max; b <= j_max; ++b)
                if (a != 0 || b != 0) add_j(Point(a, b));
    }
    return total;
}

} // namespace

double g_alpha(const KernelSpec& k, double h, double band_radius, int j_max, int xi_grid) {
    if (!(h > 0) || !(band_radius > 0)) fail(ErrorCode::InvalidArgument, "g_alpha needs h > 0 and R > 0");
    if (j_max <= 0) return 0.0;
    if (xi_grid < 1) fail(ErrorCode::InvalidArgument, "g_alpha needs xi_grid >= 1");
    const int n_coarse = std::max(2, xi_grid);
    const int n_fine = 2 * n_coarse - 1;
    const double coarse = g_grid(k, h, band_radius, j_max, n_fine, 2);
    const double fine = g_grid(k, h, band_radius, j_max, n_fine, 1);
    return std::max(fine, fine + (fine - coarse) / 3.0);
}

std::pair<double, double> cardinal_g_bound_check(const KernelSpec& base, double h, double band_radius, int j_max,
                                                 int xi_grid) {
    if (j_max <= 0) return {0.0, 0.0};
    const KernelSpec L = cardinal(base, 1.0);
    const double gl = g_alpha(L, h, band_radius, j_max, xi_grid);
    const double gh = g_alpha(base, h, band_radius, j_max, xi_grid);
    const double g1 = g_alpha(base, 1.0, band_radius, j_max, xi_grid);
    return {gl, gh * (1 + g1)};
}

Dilated dilate(const KernelSpec& k, double s) {
    if (!(s > 0)) fail(ErrorCode::InvalidArgument, "dilation factor must be positive");
    Dilated out{false, k, 1.0};
    switch (k.family) {
    case Family::Gaussian:
        out.closed = true;
        out.kernel.alpha = k.alpha * s;
        break;
    case Family::InverseMultiquadric:
        out.closed = true;
        out.kernel.c = k.c * s;
        out.factor = std::pow(s, 2 * imq_beta(k));
        break;
    case Family::Matern:
        out.closed = true;
        out.kernel.c = k.c / s;
        out.factor = std::pow(s, k.dim - 2 * k.alpha);
        break;
    case Family::Power:
        out.closed = true;
        out.factor = std::pow(s, -k.alpha);
        break;
    case Family::Cardinal:
    case Family::DividedDiffMultiquadric: break;
    }
    return out;
}

} // namespace kterm::kernels
