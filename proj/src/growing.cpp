#include "kterm/growing.hpp"

#include "kterm/error.hpp"
#include "kterm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

namespace kterm::growing {

using std::numbers::pi;
using cd = std::complex<double>;

namespace {

constexpr double kUnderflow = -745.0;

double log_raw_mq_ft(int n, double c, double r) {
    const double pre = 0.5 * std::log(2 * pi) + (n + 0.5) * std::log(2.0) - std::lgamma(0.5 - n);
    return pre + n * (std::log(c) - std::log(r)) + specfun::log_bessel_k(n, c * r);
}

long j_limit(long N) { return N * N; }

} // namespace

GrowingBase GrowingBase::from_kernel(const kernels::KernelSpec& k) {
    k.validate();
    GrowingBase b;
    if (k.family == kernels::Family::Power) b.kind = Kind::Power;
    else if (k.family == kernels::Family::DividedDiffMultiquadric) b.kind = Kind::DividedDiff;
    else fail(ErrorCode::InvalidArgument, "growing operators take a power or divided-difference multiquadric kernel");
    b.alpha = k.alpha;
    b.c = k.c;
    return b;
}

GrowingBase GrowingBase::raw_multiquadric(int n, double c) {
    GrowingBase b{Kind::RawMultiquadric, static_cast<double>(n), c};
    b.validate();
    return b;
}

std::string GrowingBase::name() const {
    switch (kind) {
    case Kind::Power: return "power";
    case Kind::DividedDiff: return "ddmq";
    case Kind::RawMultiquadric: return "mq";
    }
    return "?";
}

void GrowingBase::validate() const {
    if (kind == Kind::Power) {
        kernels::power(alpha).validate();
        return;
    }
    if (!(alpha >= 1) || alpha != std::floor(alpha) || alpha > 20)
        fail(ErrorCode::InvalidArgument, "multiquadric order must be an integer in 1..20");
    if (!(c > 0)) fail(ErrorCode::InvalidArgument, "multiquadric requires c > 0");
}

double GrowingBase::log_abs_ft(double xi) const {
    const double r = std::fabs(xi);
    switch (kind) {
    case Kind::Power: return kernels::log_abs_ft(kernels::power(alpha), Point(xi));
    case Kind::DividedDiff: return kernels::log_abs_ft(kernels::dd_multiquadric(static_cast<int>(alpha), c), Point(xi));
    case Kind::RawMultiquadric:
        if (r == 0.0) return INFINITY;
        return log_raw_mq_ft(static_cast<int>(alpha), c, r);
    }
    return INFINITY;
}

void GrowingApproximantSpec::validate() const {
    base.validate();
    if (N < 1) fail(ErrorCode::InvalidArgument, "N must be at least 1");
    if (!(band_radius > 0)) fail(ErrorCode::InvalidArgument, "band radius must be positive");
    if (N > 46340) fail(ErrorCode::InvalidArgument, "N too large for the N^2 lattice range");
    quadrature.validate();
}

double aliasing_ratio(const GrowingBase& b, long N, double xi, long j) {
    if (j == 0) return 1.0;
    const double shift = 2 * pi * static_cast<double>(j) * static_cast<double>(N);
    if (b.kind == GrowingBase::Kind::Power) {
        if (xi == 0.0) return 0.0;
        return std::pow(std::fabs(xi) / std::fabs(xi + shift), b.alpha + 1);
    }
    const double l = b.log_abs_ft(xi + shift) - b.log_abs_ft(xi);
    return l < kUnderflow ? 0.0 : std::exp(l);
}

namespace {

void check_xi(const GrowingApproximantSpec& spec, double xi) {
    if (std::fabs(xi) > spec.band_radius * (1 + 1e-14)) fail(ErrorCode::DomainError, "frequency outside the band");
    if (xi == 0.0) fail(ErrorCode::DomainError, "base transform is singular at xi = 0");
}

// Ratios A_j, A_{-j} for j = 1..J, stopping once both underflow.
void ratio_lists(const GrowingBase& b, long N, double xi, std::vector<double>& plus, std::vector<double>& minus) {
    plus.clear();
    minus.clear();
    const long J = j_limit(N);
    for (long j = 1; j <= J; ++j) {
        const double p = aliasing_ratio(b, N, xi, j), m = aliasing_ratio(b, N, xi, -j);
        if (p == 0.0 && m == 0.0) break;
        plus.push_back(p);
        minus.push_back(m);
    }
}

cd phase_sum(const std::vector<double>& plus, const std::vector<double>& minus, double x, long N) {
    // e^{2 pi i x j N} by rotation, reseeded every 64 steps.
    const double a = 2 * pi * x * static_cast<double>(N);
    double sr = 0.0, si = 0.0, zr = 0.0, zi = 0.0, rr = std::cos(a), ri = std::sin(a);
    for (size_t i = 0; i < plus.size(); ++i) {
        if (i % 64 == 0) {
            zr = std::cos(a * static_cast<double>(i + 1));
            zi = std::sin(a * static_cast<double>(i + 1));
        } else {
            const double t = zr * rr - zi * ri;
            zi = zr * ri + zi * rr;
            zr = t;
        }
        sr += (plus[i] + minus[i]) * zr;
        si += (plus[i] - minus[i]) * zi;
    }
    return {sr, si};
}

std::vector<double> band_breaks(const approx::BandFunction& f) {
    const double R = f.band_radius;
    std::vector<double> b{-R, 0.0, R};
    for (double s : f.seams)
        if (s > -R && s < R) b.push_back(s);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

double real_checked(cd v, double tol) {
    if (std::fabs(v.imag()) > tol * (1 + std::fabs(v.real())))
        fail(ErrorCode::SymmetryViolation, "imaginary residue exceeds tolerance");
    return v.real();
}

} // namespace

cd aliasing_excess_flat(const GrowingApproximantSpec& spec, double xi, double x) {
    check_xi(spec, xi);
    std::vector<double> p, m;
    ratio_lists(spec.base, spec.N, xi, p, m);
    return phase_sum(p, m, x, spec.N);
}

cd aliasing_sum_flat(const GrowingApproximantSpec& spec, double xi, double x) {
    return 1.0 + aliasing_excess_flat(spec, xi, x);
}

double tilde_t_flat(const approx::BandFunction& f, const GrowingApproximantSpec& spec, double x) {
    spec.validate();
    if (f.dim != 1) fail(ErrorCode::UnsupportedDim, "tilde_t_flat is univariate; use tensor_eval in d = 2");
    GrowingApproximantSpec s = spec;
    s.band_radius = std::max(spec.band_radius, f.band_radius);
    const auto& f0 = f.factors[0];
    auto g = [&](double xi) -> cd {
        const cd h = f0(xi);
        if (h == cd(0.0) || xi == 0.0) return 0.0;
        return h * aliasing_sum_flat(s, xi, x) * std::polar(1.0, xi * x);
    };
    cd v;
    try {
        v = specfun::integrate_complex(g, band_breaks(f), spec.quadrature);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NonConvergence) fail(ErrorCode::QuadratureFailure, e.detail());
        throw;
    }
    return real_checked(v / (2 * pi), 1e-7);
}

TildeFlat::TildeFlat(approx::BandFunction f, GrowingApproximantSpec spec) : f_(std::move(f)), spec_(spec) {
    if (f_.dim != 1) fail(ErrorCode::UnsupportedDim, "TildeFlat is univariate");
    spec_.band_radius = std::max(spec_.band_radius, f_.band_radius);
    spec_.validate();
    const auto& gl = specfun::gauss_legendre16();
    const std::vector<double> br = band_breaks(f_);
    for (size_t i = 0; i + 1 < br.size(); ++i) {
        const double a = br[i], b = br[i + 1];
        const int n = std::max(1, static_cast<int>(std::ceil((b - a) / 0.1)));
        for (int p = 0; p < n; ++p) {
            const double pa = a + (b - a) * p / n, pb = a + (b - a) * (p + 1) / n;
            const double c = 0.5 * (pa + pb), hl = 0.5 * (pb - pa);
            for (int k = 0; k < 16; ++k) {
                const double xi = c + hl * gl.x[k];
                const cd h = f_.factors[0](xi);
                if (h == cd(0.0)) continue;
                xi_.push_back(xi);
                w_.push_back(h * (gl.w[k] * hl / (2 * pi)));
            }
        }
    }
    ratio_plus_.resize(xi_.size());
    ratio_minus_.resize(xi_.size());
    parallel_for(xi_.size(), [&](size_t i) { ratio_lists(spec_.base, spec_.N, xi_[i], ratio_plus_[i], ratio_minus_[i]); });
}

double TildeFlat::residual(double x) const {
    cd s = 0.0;
    for (size_t i = 0; i < xi_.size(); ++i)
        s += w_[i] * std::polar(1.0, xi_[i] * x) * phase_sum(ratio_plus_[i], ratio_minus_[i], x, spec_.N);
    return real_checked(s, 1e-7);
}

double TildeFlat::value(double x) const {
    cd s = 0.0;
    for (size_t i = 0; i < xi_.size(); ++i)
        s += w_[i] * std::polar(1.0, xi_[i] * x) * (1.0 + phase_sum(ratio_plus_[i], ratio_minus_[i], x, spec_.N));
    return real_checked(s, 1e-7);
}

std::vector<double> b4_derivative_sums(const GrowingBase& b, long N, double R, int l_max, int grid) {
    b.validate();
    if (l_max < 0 || l_max > 4) fail(ErrorCode::InvalidArgument, "l_max must lie in 0..4");
    if (grid < 3) fail(ErrorCode::InvalidArgument, "grid must have at least 3 points");
    if (!(R > 0)) fail(ErrorCode::InvalidArgument, "band radius must be positive");
    // Odd point count keeps xi = 0 off the grid.
    const int n = grid | 1;
    const double delta = 1e-3 * R;
    std::vector<double> xs(n + 1);
    for (int i = 0; i <= n; ++i) xs[i] = -R + 2 * R * i / n;
    // Finite-difference stencils for derivatives of order 0..4 with step delta.
    static const double st[5][5] = {{0, 0, 1, 0, 0},
                                    {1.0 / 12, -2.0 / 3, 0, 2.0 / 3, -1.0 / 12},
                                    {-1.0 / 12, 4.0 / 3, -2.5, 4.0 / 3, -1.0 / 12},
                                    {-0.5, 1, 0, -1, 0.5},
                                    {1, -4, 6, -4, 1}};
    std::vector<double> out(l_max + 1, 0.0);
    const long J = j_limit(N);
    for (long aj = 1; aj <= J; ++aj) {
        double term_max = 0.0;
        for (long j : {aj, -aj}) {
            std::vector<std::vector<double>> sup(l_max + 1, std::vector<double>(xs.size(), 0.0));
            parallel_for(xs.size(), [&](size_t i) {
                double v[5];
                for (int k = 0; k < 5; ++k) {
                    const double xi = xs[i] + (k - 2) * delta;
                    v[k] = (xi == 0.0 && b.kind != GrowingBase::Kind::Power) ? 0.0 : aliasing_ratio(b, N, xi, j);
                }
                for (int l = 0; l <= l_max; ++l) {
                    double d = 0.0;
                    for (int k = 0; k < 5; ++k) d += st[l][k] * v[k];
                    sup[l][i] = std::fabs(d) / std::pow(delta, l);
                }
            });
            for (int l = 0; l <= l_max; ++l) {
                const double m = *std::max_element(sup[l].begin(), sup[l].end());
                out[l] += m;
                if (l == 0) term_max = std::max(term_max, m);
            }
        }
        if (term_max == 0.0 || (aj > 2 && term_max < 1e-17 * out[0])) break;
    }
    return out;
}

double b3_displayed_bound(double alpha, long N, double R) {
    const double J = static_cast<double>(j_limit(N));
    double s = 0.0;
    for (double j = J; j >= 1; --j) s += 2 * std::pow(2 * j - 1, -alpha - 1);
    return std::pow(R / (pi * N), alpha + 1) * s;
}

double b3_exact_sup(double alpha, long N, double R) {
    const long J = j_limit(N);
    double s = 0.0;
    for (long j = J; j >= 1; --j) {
        const double a = 2 * pi * j * static_cast<double>(N);
        s += 2 * std::pow(R / (a - R), alpha + 1);
    }
    return s;
}

long raw_center_count(int alpha, long N) {
    if (alpha < 1 || N < 1) fail(ErrorCode::InvalidArgument, "raw_center_count needs alpha >= 1, N >= 1");
    // Centers j/N + k = (j + kN)/N; count distinct numerators.
    std::set<long> nums;
    const long J = j_limit(N);
    for (long j = -J; j <= J; ++j)
        for (long k = -alpha; k <= alpha; ++k) nums.insert(j + k * N);
    return static_cast<long>(nums.size());
}

double tensor_eval(const std::function<double(double)>& fx, const std::function<double(double)>& fy, double x, double y) {
    return fx(x) * fy(y);
}

std::string b4_csv(const GrowingBase& b, const std::vector<long>& Ns, double R, int l_max) {
    std::ostringstream os;
    os << "base,alpha,N,l,sum_estimate\n";
    char buf[160];
    for (long N : Ns) {
        const auto s = b4_derivative_sums(b, N, R, l_max);
        for (int l = 0; l <= l_max; ++l) {
            std::snprintf(buf, sizeof buf, "%s,%.12g,%ld,%d,%.12g\n", b.name().c_str(), b.alpha, N, l, s[l]);
            os << buf;
        }
    }
    return os.str();
}

} // namespace kterm::growing
