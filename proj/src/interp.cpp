#include "kterm/interp.hpp"

#include "kterm/error.hpp"
#include "kterm/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>

namespace kterm::interp {

void TestFunction::validate() const {
    if (!eval) fail(ErrorCode::InvalidArgument, "test function has no evaluator");
    if (!(decay_kappa > 1)) fail(ErrorCode::InvalidArgument, "decay exponent must exceed d = 1");
    if (sobolev_k < 1) fail(ErrorCode::InvalidArgument, "sobolev order must be positive");
    if (!(decay_const > 0)) fail(ErrorCode::InvalidArgument, "decay constant must be positive");
}

double TestFunction::decay_check() const {
    double m = 0;
    for (int i = 0; i <= 200; ++i) {
        const double x = std::pow(10.0, 1 + 2.0 * i / 200);
        m = std::max({m, std::fabs(eval(x)) * std::pow(x, decay_kappa), std::fabs(eval(-x)) * std::pow(x, decay_kappa)});
    }
    return m;
}

TestFunction rational_bump(double kappa) {
    TestFunction f;
    char buf[64];
    std::snprintf(buf, sizeof buf, "rational_bump(kappa=%g)", kappa);
    f.name = buf;
    f.eval = [kappa](double x) { return std::pow(1 + std::fabs(x) * x * x, -kappa / 3); };
    f.sobolev_k = 3;
    f.decay_kappa = kappa;
    f.decay_const = 1.0;
    return f;
}

TestFunction decayed_gaussian(double kappa) {
    TestFunction f;
    char buf[64];
    std::snprintf(buf, sizeof buf, "decayed_gaussian(kappa=%g)", kappa);
    f.name = buf;
    f.eval = [kappa](double x) { return std::exp(-x * x) * std::pow(1 + x * x, -kappa / 2); };
    f.sobolev_k = 8;
    f.decay_kappa = kappa;
    f.decay_const = 1.0;
    return f;
}

TestFunction zero_function() {
    TestFunction f;
    f.name = "zero";
    f.eval = [](double) { return 0.0; };
    f.sobolev_k = 8;
    f.decay_kappa = 8;
    f.decay_const = 1e-300;
    return f;
}

const char* base_name(CardinalBase b) { return b == CardinalBase::Gaussian ? "gaussian" : "multiquadric"; }

CardinalBase parse_base(const std::string& s) {
    if (s == "gaussian") return CardinalBase::Gaussian;
    if (s == "multiquadric" || s == "mq" || s == "imq") return CardinalBase::Multiquadric;
    fail(ErrorCode::UsageError, "unknown cardinal base '" + s + "'");
}

void InterpolantSpec::validate() const {
    if (!(h > 0) || !std::isfinite(h)) fail(ErrorCode::InvalidArgument, "h must be positive");
    if (!(alpha > 0)) fail(ErrorCode::InvalidArgument, "alpha must be positive");
    if (base == CardinalBase::Multiquadric && !(alpha > 0.5))
        fail(ErrorCode::InvalidArgument, "multiquadric cardinal requires alpha > d/2");
    if (!(c > 0)) fail(ErrorCode::InvalidArgument, "shape parameter must be positive");
}

kernels::KernelSpec InterpolantSpec::x_kernel() const {
    return base == CardinalBase::Gaussian ? kernels::gaussian(alpha) : kernels::inverse_multiquadric(alpha, c);
}

kernels::KernelSpec InterpolantSpec::lattice_kernel() const {
    validate();
    const kernels::Dilated d = kernels::dilate(x_kernel(), 1.0 / h);
    return d.kernel;
}

double InterpolantSpec::tau() const { return base == CardinalBase::Gaussian ? h * h : 1.0 / h; }

std::shared_ptr<const kernels::CardinalFunction> lattice_cardinal(const InterpolantSpec& spec, double t_max) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const kernels::CardinalFunction>> cache;
    const kernels::KernelSpec k = spec.lattice_kernel();
    const std::string key = k.describe();
    std::lock_guard<std::mutex> lk(mu);
    auto& slot = cache[key];
    if (!slot || slot->t_max() < t_max) {
        double t = 16;
        while (t < t_max) t *= 2;
        slot = std::make_shared<const kernels::CardinalFunction>(k, t);
    }
    return slot;
}

long i_sharp_radius(const TestFunction& f, const InterpolantSpec& spec, double tail_tol) {
    f.validate();
    spec.validate();
    if (!(tail_tol > 0)) fail(ErrorCode::InvalidArgument, "tail_tol must be positive");
    const double k = f.decay_kappa, h = spec.h;
    // sup|L| <= 1; sum_{|j|>J} |f(hj)| <= 2 D h^{-k} J^{1-k} / (k-1) for hJ >= 1.
    const double J0 = std::ceil(1.0 / h);
    const double J = std::pow(2 * f.decay_const * std::pow(h, -k) / ((k - 1) * tail_tol), 1.0 / (k - 1));
    const double r = std::max(J0, std::ceil(J));
    if (r > 2e6) fail(ErrorCode::TailNotCertifiable, "lattice radius for the requested tail exceeds 2e6");
    return static_cast<long>(r);
}

namespace {

double lattice_sum(const TestFunction& f, const InterpolantSpec& spec, double x, long J) {
    const double t0 = x / spec.h;
    const auto L = lattice_cardinal(spec, std::fabs(t0) + J + 1);
    // L(t0 - j) for j = -J..J
    const std::vector<double> lv = L->progression(t0 + static_cast<double>(J), -1.0, 2 * J + 1);
    double s = 0;
    for (long i = 0; i <= 2 * J; ++i) {
        const double fj = f.eval(spec.h * static_cast<double>(i - J));
        if (fj != 0.0) s += fj * lv[i];
    }
    return s;
}

} // namespace

double i_sharp(const TestFunction& f, const InterpolantSpec& spec, double x, double tail_tol) {
    return lattice_sum(f, spec, x, i_sharp_radius(f, spec, tail_tol));
}

long i_flat_radius(double h) { return static_cast<long>(std::floor(1.0 / (h * h) + 1e-9)); }

double i_flat(const TestFunction& f, const InterpolantSpec& spec, double x) {
    f.validate();
    spec.validate();
    return lattice_sum(f, spec, x, i_flat_radius(spec.h));
}

double i_n_spacing(long N) {
    if (N < 1) fail(ErrorCode::InvalidArgument, "N must be at least 1");
    return 1.0 / std::sqrt(static_cast<double>(N));
}

double i_n(const TestFunction& f, CardinalBase b, double alpha, long N, double x) {
    InterpolantSpec s{b, alpha, i_n_spacing(N)};
    return i_flat(f, s, x);
}

GridInterpolant::GridInterpolant(const TestFunction& f, const InterpolantSpec& spec, long J, int M, long I)
    : spec_(spec), J_(J), M_(M), I_(I) {
    f.validate();
    spec.validate();
    if (J < 0 || M < 1 || I < 0) fail(ErrorCode::InvalidArgument, "grid interpolant sizes");
    samples_.resize(2 * J + 1);
    for (long j = -J; j <= J; ++j) samples_[j + J] = f.eval(spec.h * j);
    // t = i/M - j ranges over k/M with |k| <= I + M J.
    const long K = I + static_cast<long>(M) * J;
    const auto L = lattice_cardinal(spec, static_cast<double>(K) / M + 1);
    k0_ = -K;
    ltab_ = L->tabulate(k0_, 2 * K + 1, M);
}

double GridInterpolant::at(long i) const {
    if (i < -I_ || i > I_) fail(ErrorCode::DomainError, "grid index outside the tabulated range");
    double s = 0;
    for (long j = -J_; j <= J_; ++j) s += samples_[j + J_] * ltab_[i - static_cast<long>(M_) * j - k0_];
    return s;
}

std::vector<double> GridInterpolant::values() const {
    std::vector<double> out(2 * I_ + 1);
    parallel_for(out.size(), [&](size_t k) { out[k] = at(static_cast<long>(k) - I_); });
    return out;
}

double interpolation_error(const TestFunction& f, const InterpolantSpec& spec, double p) {
    if (p != 0 && !(p >= 1)) fail(ErrorCode::InvalidArgument, "p must be >= 1 (or 0 for the sup norm)");
    const int M = 8;
    const long J = i_flat_radius(spec.h);
    // [-3/h, 3/h] in steps of h/M.
    const long I = static_cast<long>(std::llround(3.0 / (spec.h * spec.h))) * M;
    const GridInterpolant g(f, spec, J, M, I);
    const std::vector<double> v = g.values();
    const double dx = spec.h / M;
    double acc = 0;
    for (long i = -I; i <= I; ++i) {
        const double e = std::fabs(v[i + I] - f.eval(g.x(i)));
        if (p == 0) acc = std::max(acc, e);
        else acc += std::pow(e, p) * dx;
    }
    return p == 0 ? acc : std::pow(acc, 1.0 / p);
}

double lattice_tail_sum(const TestFunction& f, double h) {
    f.validate();
    const long J = i_flat_radius(h);
    // Explicit terms out to 64 J, then the integral bound of the decay envelope.
    const long J1 = 64 * std::max(J, 1L);
    double s = 0;
    for (long j = J1; j > J; --j) s += std::fabs(f.eval(h * j)) + std::fabs(f.eval(-h * j));
    const double k = f.decay_kappa;
    s += 2 * f.decay_const * std::pow(h, -k) * std::pow(static_cast<double>(J1), 1 - k) / (k - 1);
    return s;
}

double cardinal_norm_scaling(const InterpolantSpec& spec, double p) {
    if (!(p > 1) || !std::isfinite(p)) fail(ErrorCode::InvalidArgument, "cardinal_norm_scaling needs 1 < p < inf");
    spec.validate();
    double lp;
    if (p == 2) {
        lp = lattice_cardinal(spec, 16)->l2_norm();
    } else {
        // Riemann sum of |L|^p on t = k/16, |t| <= 512.
        const int M = 16;
        const long K = 512L * M;
        const auto L = lattice_cardinal(spec, 513);
        const auto v = L->tabulate(-K, 2 * K + 1, M);
        double s = 0;
        for (double x : v) s += std::pow(std::fabs(x), p);
        lp = std::pow(s / M, 1.0 / p);
    }
    return std::pow(spec.h, 1.0 / p) * lp;
}

std::string rate_csv(CardinalBase b, double alpha, double p, const std::vector<RateRow>& rows, double slope) {
    std::ostringstream os;
    os << "family,alpha,h,p,error,fitted_slope\n";
    char buf[200];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%.12g,%.12g,%.12g\n", base_name(b), alpha, r.h, p, r.error, slope);
        os << buf;
    }
    return os.str();
}

} // namespace kterm::interp
