#include "kterm/cardinal.hpp"

#include "kterm/error.hpp"
#include "kterm/parallel.hpp"
#include "kterm/specfun.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

namespace kterm::kernels {

using std::numbers::pi;

namespace {

using specfun::GaussLegendre16;
const GaussLegendre16& gl16() { return specfun::gauss_legendre16(); }

} // namespace

Periodizer::Periodizer(const KernelSpec& base, double rel_tail) : base_(base) {
    if (base.dim != 1) fail(ErrorCode::UnsupportedDim, "Periodizer takes a univariate base");
    base.validate();
    const double lref = log_abs_ft(base, Point(pi)); // P(xi) >= phi^(pi)
    if (base.family == Family::Gaussian || base.family == Family::InverseMultiquadric) {
        for (J_ = 1;; J_ = (J_ < 8 ? J_ + 1 : 2 * J_)) {
            const double tail = ft_tail_integral(base, 2 * pi * J_ - pi) / pi;
            if (tail == 0.0 || std::log(tail) <= std::log(rel_tail) + lref) break;
            if (J_ > 100000) fail(ErrorCode::TailError, "periodization tail did not certify");
        }
        return;
    }
    if (base.family == Family::Matern) {
        poisson_ = true;
        for (J_ = 1;; J_ = (J_ < 8 ? J_ + 1 : 2 * J_)) {
            const double tail = radial_tail_integral(base, J_);
            if (tail == 0.0 || std::log(tail) <= std::log(rel_tail) + lref) break;
            if (J_ > 100000) fail(ErrorCode::TailError, "Poisson tail did not certify");
        }
        for (int k = 0; k <= J_; ++k) phik_.push_back(eval_radial(base, k));
        return;
    }
    fail(ErrorCode::TailError, "cannot certify the periodization tail for " + base.describe());
}

double Periodizer::log_sum(double xi) const {
    if (poisson_) {
        double s = phik_[0];
        for (int k = 1; k <= J_; ++k) s += 2 * phik_[k] * std::cos(k * xi);
        return std::log(s);
    }
    const double x0 = xi - 2 * pi * std::round(xi / (2 * pi));
    double m = -INFINITY;
    std::vector<double> l(2 * J_ + 1);
    for (int j = -J_; j <= J_; ++j) {
        l[j + J_] = log_abs_ft(base_, Point(x0 - 2 * pi * j));
        m = std::max(m, l[j + J_]);
    }
    double s = 0.0;
    for (double v : l) s += std::exp(v - m);
    return m + std::log(s);
}

double Periodizer::log_lhat(double xi) const { return log_abs_ft(base_, Point(xi)) - log_sum(xi); }

CardinalFunction::CardinalFunction(const KernelSpec& base, double t_max, double tol)
    : base_(base), per_(base), t_max_(t_max), J_(0), xi_max_(0), tail_(0) {
    if (!(t_max > 0)) fail(ErrorCode::InvalidArgument, "t_max must be positive");
    auto lhat = [&](double xi) { return std::exp(per_.log_lhat(xi)); };

    // Lhat(xi) <= phi^(xi) / phi^(pi) for radially decreasing transforms.
    const double lref = log_abs_ft(base, Point(pi));
    for (J_ = 1;; ++J_) {
        xi_max_ = (2 * J_ + 1) * pi;
        const double t = ft_tail_integral(base, xi_max_);
        tail_ = t > 0 ? std::exp(std::log(t) - lref) / pi : 0.0;
        if (tail_ <= tol) break;
        if (J_ > 10000) fail(ErrorCode::TailError, "cardinal transform tail did not certify");
    }

    const GaussLegendre16& g = gl16();
    struct Coarse {
        double a, b;
        std::array<double, 16> v;
    };
    auto panel = [&](double a, double b, std::array<double, 16>& v) {
        const double c = 0.5 * (a + b), hl = 0.5 * (b - a);
        double s = 0.0;
        for (int i = 0; i < 16; ++i) {
            v[i] = lhat(c + hl * g.x[i]);
            s += g.w[i] * v[i];
        }
        return s * hl;
    };
    // Refine on the smoothness of Lhat at width <= 0.2, then split accepted panels
    // to resolve cos(xi t) and fill the finer nodes by interpolation in the 16 values.
    std::vector<Coarse> panels;
    std::function<void(double, double, double, int)> refine = [&](double a, double b, double whole, int depth) {
        const double m = 0.5 * (a + b);
        Coarse L{a, m, {}}, R{m, b, {}};
        const double l = panel(a, m, L.v), r = panel(m, b, R.v);
        if (depth < 20 && std::fabs(l + r - whole) > 1e-12 * (b - a) + 1e-15) {
            refine(a, m, l, depth + 1);
            refine(m, b, r, depth + 1);
        } else {
            panels.push_back(L);
            panels.push_back(R);
        }
    };
    const int n0 = static_cast<int>(std::ceil(xi_max_ / 0.2));
    for (int p = 0; p < n0; ++p) {
        const double a = xi_max_ * p / n0, b = xi_max_ * (p + 1) / n0;
        std::array<double, 16> v;
        refine(a, b, panel(a, b, v), 0);
    }
    double bw[16];
    for (int i = 0; i < 16; ++i) {
        double q = 1.0;
        for (int k = 0; k < 16; ++k)
            if (k != i) q *= g.x[i] - g.x[k];
        bw[i] = 1.0 / q;
    }
    auto interpolate = [&](const std::array<double, 16>& v, double u) {
        double num = 0.0, den = 0.0;
        for (int i = 0; i < 16; ++i) {
            const double d = u - g.x[i];
            if (d == 0.0) return v[i];
            const double t = bw[i] / d;
            num += t * v[i];
            den += t;
        }
        return num / den;
    };
    const double w_max = std::min(0.2, 6.0 / std::max(t_max, 1.0));
    for (const auto& P : panels) {
        const int n = std::max(1, static_cast<int>(std::ceil((P.b - P.a) / w_max * (1 - 1e-12))));
        for (int q = 0; q < n; ++q) {
            const double a = P.a + (P.b - P.a) * q / n, b = P.a + (P.b - P.a) * (q + 1) / n;
            const double c = 0.5 * (a + b), hl = 0.5 * (b - a);
            for (int i = 0; i < 16; ++i) {
                const double xi = c + hl * g.x[i];
                const double lv = n == 1 ? P.v[i] : interpolate(P.v, (2 * xi - P.a - P.b) / (P.b - P.a));
                nodes_.push_back(xi);
                lhat_.push_back(lv);
                qw_.push_back(g.w[i] * hl);
                weights_.push_back(lv * g.w[i] * hl / pi);
            }
        }
    }
}

double CardinalFunction::value(double t) const {
    if (std::fabs(t) > t_max_ * (1 + 1e-12))
        fail(ErrorCode::DomainError, "cardinal evaluation beyond the resolved range");
    double s = 0.0;
    for (size_t n = 0; n < nodes_.size(); ++n) s += weights_[n] * std::cos(nodes_[n] * t);
    return s;
}

std::vector<double> CardinalFunction::tabulate(long i0, long count, int M) const {
    if (M < 1 || count < 0) fail(ErrorCode::InvalidArgument, "tabulate needs M >= 1 and count >= 0");
    return progression(static_cast<double>(i0) / M, 1.0 / M, count);
}

std::vector<double> CardinalFunction::progression(double t0, double step, long count) const {
    if (count < 0 || !std::isfinite(t0) || !std::isfinite(step))
        fail(ErrorCode::InvalidArgument, "progression needs finite t0, step and count >= 0");
    const double t_end = t0 + step * static_cast<double>(count - 1);
    if (count > 0 && std::max(std::fabs(t0), std::fabs(t_end)) > t_max_ * (1 + 1e-12))
        fail(ErrorCode::DomainError, "cardinal tabulation beyond the resolved range");
    std::vector<double> out(count, 0.0);
    const size_t nn = nodes_.size();
    std::vector<double> rc(nn), rs(nn);
    for (size_t n = 0; n < nn; ++n) {
        rc[n] = std::cos(nodes_[n] * step);
        rs[n] = std::sin(nodes_[n] * step);
    }
    const long block = 256;
    const long nblocks = (count + block - 1) / block;
    const size_t chunk = 1024;
    parallel_for(static_cast<size_t>(nblocks), [&](size_t bi) {
        const long start = static_cast<long>(bi) * block, stop = std::min(count, start + block);
        const double ts = t0 + step * static_cast<double>(start);
        double zc[chunk], zs[chunk];
        for (size_t n0 = 0; n0 < nn; n0 += chunk) {
            const size_t m = std::min(chunk, nn - n0);
            for (size_t n = 0; n < m; ++n) {
                zc[n] = std::cos(nodes_[n0 + n] * ts);
                zs[n] = std::sin(nodes_[n0 + n] * ts);
            }
            const double* w = weights_.data() + n0;
            const double *ac = rc.data() + n0, *as = rs.data() + n0;
            for (long i = start; i < stop; ++i) {
                double s = 0.0;
#pragma omp simd reduction(+ : s)
                for (size_t n = 0; n < m; ++n) {
                    s += w[n] * zc[n];
                    const double c = zc[n] * ac[n] - zs[n] * as[n];
                    zs[n] = zc[n] * as[n] + zs[n] * ac[n];
                    zc[n] = c;
                }
                out[i] += s;
            }
        }
    });
    return out;
}

double CardinalFunction::l2_norm() const {
    double s = 0.0;
    for (size_t n = 0; n < nodes_.size(); ++n) s += lhat_[n] * lhat_[n] * qw_[n];
    return std::sqrt(s / pi);
}

double CardinalFunction::sup_bound() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s + tail_;
}

} // namespace kterm::kernels
