#pragma once

#include "kterm/approx.hpp"
#include "kterm/kernels.hpp"
#include "kterm/specfun.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace kterm::growing {

// Growing kernels handled in frequency: |x|^alpha, the divided-difference
// multiquadric, and the raw multiquadric tau_n(x) = (x^2 + c^2)^{n - 1/2}.
struct GrowingBase {
    enum class Kind { Power, DividedDiff, RawMultiquadric };
    Kind kind = Kind::Power;
    double alpha = 1.0;
    double c = 1.0;

    static GrowingBase from_kernel(const kernels::KernelSpec& k);
    static GrowingBase raw_multiquadric(int n, double c = 1.0);
    std::string name() const;
    void validate() const;
    // log |base^(xi)|
    double log_abs_ft(double xi) const;
};

struct GrowingApproximantSpec {
    GrowingBase base;
    long N = 8; // h = 1/N
    double band_radius = 0.0;
    specfun::QuadratureSpec quadrature{};

    void validate() const;
};

// A_j(xi) = base^(xi + 2 pi j N) / base^(xi)
double aliasing_ratio(const GrowingBase& b, long N, double xi, long j);

// sum_{|j| <= N^2} A_j(xi) e^{2 pi i x j N}. DomainError at xi = 0 for the
// power kernel and outside the band.
std::complex<double> aliasing_sum_flat(const GrowingApproximantSpec& spec, double xi, double x);
// Same sum without the j = 0 term.
std::complex<double> aliasing_excess_flat(const GrowingApproximantSpec& spec, double xi, double x);

// Frequency-domain truncated operator applied to f:
// (1/2pi) int_B f^(xi) aliasing_sum_flat(xi, x) e^{i xi x} dxi.
double tilde_t_flat(const approx::BandFunction& f, const GrowingApproximantSpec& spec, double x);

// Tabulated form of the same operator on a fixed Gauss-Legendre node set with the
// alias ratios stored per node. residual(x) returns the j != 0 part directly, i.e.
// tilde_t_flat(x) - f(x) without cancellation.
class TildeFlat {
public:
    TildeFlat(approx::BandFunction f, GrowingApproximantSpec spec);
    double value(double x) const;
    double residual(double x) const;
    std::size_t node_count() const { return xi_.size(); }

private:
    approx::BandFunction f_;
    GrowingApproximantSpec spec_;
    std::vector<double> xi_;
    std::vector<std::complex<double>> w_;          // weight * f^(xi) / 2pi
    std::vector<std::vector<double>> ratio_plus_;  // A_j, j = 1, 2, ...
    std::vector<std::vector<double>> ratio_minus_; // A_{-j}
};

// For l = 0..l_max: sum_{j != 0, |j| <= N^2} sup_{|xi| <= R} |D^l A_j(xi)|, by
// central differences on a grid of `grid` points.
std::vector<double> b4_derivative_sums(const GrowingBase& b, long N, double R, int l_max = 2, int grid = 2048);
// sum_{j != 0} R^{a+1} / (pi N)^{a+1} (2|j| - 1)^{-a-1}, |j| <= N^2.
double b3_displayed_bound(double alpha, long N, double R);
// sum_{j != 0} sup_{|xi| <= R} A_j = sum_{j != 0} (R / (2 pi |j| N - R))^{a+1} for the power kernel.
double b3_exact_sup(double alpha, long N, double R);

// Distinct raw-kernel centers {j/N + k : |j| <= N^2, |k| <= alpha} behind the
// divided-difference approximant.
long raw_center_count(int alpha, long N);

double tensor_eval(const std::function<double(double)>& fx, const std::function<double(double)>& fy, double x, double y);

// Rows "base,alpha,N,l,sum_estimate".
std::string b4_csv(const GrowingBase& b, const std::vector<long>& Ns, double R, int l_max = 2);

} // namespace kterm::growing
