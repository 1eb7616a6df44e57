#pragma once

#include "kterm/cardinal.hpp"
#include "kterm/kernels.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace kterm::interp {

struct TestFunction {
    std::string name;
    std::function<double(double)> eval;
    int sobolev_k = 1;
    double decay_kappa = 2.0;
    double p = 2.0;
    // sup_{|x| >= 1} |f(x)| |x|^kappa, used for certified lattice tails.
    double decay_const = 1.0;

    void validate() const;
    // max of |f(x)| |x|^kappa over a log grid on [10, 1000].
    double decay_check() const;
};

// (1 + |x|^3)^{-kappa/3}: in W^3_p for every p, decay |x|^{-kappa}.
TestFunction rational_bump(double kappa = 4.0);
// e^{-x^2} (1 + x^2)^{-kappa/2}.
TestFunction decayed_gaussian(double kappa = 4.0);
TestFunction zero_function();

enum class CardinalBase { Gaussian, Multiquadric };
const char* base_name(CardinalBase b);
CardinalBase parse_base(const std::string& s);

// Cardinal interpolation on h Z with a fixed x-space kernel. In lattice
// coordinates this is the cardinal function of phi(h .), i.e. the Gaussian
// coefficient scales like h^2 and the multiquadric shape parameter like 1/h.
struct InterpolantSpec {
    CardinalBase base = CardinalBase::Gaussian;
    double alpha = 0.5; // Gaussian width, or multiquadric decay exponent (> 1/2)
    double h = 0.25;
    double c = 1.0; // multiquadric shape

    void validate() const;
    kernels::KernelSpec x_kernel() const;
    kernels::KernelSpec lattice_kernel() const;
    double tau() const;
};

// Shared cardinal function of the lattice kernel resolved for |t| <= t_max.
std::shared_ptr<const kernels::CardinalFunction> lattice_cardinal(const InterpolantSpec& spec, double t_max);

// Lattice radius J with sup|L| sum_{|j|>J} |f(hj)| <= tail_tol.
long i_sharp_radius(const TestFunction& f, const InterpolantSpec& spec, double tail_tol = 1e-8);
double i_sharp(const TestFunction& f, const InterpolantSpec& spec, double x, double tail_tol = 1e-8);
long i_flat_radius(double h);
double i_flat(const TestFunction& f, const InterpolantSpec& spec, double x);
// i_flat with h = N^{-1/2}.
double i_n(const TestFunction& f, CardinalBase b, double alpha, long N, double x);
double i_n_spacing(long N);

// Interpolant sum_{|j| <= J} f(hj) L(x/h - j) on the grid x = h i / M, |i| <= I.
class GridInterpolant {
public:
    GridInterpolant(const TestFunction& f, const InterpolantSpec& spec, long J, int M, long I);
    // value at x = h i / M
    double at(long i) const;
    std::vector<double> values() const;
    double x(long i) const { return spec_.h * static_cast<double>(i) / M_; }
    long half_width() const { return I_; }

private:
    InterpolantSpec spec_;
    long J_;
    int M_;
    long I_;
    std::vector<double> samples_; // f(hj), j = -J..J
    std::vector<double> ltab_;    // L(k / M), k = -M(J + I/M)..
    long k0_;
};

// Riemann-sum L_p error of i_flat on x = h i / 8 over [-3/h, 3/h]; p = 0 means sup.
double interpolation_error(const TestFunction& f, const InterpolantSpec& spec, double p);
// sum_{|j| > h^{-2}} |f(hj)|
double lattice_tail_sum(const TestFunction& f, double h);
// ||L(. / h)||_p = h^{1/p} ||L||_p for 1 < p < inf.
double cardinal_norm_scaling(const InterpolantSpec& spec, double p);

struct RateRow {
    double h;
    double error;
};
// Rows "family,alpha,h,p,error,fitted_slope" with the slope of log error against log(1/h).
std::string rate_csv(CardinalBase b, double alpha, double p, const std::vector<RateRow>& rows, double slope);

} // namespace kterm::interp
