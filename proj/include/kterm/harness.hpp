#pragma once

#include "kterm/interp.hpp"
#include "kterm/nterm.hpp"
#include "kterm/wavelet.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace kterm::harness {

// Samples on a uniform grid over [lo, hi]^d, row-major with the last axis fastest.
struct GridFunction {
    double lo = -6.0;
    double hi = 6.0;
    int dim = 1;
    long samples_per_axis = 4801;
    std::vector<double> values;

    void validate() const;
    double spacing() const { return (hi - lo) / static_cast<double>(samples_per_axis - 1); }
    double node(long i) const { return lo + spacing() * static_cast<double>(i); }
};

GridFunction sample(const std::function<double(const Point&)>& f, double lo, double hi, long n, int dim = 1);

// Trapezoid l_p norm of a - b; p = INFINITY gives the max. The relative variant divides
// by the same norm of a.
double lp_error(const GridFunction& a, const GridFunction& b, double p, bool relative = false);

// Least-squares slope of log ys against xs.
double fit_rate(const std::vector<double>& xs, const std::vector<double>& ys);

// SplitMix64 evaluated at a counter: draw k of stream s is mix(seed + gamma (s 2^32 + k + 1)).
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}
    std::uint64_t next();
    // 53-bit uniform on [0, 1).
    double uniform();
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_, stream_, counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

struct ExperimentConfig {
    std::vector<std::string> families{"gaussian", "multiquadric"};
    std::vector<double> gaussian_alpha{0.5, 0.4, 0.3, 0.2};
    std::vector<double> multiquadric_alpha{-1.5, -3.5, -5.5, -7.5};
    std::vector<long> N{10, 20, 30, 40, 50};
    wavelet::NuProfile nu = wavelet::NuProfile::Linear;
    double lo = -6.0;
    double hi = 6.0;
    long grid_points = 4801;
    std::uint64_t seed = 1;
    nterm::CostConvention convention = nterm::CostConvention::Definition;
    double s = 1.0;
    double p = 2.0;
    long N0 = 1;
    std::vector<double> sweep_alpha{0.5, 0.4, 0.3, 0.2};
    long sweep_N = 50;
    std::vector<long> sparse_N{100, 200, 300, 400};
    long trials = 10;
    int terms = 5;
    double sparse_alpha = 0.2;
    double random_lo = -2.0;
    double random_hi = 24.0;
    std::vector<double> interp_h{0.25, 0.125, 0.0625};
    double interp_p = 2.0;

    void validate() const;
    // key=value; UsageError for unknown keys, ParseError for malformed values.
    void set(const std::string& key, const std::string& value);
    // "# key=value" lines for every key.
    std::string header() const;
    nterm::SmoothnessParams smoothness() const { return {s, p, 1}; }
};

// Flat key=value text; blank lines and lines starting with '#' are skipped.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

kernels::KernelSpec family_kernel(const std::string& family, double alpha);

// Rows "family,alpha,N,L1_rel,Linf_rel" against the Meyer wavelet.
std::string run_wavelet_table(const ExperimentConfig& cfg);
// Rows "alpha,N,L1_rel,log_L1_rel" for the Gaussian at N = sweep_N.
std::string run_parameter_sweep(const ExperimentConfig& cfg);

struct SparseRow {
    std::string part; // fixed, random, summary
    long trial = 0;
    long N = 0;
    double linf_error = 0.0;
    double std_error = 0.0;
    std::vector<double> costs;
    std::vector<long> budgets;
};

// Random disjoint expansion for one trial: distinct shifts in 1..20, dilation
// exponents floor(U(0,5)) clipped to 0..4, coefficients U(0,10).
wavelet::SparseExpansion random_expansion(std::uint64_t seed, long trial, int terms);
std::vector<SparseRow> sparse_rows(const ExperimentConfig& cfg);
// Rows "part,trial,N,linf_error,std_error,costs,budgets"; vectors are ';' separated.
std::string run_sparse_experiments(const ExperimentConfig& cfg);

// Rows "family,alpha,h,p,error,fitted_slope" for the rational bump (k = 3, kappa = 4),
// one block per family (Gaussian alpha 0.5, multiquadric decay exponent 1.5).
std::string run_interp_rates(const ExperimentConfig& cfg);

std::string experiment_filename(const std::string& experiment, std::uint64_t seed);

// %.12g
std::string fmt(double v);

} // namespace kterm::harness
