#pragma once

#include "kterm/approx.hpp"
#include "kterm/kernels.hpp"
#include "kterm/wavelet.hpp"

#include <string>
#include <vector>

namespace kterm::nterm {

// 1/tau = 1/p + s/d, 1/q = 1 + s/d.
struct SmoothnessParams {
    double s = 1.0;
    double p = 2.0;
    int d = 1;

    double tau() const { return 1.0 / (1.0 / p + s / d); }
    double q() const { return 1.0 / (1.0 + s / d); }
    void validate() const;
};

enum class CostConvention { Definition, SectionEight };

const char* convention_name(CostConvention c);
CostConvention parse_convention(const std::string& s);

struct BudgetEntry {
    wavelet::DyadicCube cube;
    double coeff = 0.0;
    double cost = 0.0;
    long budget = 0;
};

struct BudgetPlan {
    std::vector<BudgetEntry> entries;
    long N = 0;
    long N0 = 1;

    long total_budget() const;
    // Rows "m,n,coeff,cost,budget" ("m,n1,n2,..." in d = 2).
    std::string to_csv() const;
};

// (sum_j |a_j|^tau |I_j|^{tau/p})^{1/tau} for a disjoint expansion.
double tl_seminorm_disjoint(const wavelet::SparseExpansion& e, const SmoothnessParams& sp);
// |I|^{-s/d} |a|
double partial_max_sup(const wavelet::DyadicCube& cube, double coeff, const SmoothnessParams& sp);

// Cube weights |a|^tau |I|^{tau/p}.
std::vector<double> cost_weights(const wavelet::SparseExpansion& e, const SmoothnessParams& sp);
std::vector<double> costs(const wavelet::SparseExpansion& e, const SmoothnessParams& sp, long N,
                          CostConvention conv = CostConvention::Definition);
// floor(c) where floor(c) >= N0, else 0.
std::vector<long> budgets(const std::vector<double>& costs, long N0 = 1);
BudgetPlan plan(const wavelet::SparseExpansion& e, const SmoothnessParams& sp, long N,
                CostConvention conv = CostConvention::Definition, long N0 = 1);

// S_{f,N} = sum_I f_I T_{N_I} psi_I, materialized into explicit atoms. Cubes with
// a budget below the band floor of the mother wavelet contribute nothing.
approx::NTermApproximant assemble(const BudgetPlan& plan, const kernels::KernelSpec& k,
                                  wavelet::NuProfile nu = wavelet::NuProfile::Linear);
// Budget floor below which T_N psi violates the band condition.
long min_useful_budget(int dim);

// Fixed seven-term expansion a_i psi(2^{j_i}(x - k_i)), k_i = -3..3.
wavelet::SparseExpansion fixed_expansion();

} // namespace kterm::nterm
