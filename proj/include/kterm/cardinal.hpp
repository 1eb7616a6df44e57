#pragma once

#include "kterm/kernels.hpp"

#include <vector>

namespace kterm::kernels {

// Periodization P(xi) = sum_j phi^(xi - 2 pi j) of a univariate base transform,
// truncated with a certified relative tail. Gaussian and inverse multiquadric
// bases are summed in frequency; Matern bases through the Poisson dual
// sum_k phi(k) e^{-i xi k}, whose terms decay exponentially.
class Periodizer {
public:
    explicit Periodizer(const KernelSpec& base, double rel_tail = 1e-13);

    double log_sum(double xi) const;
    // log of the cardinal quotient phi^(xi) / P(xi).
    double log_lhat(double xi) const;
    // Number of retained terms on each side.
    int terms() const { return J_; }
    bool poisson() const { return poisson_; }

private:
    KernelSpec base_;
    bool poisson_ = false;
    int J_ = 0;
    std::vector<double> phik_;
};

// Time-domain cardinal function L on the integer lattice for a 1D base kernel:
// L(t) = (1/pi) int_0^Xi Lhat(xi) cos(xi t) dxi, with Xi = (2J+1) pi and the
// truncation J chosen from the certified transform tail. Nodes are fixed
// composite 16-point Gauss-Legendre panels, adaptively refined where Lhat
// turns steeply and no wider than needed to resolve cos(xi t) for |t| <= t_max.
class CardinalFunction {
public:
    CardinalFunction(const KernelSpec& base, double t_max, double tol = 1e-13);

    double value(double t) const;
    // values[i] = L((i0 + i) / M), i = 0..count-1.
    std::vector<double> tabulate(long i0, long count, int M) const;
    // values[i] = L(t0 + i step).
    std::vector<double> progression(double t0, double step, long count) const;
    // ||L||_2 by Parseval.
    double l2_norm() const;
    // Upper bound for sup |L| = (1/pi) int_0^inf Lhat.
    double sup_bound() const;

    double t_max() const { return t_max_; }
    int truncation() const { return J_; }
    double xi_max() const { return xi_max_; }
    size_t node_count() const { return nodes_.size(); }
    const KernelSpec& base() const { return base_; }

private:
    KernelSpec base_;
    Periodizer per_;
    double t_max_;
    int J_;
    double xi_max_;
    double tail_;
    std::vector<double> nodes_;
    std::vector<double> weights_; // Lhat(xi_n) w_n / pi
    std::vector<double> lhat_;
    std::vector<double> qw_;
};

} // namespace kterm::kernels
