#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace kterm::specfun {

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;

    void validate() const;
};

struct Interval {
    double lo;
    double hi;
};

template <class T>
struct QuadResult {
    T value{};
    double error = 0.0;
    int subdivisions = 0;
};

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<std::complex<double>(double)>;

// Global adaptive Gauss-Kronrod (7/15) integration. `breaks` are the initial
// panel boundaries (sorted, at least two). Throws NonConvergence.
QuadResult<double> integrate_detail(const RealFn& f, const std::vector<double>& breaks,
                                    const QuadratureSpec& spec = {});
QuadResult<std::complex<double>> integrate_complex_detail(const ComplexFn& f,
                                                          const std::vector<double>& breaks,
                                                          const QuadratureSpec& spec = {});

double integrate(const RealFn& f, Interval domain, const QuadratureSpec& spec = {});
double integrate(const RealFn& f, const std::vector<double>& breaks, const QuadratureSpec& spec = {});
std::complex<double> integrate_complex(const ComplexFn& f, const std::vector<double>& breaks,
                                       const QuadratureSpec& spec = {});

// Integral over [a, inf) through x = a + t/(1-t).
double integrate_semi_infinite(const RealFn& f, double a, const QuadratureSpec& spec = {});

// K_nu(r) = int_0^inf exp(-r cosh t) cosh(nu t) dt, r > 0.
double bessel_k(double nu, double r);
// log K_nu(r); stays finite where K_nu over- or underflows.
double log_bessel_k(double nu, double r);

// 16-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre16 {
    double x[16];
    double w[16];
    GaussLegendre16();
};
const GaussLegendre16& gauss_legendre16();

std::uint64_t binomial(int n, int k);

// Centered divided difference of order 2n:
// (1/(2n)!) sum_{j=-n}^{n} (-1)^{j+n} C(2n, j+n) f(x+j). Requires 1 <= n <= 20.
double divided_difference(const RealFn& f, int n, double x);

} // namespace kterm::specfun
