#pragma once

#include "kterm/point.hpp"

#include <array>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace kterm::wavelet {

enum class NuProfile { Linear, Quartic };

// Band radius of the Meyer wavelet: supp psi^ = {2pi/3 <= |xi| <= 8pi/3}.
inline constexpr double kBandRadius = 8 * std::numbers::pi / 3;
// Frequencies where psi^ is only piecewise smooth.
std::vector<double> seams();

double nu(double x, NuProfile p);

std::complex<double> meyer_hat(double xi, NuProfile p = NuProfile::Linear);
// Closed-form Meyer wavelet for the linear profile.
double meyer_time(double x);
// (1/2pi) int psi^(xi) e^{i xi x} dxi by quadrature, any profile.
double meyer_time_numeric(double x, NuProfile p = NuProfile::Linear);
double meyer(double x, NuProfile p);

struct DyadicCube {
    int m = 0;
    std::array<long, 2> n{0, 0};
    int dim = 1;

    double side() const;
    Point corner() const;
    double volume() const;
    bool interiors_overlap(const DyadicCube& o) const;
};

DyadicCube cube(int m, long n);
DyadicCube cube(int m, long n1, long n2);

double psi_I(const Point& x, const DyadicCube& I, NuProfile p = NuProfile::Linear);

struct Term {
    DyadicCube cube;
    double coeff;
};

struct SparseExpansion {
    std::vector<Term> terms;
    bool disjoint = false;

    int dim() const { return terms.empty() ? 1 : terms.front().cube.dim; }
    // Verifies finiteness, dimensions, and pairwise disjointness when flagged.
    void validate() const;
};

SparseExpansion make_expansion(std::vector<Term> terms, bool disjoint);

double synthesize(const SparseExpansion& e, const Point& x, NuProfile p = NuProfile::Linear);

// CSV rows "m,n,coeff" (d=1) or "m,n1,n2,coeff" (d=2) with a "# disjoint=true" header.
std::string to_csv(const SparseExpansion& e);
SparseExpansion parse_csv(const std::string& text);

} // namespace kterm::wavelet
