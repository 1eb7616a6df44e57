#pragma once

#include "kterm/point.hpp"

#include <memory>
#include <string>
#include <utility>

namespace kterm::kernels {

enum class Family { Gaussian, InverseMultiquadric, Matern, Power, DividedDiffMultiquadric, Cardinal };

const char* family_name(Family f);
Family parse_family(const std::string& s);

struct KernelSpec {
    Family family = Family::Gaussian;
    double alpha = 1.0;
    double c = 1.0;
    int dim = 1;
    std::shared_ptr<const KernelSpec> base; // Cardinal only
    double lattice_scale = 1.0;             // Cardinal only

    void validate() const;
    std::string describe() const;
};

KernelSpec gaussian(double alpha, int dim = 1);
// (|x|^2 + c^2)^{-|alpha|}; the sign of alpha is a labelling convention only.
KernelSpec inverse_multiquadric(double alpha, double c = 1.0, int dim = 1);
KernelSpec matern(double alpha, double c = 1.0, int dim = 1);
KernelSpec power(double alpha);
KernelSpec dd_multiquadric(int alpha, double c = 1.0);
KernelSpec cardinal(const KernelSpec& base, double lattice_scale = 1.0);

// Decay exponent of the inverse multiquadric.
inline double imq_beta(const KernelSpec& k) { return k.alpha < 0 ? -k.alpha : k.alpha; }

double eval(const KernelSpec& k, const Point& x);
// Radial profile phi(r), r = |x|, for every family except Cardinal.
double eval_radial(const KernelSpec& k, double r);

double eval_ft(const KernelSpec& k, const Point& xi);
// log |phi^(xi)|; -inf where the transform vanishes, +inf at a singularity.
double log_abs_ft(const KernelSpec& k, const Point& xi);

// Cardinal quotient with the periodization truncated to |j|_inf <= J.
double eval_cardinal_ft(const KernelSpec& base, const Point& xi, int J);
// Same quotient with J chosen so the certified tail is below rel_tail.
double eval_cardinal_ft(const KernelSpec& base, const Point& xi);
// log of the cardinal quotient (adaptive J).
double log_cardinal_ft(const KernelSpec& base, const Point& xi);
// Terms kept per side by the certified periodization (frequency shifts for
// Gaussian and inverse multiquadric bases, Poisson-dual samples for Matern)
// so that the tail is below rel_tail of the sum. Throws TailError when the
// family has no certified tail.
int cardinal_truncation(const KernelSpec& base, double rel_tail = 1e-12);

// Upper bound for int_{a}^{inf} phi^(u) du along one axis (1D transform), a > 0.
double ft_tail_integral(const KernelSpec& k, double a);

// Integral of |phi| over {|y| >= a} in R^d, for radially decreasing kernels.
// Throws TailNotCertifiable otherwise.
double radial_tail_integral(const KernelSpec& k, double a);

struct AliasingQuery {
    KernelSpec kernel;
    double h;
    Point j;
    double band_radius;
};

double aliasing_ratio(const AliasingQuery& q, const Point& xi);

// Sum over 0 < |j|_inf <= j_max of the grid maximum of the aliasing ratio on the band,
// with one nested refinement and a Richardson step. An estimate, not a certified bound.
double g_alpha(const KernelSpec& k, double h, double band_radius, int j_max, int xi_grid = 1024);

// (g of the cardinal kernel, g^phi(h) (1 + g^phi(1))).
std::pair<double, double> cardinal_g_bound_check(const KernelSpec& base, double h, double band_radius,
                                                 int j_max = 20, int xi_grid = 1024);

// phi(y / s) = factor * phi'(y) for dilation-closed families.
struct Dilated {
    bool closed = false;
    KernelSpec kernel;
    double factor = 1.0;
};
Dilated dilate(const KernelSpec& k, double s);

} // namespace kterm::kernels
