#pragma once

#include "kterm/kernels.hpp"
#include "kterm/point.hpp"
#include "kterm/specfun.hpp"
#include "kterm/wavelet.hpp"

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kterm::approx {

using kernels::KernelSpec;

// Band-limited function f with supp f^ inside the box [-R, R]^d.
// In d = 2 the transform is a tensor product of the per-axis factors.
struct BandFunction {
    int dim = 1;
    double band_radius = 0.0;
    std::vector<std::function<std::complex<double>(double)>> factors; // one per axis
    std::vector<double> seams;                                          // per-axis break frequencies
    std::function<double(const Point&)> time;                          // optional closed form

    std::complex<double> hat(const Point& xi) const;
    bool has_time() const { return static_cast<bool>(time); }
    double eval(const Point& x) const;
};

BandFunction meyer_band(wavelet::NuProfile p = wavelet::NuProfile::Linear, int dim = 1);
// Band function of psi_I(x) = psi((x - c(I)) / l(I)).
BandFunction wavelet_band(const wavelet::DyadicCube& I, wavelet::NuProfile p = wavelet::NuProfile::Linear);

// f_phi(t) = (1/2pi)^d int_B f^(xi) / phi^(xi) e^{i<t,xi>} dxi.
double f_phi_sample(const BandFunction& f, const KernelSpec& k, const Point& t,
                    const specfun::QuadratureSpec& q = {});

// Memoized f_phi samples keyed by the exact bits of t. Thread safe.
// In d = 1 (and for the d = 2 Gaussian product) samples come from a fixed
// Gauss-Legendre node table resolving e^{i xi t} for |t| <= t_max; the table
// grows on demand. Call reserve before sampling in parallel.
class FPhi {
public:
    FPhi(BandFunction f, KernelSpec k, specfun::QuadratureSpec q = {});
    double operator()(const Point& t) const;
    void reserve(double t_max) const;
    bool tabulated() const;
    // f_phi on origin + spacing j, |j|_inf <= radius, row-major (last axis fastest).
    std::vector<double> lattice(const Point& origin, double spacing, long radius) const;
    // (1/2pi)^d int |f^ / phi^|, a bound for sup |f_phi|.
    double sup_bound() const;
    const BandFunction& band() const { return f_; }
    const KernelSpec& kernel() const { return k_; }

private:
    BandFunction f_;
    KernelSpec k_;
    specfun::QuadratureSpec q_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<std::uint64_t, std::uint64_t>, double> cache_;
    mutable std::optional<double> sup_;
    struct Table;
    mutable std::vector<std::shared_ptr<const Table>> tables_; // per axis
    std::shared_ptr<const Table> table(int axis, double t) const;
    std::vector<double> axis_lattice(int axis, double origin, double spacing, long radius) const;
};

struct Atom {
    double weight = 0.0;
    Point center;
    double scale = 1.0; // evaluates weight * phi((x - center) / scale)
    KernelSpec kernel;
};

struct NTermApproximant {
    int dim = 1;
    long budget = 0;
    std::vector<Atom> atoms;
    std::optional<wavelet::DyadicCube> affine; // pending x -> (x - c(I)) / l(I)
};

// Sum over j in Z^d of f_phi(h j) phi(x - h j), truncated once the certified tail is below tail_tol.
double t_sharp(const FPhi& fp, double h, const Point& x, double tail_tol = 1e-10);
double t_sharp(const BandFunction& f, const KernelSpec& k, double h, const Point& x, double tail_tol = 1e-10);
// Lattice radius used by t_sharp at x.
long t_sharp_radius(const FPhi& fp, double h, const Point& x, double tail_tol = 1e-10);

// Same sum restricted to |j|_inf <= h^{-2}.
double t_flat(const FPhi& fp, double h, const Point& x);
double t_flat(const BandFunction& f, const KernelSpec& k, double h, const Point& x);
long flat_radius(double h);

// Frequency-domain aliasing term
// (1/2pi)^d int f^(xi) e^{i<xi,x>} sum_{j != 0} phi^(xi + 2pi j/h) / phi^(xi) e^{i<x, 2pi j/h>} dxi.
// h^d t_sharp f(x) = f(x) + aliasing_integral(x).
double aliasing_integral(const BandFunction& f, const KernelSpec& k, double h, const Point& x);

// Atoms origin + spacing j, |j|_inf <= radius, weights spacing^d f_phi(origin + spacing j).
NTermApproximant sample_on_lattice(const FPhi& fp, const Point& origin, double spacing, long radius);

// T_N f: h = N^{-1/(2d)}, |j|_inf <= h^{-2}, weights h^d f_phi(h j). BandViolation if h >= pi / R.
NTermApproximant t_n(const BandFunction& f, const KernelSpec& k, long N, const specfun::QuadratureSpec& q = {});
NTermApproximant t_n(const FPhi& fp, long N);
double t_n_spacing(long N, int dim);
// Smallest N whose T_N spacing satisfies the band condition for radius R.
long band_floor(double R, int dim);

NTermApproximant affine_image(const NTermApproximant& a, const wavelet::DyadicCube& I);
// Folds a pending affine map into atom centers and scales.
NTermApproximant materialize(const NTermApproximant& a);
// Folds scales into kernel parameters where the family is dilation closed.
NTermApproximant to_kernel_form(const NTermApproximant& a);

double eval_approximant(const NTermApproximant& a, const Point& x);

// Rows "weight,center,family,alpha,c" (center1,center2 in d=2; a scale column
// is added when some atom cannot be folded into kernel parameters).
std::string to_csv(const NTermApproximant& a);

} // namespace kterm::approx
