#include "kterm/approx.hpp"

#include "kterm/error.hpp"
#include "kterm/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace kterm::approx {

using std::numbers::pi;
using cd = std::complex<double>;

namespace {

std::vector<double> axis_breaks(const BandFunction& f) {
    const double R = f.band_radius;
    std::vector<double> b{-R, 0.0, R};
    for (double s : f.seams)
        if (s > -R && s < R) b.push_back(s);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end(), [](double x, double y) { return std::fabs(x - y) < 1e-14; }), b.end());
    return b;
}

// 1 / phi^(xi) with sign, computed from the log transform.
double inv_ft(const KernelSpec& k, const Point& xi) {
    const double l = kernels::log_abs_ft(k, xi);
    if (l == INFINITY) return 0.0;
    if (l == -INFINITY) fail(ErrorCode::QuadratureFailure, "kernel transform vanishes inside the band");
    double sign = 1.0;
    if (k.family == kernels::Family::Power) sign = kernels::eval_ft(k, Point(1.0)) < 0 ? -1.0 : 1.0;
    return sign * std::exp(-l);
}

void check_dims(const BandFunction& f, const KernelSpec& k) {
    if (f.dim != k.dim) fail(ErrorCode::ShapeMismatch, "band function and kernel dimensions differ");
    if (static_cast<int>(f.factors.size()) != f.dim) fail(ErrorCode::InvalidArgument, "band function needs one factor per axis");
}

double real_checked(cd v) {
    if (std::fabs(v.imag()) > 1e-8 * (1 + std::fabs(v.real())))
        fail(ErrorCode::SymmetryViolation, "imaginary residue " + std::to_string(v.imag()) + " exceeds tolerance");
    return v.real();
}

cd quad_complex(const std::function<cd(double)>& g, const std::vector<double>& br, const specfun::QuadratureSpec& q) {
    try {
        return specfun::integrate_complex(g, br, q);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NonConvergence) fail(ErrorCode::QuadratureFailure, e.detail());
        throw;
    }
}

KernelSpec axis_gaussian(const KernelSpec& k) {
    KernelSpec g = k;
    g.dim = 1;
    return g;
}

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v); }

} // namespace

std::complex<double> BandFunction::hat(const Point& xi) const {
    cd v = 1.0;
    for (int i = 0; i < dim; ++i) {
        v *= factors[i](xi[i]);
        if (v == cd(0.0)) return v;
    }
    return v;
}

double BandFunction::eval(const Point& x) const {
    if (time) return time(x);
    const std::vector<double> br = axis_breaks(*this);
    double v = 1.0;
    for (int i = 0; i < dim; ++i) {
        const auto& fi = factors[i];
        const double xi = x[i];
        v *= real_checked(quad_complex([&](double w) { return fi(w) * std::polar(1.0, w * xi); }, br, {}) / (2 * pi));
    }
    return v;
}

BandFunction meyer_band(wavelet::NuProfile p, int dim) {
    if (dim < 1 || dim > 2) fail(ErrorCode::UnsupportedDim, "only d = 1 and d = 2 are supported");
    BandFunction f;
    f.dim = dim;
    f.band_radius = wavelet::kBandRadius;
    for (int i = 0; i < dim; ++i) f.factors.push_back([p](double xi) { return wavelet::meyer_hat(xi, p); });
    f.seams = wavelet::seams();
    f.time = [p, dim](const Point& x) {
        double v = 1.0;
        for (int i = 0; i < dim; ++i) v *= wavelet::meyer(x[i], p);
        return v;
    };
    return f;
}

BandFunction wavelet_band(const wavelet::DyadicCube& I, wavelet::NuProfile p) {
    BandFunction f;
    f.dim = I.dim;
    const double l = I.side();
    const Point c = I.corner();
    f.band_radius = wavelet::kBandRadius / l;
    for (int i = 0; i < I.dim; ++i) {
        const double ci = c[i];
        f.factors.push_back([p, l, ci](double xi) { return l * std::polar(1.0, -xi * ci) * wavelet::meyer_hat(l * xi, p); });
    }
    for (double s : wavelet::seams()) f.seams.push_back(s / l);
    f.time = [I, p](const Point& x) { return wavelet::psi_I(x, I, p); };
    return f;
}

double f_phi_sample(const BandFunction& f, const KernelSpec& k, const Point& t, const specfun::QuadratureSpec& q) {
    check_dims(f, k);
    const std::vector<double> br = axis_breaks(f);
    if (f.dim == 1) {
        const auto& f0 = f.factors[0];
        auto g = [&](double xi) -> cd {
            const cd h = f0(xi);
            if (h == cd(0.0)) return 0.0;
            return h * inv_ft(k, Point(xi)) * std::polar(1.0, xi * t[0]);
        };
        return real_checked(quad_complex(g, br, q) / (2 * pi));
    }
    if (k.family == kernels::Family::Gaussian) {
        const KernelSpec g1 = axis_gaussian(k);
        double v = 1.0;
        for (int i = 0; i < 2; ++i) {
            BandFunction fi;
            fi.dim = 1;
            fi.band_radius = f.band_radius;
            fi.factors = {f.factors[i]};
            fi.seams = f.seams;
            v *= f_phi_sample(fi, g1, Point(t[i]), q);
        }
        return v;
    }
    // General kernel in d = 2: iterated quadrature over the box band.
    specfun::QuadratureSpec inner = q;
    inner.abs_tol = std::max(q.abs_tol, 1e-13);
    auto outer = [&](double x1) -> cd {
        const cd h1 = f.factors[0](x1);
        if (h1 == cd(0.0)) return 0.0;
        auto g = [&](double x2) -> cd {
            const cd h2 = f.factors[1](x2);
            if (h2 == cd(0.0)) return 0.0;
            return h2 * inv_ft(k, Point(x1, x2)) * std::polar(1.0, x2 * t[1]);
        };
        return h1 * quad_complex(g, br, inner) * std::polar(1.0, x1 * t[0]);
    };
    return real_checked(quad_complex(outer, br, q) / (4 * pi * pi));
}

struct FPhi::Table {
    double t_max = 0.0;
    std::vector<double> xi;
    std::vector<cd> w; // quadrature weight * f^/phi^ / 2pi
};

FPhi::FPhi(BandFunction f, KernelSpec k, specfun::QuadratureSpec q) : f_(std::move(f)), k_(std::move(k)), q_(q) {
    check_dims(f_, k_);
    k_.validate();
}

bool FPhi::tabulated() const { return f_.dim == 1 || k_.family == kernels::Family::Gaussian; }

std::shared_ptr<const FPhi::Table> FPhi::table(int axis, double t) const {
    std::lock_guard<std::mutex> lk(mu_);
    if (tables_.empty()) tables_.resize(f_.dim);
    auto& cur = tables_[axis];
    if (cur && std::fabs(t) <= cur->t_max) return cur;
    const double t_max = std::max({16.0, 2 * std::fabs(t), cur ? 2 * cur->t_max : 0.0});
    const KernelSpec k1 = f_.dim == 1 ? k_ : axis_gaussian(k_);
    const auto& fac = f_.factors[axis];
    auto g = [&](double xi) -> cd {
        const cd hv = fac(xi);
        return hv == cd(0.0) ? cd(0.0) : hv * inv_ft(k1, Point(xi));
    };
    const auto& gl = specfun::gauss_legendre16();
    auto panel = [&](double a, double b) {
        const double c = 0.5 * (a + b), hl = 0.5 * (b - a);
        cd s = 0.0;
        for (int i = 0; i < 16; ++i) s += gl.w[i] * g(c + hl * gl.x[i]);
        return s * hl;
    };
    const std::vector<double> br = axis_breaks(f_);
    // Scale for the refinement test: the L1 norm of g over the band.
    double scale = 0.0;
    for (size_t i = 0; i + 1 < br.size(); ++i) {
        const double a = br[i], b = br[i + 1];
        const double c = 0.5 * (a + b), hl = 0.5 * (b - a);
        for (int j = 0; j < 16; ++j) scale += gl.w[j] * hl * std::abs(g(c + hl * gl.x[j]));
    }
    // Refine on the smoothness of g alone, then split accepted panels to resolve e^{i xi t}.
    std::vector<std::pair<double, double>> panels;
    std::function<void(double, double, cd, int)> refine = [&](double a, double b, cd whole, int depth) {
        const double m = 0.5 * (a + b);
        const cd l = panel(a, m), r = panel(m, b);
        if (depth < 20 && std::abs(l + r - whole) > 1e-14 * scale * (b - a) + 1e-300) {
            refine(a, m, l, depth + 1);
            refine(m, b, r, depth + 1);
            return;
        }
        panels.emplace_back(a, m);
        panels.emplace_back(m, b);
    };
    for (size_t i = 0; i + 1 < br.size(); ++i) {
        const double a = br[i], b = br[i + 1];
        const int n = static_cast<int>(std::ceil((b - a) / 0.2));
        for (int p = 0; p < n; ++p) {
            const double pa = a + (b - a) * p / n, pb = a + (b - a) * (p + 1) / n;
            refine(pa, pb, panel(pa, pb), 0);
        }
    }
    const double w_max = 6.0 / t_max;
    auto tab = std::make_shared<Table>();
    tab->t_max = t_max;
    for (auto [a, b] : panels) {
        const int n = std::max(1, static_cast<int>(std::ceil((b - a) / w_max)));
        for (int p = 0; p < n; ++p) {
            const double pa = a + (b - a) * p / n, pb = a + (b - a) * (p + 1) / n;
            const double c = 0.5 * (pa + pb), hl = 0.5 * (pb - pa);
            for (int i = 0; i < 16; ++i) {
                const double xi = c + hl * gl.x[i];
                const cd gv = g(xi);
                if (gv == cd(0.0)) continue;
                tab->xi.push_back(xi);
                tab->w.push_back(gv * (gl.w[i] * hl / (2 * pi)));
            }
        }
    }
    cur = tab;
    return cur;
}

void FPhi::reserve(double t_max) const {
    if (!tabulated()) return;
    for (int a = 0; a < f_.dim; ++a) table(a, t_max);
}

double FPhi::operator()(const Point& t) const {
    const auto key = std::make_pair(bits(t[0]), f_.dim == 2 ? bits(t[1]) : 0);
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    double v = 1.0;
    if (tabulated()) {
        for (int a = 0; a < f_.dim; ++a) {
            const auto tab = table(a, t[a]);
            cd s = 0.0;
            for (size_t i = 0; i < tab->xi.size(); ++i) s += tab->w[i] * std::polar(1.0, tab->xi[i] * t[a]);
            v *= real_checked(s);
        }
    } else {
        specfun::QuadratureSpec q = q_;
        q.abs_tol = std::max(q.abs_tol, 1e-13 * 4 * pi * pi * sup_bound());
        v = f_phi_sample(f_, k_, t, q);
    }
    std::lock_guard<std::mutex> lk(mu_);
    cache_.emplace(key, v);
    return v;
}

std::vector<double> FPhi::axis_lattice(int axis, double origin, double spacing, long radius) const {
    const auto tab = table(axis, std::fabs(origin) + spacing * radius);
    const long n = 2 * radius + 1;
    std::vector<double> out(n);
    const long block = 256;
    const size_t m = tab->xi.size();
    parallel_for(static_cast<size_t>((n + block - 1) / block), [&](size_t b) {
        const long j0 = static_cast<long>(b) * block, j1 = std::min(n, j0 + block);
        std::vector<double> zr(m), zi(m), rr(m), ri(m);
        for (size_t i = 0; i < m; ++i) {
            const cd z = tab->w[i] * std::polar(1.0, tab->xi[i] * (origin + spacing * (j0 - radius)));
            zr[i] = z.real();
            zi[i] = z.imag();
            rr[i] = std::cos(tab->xi[i] * spacing);
            ri[i] = std::sin(tab->xi[i] * spacing);
        }
        for (long j = j0; j < j1; ++j) {
            double sr = 0.0, si = 0.0;
            for (size_t i = 0; i < m; ++i) {
                sr += zr[i];
                si += zi[i];
                const double t = zr[i] * rr[i] - zi[i] * ri[i];
                zi[i] = zr[i] * ri[i] + zi[i] * rr[i];
                zr[i] = t;
            }
            const cd s(sr, si);
            out[j] = real_checked(s);
        }
    });
    return out;
}

std::vector<double> FPhi::lattice(const Point& origin, double spacing, long radius) const {
    const long n = 2 * radius + 1;
    if (!tabulated()) {
        std::vector<Point> pts;
        for (long a = -radius; a <= radius; ++a)
            for (long b = -radius; b <= radius; ++b) pts.emplace_back(origin[0] + spacing * a, origin[1] + spacing * b);
        std::vector<double> out(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) { out[i] = (*this)(pts[i]); });
        return out;
    }
    std::vector<double> v = axis_lattice(0, origin[0], spacing, radius);
    if (f_.dim == 1) return v;
    const std::vector<double> u = axis_lattice(1, origin[1], spacing, radius);
    std::vector<double> out(n * n);
    for (long a = 0; a < n; ++a)
        for (long b = 0; b < n; ++b) out[a * n + b] = v[a] * u[b];
    return out;
}

double FPhi::sup_bound() const {
    {
        std::lock_guard<std::mutex> lk(mu_);
        if (sup_) return *sup_;
    }
    const std::vector<double> br = axis_breaks(f_);
    specfun::QuadratureSpec q{1e-12, 1e-8, 4000};
    double v = 0.0;
    if (f_.dim == 1) {
        v = specfun::integrate([&](double xi) {
                const double h = std::abs(f_.factors[0](xi));
                return h == 0.0 ? 0.0 : h * std::fabs(inv_ft(k_, Point(xi)));
            }, br, q) / (2 * pi);
    } else if (k_.family == kernels::Family::Gaussian) {
        const KernelSpec g1 = axis_gaussian(k_);
        v = 1.0;
        for (int i = 0; i < 2; ++i)
            v *= specfun::integrate([&](double xi) {
                     const double h = std::abs(f_.factors[i](xi));
                     return h == 0.0 ? 0.0 : h * std::fabs(inv_ft(g1, Point(xi)));
                 }, br, q) / (2 * pi);
    } else {
        v = specfun::integrate([&](double x1) {
                const double h1 = std::abs(f_.factors[0](x1));
                if (h1 == 0.0) return 0.0;
                return h1 * specfun::integrate([&](double x2) {
                           const double h2 = std::abs(f_.factors[1](x2));
                           return h2 == 0.0 ? 0.0 : h2 * std::fabs(inv_ft(k_, Point(x1, x2)));
                       }, br, q);
            }, br, q) / (4 * pi * pi);
    }
    v *= 1 + 1e-6;
    std::lock_guard<std::mutex> lk(mu_);
    sup_ = v;
    return v;
}

namespace {

std::vector<Point> lattice_points(int dim, const Point& origin, double spacing, long radius) {
    std::vector<Point> pts;
    if (dim == 1) {
        for (long j = -radius; j <= radius; ++j) pts.emplace_back(origin[0] + spacing * j);
    } else {
        for (long a = -radius; a <= radius; ++a)
            for (long b = -radius; b <= radius; ++b) pts.emplace_back(origin[0] + spacing * a, origin[1] + spacing * b);
    }
    return pts;
}

double lattice_sum(const FPhi& fp, double h, const Point& x, long radius) {
    const int d = fp.band().dim;
    Point origin = d == 1 ? Point(0.0) : Point(0.0, 0.0);
    const std::vector<Point> pts = lattice_points(d, origin, h, radius);
    const std::vector<double> w = fp.lattice(origin, h, radius);
    double s = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) s += w[i] * kernels::eval(fp.kernel(), x - pts[i]);
    return s;
}

void check_band(double h, double R) {
    if (!(h > 0)) fail(ErrorCode::InvalidArgument, "lattice spacing must be positive");
    if (!(h < pi / R))
        fail(ErrorCode::BandViolation, "spacing " + std::to_string(h) + " violates h < pi/R = " + std::to_string(pi / R));
}

} // namespace

long t_sharp_radius(const FPhi& fp, double h, const Point& x, double tail_tol) {
    check_band(h, fp.band().band_radius);
    if (!(tail_tol > 0)) fail(ErrorCode::InvalidArgument, "tail_tol must be positive");
    const int d = fp.band().dim;
    const double F = fp.sup_bound();
    const double xn = x.norm();
    long J = std::max<long>(1, static_cast<long>(std::ceil(x.norm_inf() / h)) + 1);
    for (;;) {
        const double a = h * (J + 1) - xn - h * std::sqrt(static_cast<double>(d));
        if (a > 0) {
            const double bound = F * std::pow(h, -d) * kernels::radial_tail_integral(fp.kernel(), a);
            if (bound <= tail_tol) return J;
        }
        if (J > 2000000)
            fail(ErrorCode::TailNotCertifiable, "lattice tail radius exceeds 2e6 for " + fp.kernel().describe());
        J = J + std::max<long>(1, J / 4);
    }
}

double t_sharp(const FPhi& fp, double h, const Point& x, double tail_tol) {
    const long J = t_sharp_radius(fp, h, x, tail_tol);
    return lattice_sum(fp, h, x, J);
}

double t_sharp(const BandFunction& f, const KernelSpec& k, double h, const Point& x, double tail_tol) {
    FPhi fp(f, k);
    return t_sharp(fp, h, x, tail_tol);
}

long flat_radius(double h) { return static_cast<long>(std::floor(1.0 / (h * h) + 1e-9)); }

double t_flat(const FPhi& fp, double h, const Point& x) {
    check_band(h, fp.band().band_radius);
    return lattice_sum(fp, h, x, flat_radius(h));
}

double t_flat(const BandFunction& f, const KernelSpec& k, double h, const Point& x) {
    FPhi fp(f, k);
    return t_flat(fp, h, x);
}

double aliasing_integral(const BandFunction& f, const KernelSpec& k, double h, const Point& x) {
    check_dims(f, k);
    if (f.dim != 1) fail(ErrorCode::UnsupportedDim, "aliasing_integral is implemented for d = 1");
    const double w = 2 * pi / h;
    const double x0 = x[0];
    auto sum_ratio = [&](double xi) -> cd {
        const double ld = kernels::log_abs_ft(k, Point(xi));
        if (ld == INFINITY) return 0.0;
        cd s = 0.0;
        double first = 0.0;
        for (long j = 1; j <= 200000; ++j) {
            double mx = 0.0;
            for (int sg : {1, -1}) {
                const double ln = kernels::log_abs_ft(k, Point(xi + sg * j * w));
                const double r = ln == -INFINITY ? 0.0 : std::exp(ln - ld);
                s += r * std::polar(1.0, sg * j * w * x0);
                mx = std::max(mx, r);
            }
            if (j == 1) first = mx;
            if (j >= 2 && mx <= 1e-17 * std::max(first, 1e-300)) break;
        }
        return s;
    };
    const auto& f0 = f.factors[0];
    auto g = [&](double xi) -> cd {
        const cd hv = f0(xi);
        if (hv == cd(0.0)) return 0.0;
        return hv * std::polar(1.0, xi * x0) * sum_ratio(xi);
    };
    return real_checked(quad_complex(g, axis_breaks(f), {1e-11, 1e-9, 4000}) / (2 * pi));
}

NTermApproximant sample_on_lattice(const FPhi& fp, const Point& origin, double spacing, long radius) {
    const int d = fp.band().dim;
    if (origin.dim != d) fail(ErrorCode::ShapeMismatch, "lattice origin dimension");
    const std::vector<Point> pts = lattice_points(d, origin, spacing, radius);
    const std::vector<double> w = fp.lattice(origin, spacing, radius);
    NTermApproximant a;
    a.dim = d;
    a.budget = static_cast<long>(pts.size());
    const double vol = std::pow(spacing, d);
    a.atoms.reserve(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) a.atoms.push_back(Atom{vol * w[i], pts[i], 1.0, fp.kernel()});
    return a;
}

double t_n_spacing(long N, int dim) { return std::pow(static_cast<double>(N), -1.0 / (2.0 * dim)); }

long band_floor(double R, int dim) {
    for (long N = 1;; ++N)
        if (t_n_spacing(N, dim) < pi / R) return N;
}

NTermApproximant t_n(const FPhi& fp, long N) {
    if (N < 1) fail(ErrorCode::InvalidArgument, "T_N requires N >= 1");
    const int d = fp.band().dim;
    const double h = t_n_spacing(N, d);
    check_band(h, fp.band().band_radius);
    NTermApproximant a = sample_on_lattice(fp, d == 1 ? Point(0.0) : Point(0.0, 0.0), h, flat_radius(h));
    a.budget = N;
    return a;
}

NTermApproximant t_n(const BandFunction& f, const KernelSpec& k, long N, const specfun::QuadratureSpec& q) {
    FPhi fp(f, k, q);
    return t_n(fp, N);
}

NTermApproximant affine_image(const NTermApproximant& a, const wavelet::DyadicCube& I) {
    if (a.affine) fail(ErrorCode::InvalidArgument, "approximant already carries an affine map");
    if (I.dim != a.dim) fail(ErrorCode::ShapeMismatch, "cube dimension differs from approximant");
    NTermApproximant out = a;
    out.affine = I;
    return out;
}

NTermApproximant materialize(const NTermApproximant& a) {
    if (!a.affine) return a;
    NTermApproximant out = a;
    out.affine.reset();
    const double l = a.affine->side();
    const Point c = a.affine->corner();
    for (auto& at : out.atoms) {
        at.center = c + l * at.center;
        at.scale *= l;
    }
    return out;
}

NTermApproximant to_kernel_form(const NTermApproximant& a) {
    NTermApproximant out = materialize(a);
    for (auto& at : out.atoms) {
        if (at.scale == 1.0) continue;
        const kernels::Dilated dl = kernels::dilate(at.kernel, at.scale);
        if (!dl.closed) continue;
        at.kernel = dl.kernel;
        at.weight *= dl.factor;
        at.scale = 1.0;
    }
    return out;
}

double eval_approximant(const NTermApproximant& a, const Point& x) {
    Point y = x;
    if (a.affine) y = (x - a.affine->corner()) / a.affine->side();
    double s = 0.0;
    for (const auto& at : a.atoms) {
        if (at.weight == 0.0) continue;
        const Point z = at.scale == 1.0 ? y - at.center : (y - at.center) / at.scale;
        s += at.weight * (at.kernel.family == kernels::Family::Cardinal ? kernels::eval(at.kernel, z)
                                                                         : kernels::eval_radial(at.kernel, z.norm()));
    }
    return s;
}

std::string to_csv(const NTermApproximant& a) {
    const NTermApproximant k = to_kernel_form(a);
    bool scaled = false;
    for (const auto& at : k.atoms) scaled = scaled || at.scale != 1.0;
    std::ostringstream os;
    os << "weight," << (k.dim == 1 ? "center" : "center1,center2") << (scaled ? ",scale" : "") << ",family,alpha,c\n";
    char buf[256];
    for (const auto& at : k.atoms) {
        if (k.dim == 1) std::snprintf(buf, sizeof buf, "%.12g,%.12g", at.weight, at.center[0]);
        else std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g", at.weight, at.center[0], at.center[1]);
        os << buf;
        if (scaled) {
            std::snprintf(buf, sizeof buf, ",%.12g", at.scale);
            os << buf;
        }
        std::snprintf(buf, sizeof buf, ",%s,%.12g,%.12g\n", kernels::family_name(at.kernel.family), at.kernel.alpha,
                      at.kernel.c);
        os << buf;
    }
    return os.str();
}

} // namespace kterm::approx
