#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kterm/approx.hpp"
#include "kterm/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace kterm;
using namespace kterm::approx;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidArgument;
}

double sup_error(const NTermApproximant& a, const BandFunction& f, int n = 601) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = -6.0 + 12.0 * i / (n - 1);
        e = std::max(e, std::fabs(eval_approximant(a, Point(x)) - f.eval(Point(x))));
    }
    return e;
}

} // namespace

TEST_CASE("T_N lattice layout") {
    const auto f = meyer_band();
    const auto a = t_n(f, kernels::gaussian(0.3), 25);
    CHECK(a.atoms.size() == 51);
    CHECK(t_n_spacing(25, 1) == doctest::Approx(0.2).epsilon(1e-15));
    for (size_t i = 0; i < a.atoms.size(); ++i)
        CHECK(a.atoms[i].center[0] == doctest::Approx(0.2 * (static_cast<long>(i) - 25)).epsilon(1e-14));
    CHECK(band_floor(wavelet::kBandRadius, 1) == 8);
    CHECK(code_of([&] { t_n(f, kernels::gaussian(0.3), 7); }) == ErrorCode::BandViolation);
    CHECK_NOTHROW(t_n(f, kernels::gaussian(0.3), 8));
}

TEST_CASE("Gaussian and multiquadric approximants of the Meyer wavelet") {
    const auto f = meyer_band();
    CHECK(sup_error(t_n(f, kernels::gaussian(0.2), 50), f) < 1e-4);
    CHECK(sup_error(t_n(f, kernels::inverse_multiquadric(-7.5), 50), f) <= 1e-3);
}

TEST_CASE("Gaussian alpha 0.3 error is non-increasing in N") {
    const auto f = meyer_band();
    FPhi fp(f, kernels::gaussian(0.3));
    double prev = INFINITY;
    for (long N : {10, 20, 30, 40, 50}) {
        const double e = sup_error(t_n(fp, N), f, 241);
        CHECK(e <= prev);
        prev = e;
    }
}

TEST_CASE("aliasing identity") {
    const auto f = meyer_band();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-4, 4);
    for (const auto& k : {kernels::gaussian(0.4), kernels::inverse_multiquadric(-2.5), kernels::matern(3.0)}) {
        const double h = 0.3;
        FPhi fp(f, k);
        for (int i = 0; i < 5; ++i) {
            const Point x(u(rng));
            const double lhs = f.eval(x) - h * t_sharp(fp, h, x);
            const double rhs = -aliasing_integral(f, k, h, x);
            CHECK(std::fabs(lhs - rhs) < 1e-6);
        }
    }
}

TEST_CASE("t_sharp tail radius doubling and t_flat agreement") {
    const auto f = meyer_band();
    FPhi fp(f, kernels::gaussian(0.3));
    const double h = 0.2;
    const Point x(0.7);
    const long J = t_sharp_radius(fp, h, x);
    CHECK(J <= flat_radius(h));
    CHECK(flat_radius(h) == 25);
    CHECK(std::fabs(t_flat(fp, h, x) - t_sharp(fp, h, x)) < 1e-10);
    CHECK(code_of([&] { t_sharp(f, kernels::power(1.0), h, x); }) == ErrorCode::TailNotCertifiable);
}

TEST_CASE("affine covariance") {
    const auto f = meyer_band();
    const auto k = kernels::gaussian(0.3);
    const long N = 30;
    const auto I = wavelet::cube(1, 1);
    const auto moved = affine_image(t_n(f, k, N), I);

    const auto dl = kernels::dilate(k, I.side());
    REQUIRE(dl.closed);
    FPhi fp(wavelet_band(I), dl.kernel);
    const double h = t_n_spacing(N, 1);
    const auto direct = sample_on_lattice(fp, I.corner(), I.side() * h, flat_radius(h));
    for (double x : {-3.0, 0.1, 1.7, 2.5, 3.3, 6.0}) {
        const double a = eval_approximant(moved, Point(x));
        CHECK(std::fabs(a - dl.factor * eval_approximant(direct, Point(x))) < 1e-10);
        CHECK(std::fabs(a - eval_approximant(to_kernel_form(moved), Point(x))) < 1e-12);
    }
}

TEST_CASE("dilation folding for Gaussian and inverse multiquadric") {
    NTermApproximant a;
    a.atoms.push_back(Atom{1.5, Point(0.25), 1.0, kernels::gaussian(0.7)});
    a.atoms.push_back(Atom{-0.5, Point(-1.0), 1.0, kernels::inverse_multiquadric(-1.5, 0.8)});
    const auto moved = affine_image(a, wavelet::cube(1, 0));
    const auto folded = to_kernel_form(moved);
    CHECK(folded.atoms[0].kernel.alpha == doctest::Approx(1.4));
    CHECK(folded.atoms[0].center[0] == doctest::Approx(0.5));
    for (const auto& at : folded.atoms) CHECK(at.scale == 1.0);
    for (double x : {-2.0, -0.3, 0.0, 0.9, 4.0})
        CHECK(std::fabs(eval_approximant(moved, Point(x)) - eval_approximant(folded, Point(x))) < 1e-12);
    const auto same = affine_image(a, wavelet::cube(0, 0));
    CHECK(eval_approximant(same, Point(0.4)) == doctest::Approx(eval_approximant(a, Point(0.4))).epsilon(1e-15));
}

TEST_CASE("eval_approximant basics") {
    NTermApproximant a;
    CHECK(eval_approximant(a, Point(1.0)) == 0.0);
    a.atoms.push_back(Atom{1.0, Point(0.0), 1.0, kernels::gaussian(1.0)});
    CHECK(eval_approximant(a, Point(0.0)) == doctest::Approx(1.0));
    NTermApproximant b;
    b.atoms.push_back(Atom{2.0, Point(1.0), 1.0, kernels::inverse_multiquadric(-1.5)});
    NTermApproximant ab = a;
    ab.atoms.insert(ab.atoms.end(), b.atoms.begin(), b.atoms.end());
    CHECK(eval_approximant(ab, Point(0.3)) ==
          doctest::Approx(eval_approximant(a, Point(0.3)) + eval_approximant(b, Point(0.3))).epsilon(1e-15));
    const std::string csv = to_csv(ab);
    CHECK(csv.rfind("weight,center,family,alpha,c\n", 0) == 0);
    CHECK(csv.find("gaussian") != std::string::npos);
}

TEST_CASE("two-dimensional Gaussian T_N uses the product structure") {
    const auto f = meyer_band(wavelet::NuProfile::Linear, 2);
    const auto k = kernels::gaussian(0.4, 2);
    const double v = f_phi_sample(f, k, Point(0.3, -0.2));
    const auto f1 = meyer_band();
    const auto k1 = kernels::gaussian(0.4);
    CHECK(v == doctest::Approx(f_phi_sample(f1, k1, Point(0.3)) * f_phi_sample(f1, k1, Point(-0.2))).epsilon(1e-12));
    CHECK(code_of([&] { t_n(f, k, 50); }) == ErrorCode::BandViolation);
    CHECK(band_floor(wavelet::kBandRadius, 2) == 51);
    CHECK(code_of([&] { f_phi_sample(f1, k, Point(0.1, 0.1)); }) == ErrorCode::ShapeMismatch);
}
