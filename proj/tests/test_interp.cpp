#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kterm/error.hpp"
#include "kterm/interp.hpp"

#include <cmath>

using namespace kterm;
using namespace kterm::interp;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("i_sharp reproduces lattice samples") {
    const auto f = rational_bump(4.0);
    for (auto b : {CardinalBase::Gaussian, CardinalBase::Multiquadric}) {
        const InterpolantSpec s{b, b == CardinalBase::Gaussian ? 0.5 : 1.5, 0.25};
        for (int k : {0, 1, 3, -7, 12})
            CHECK(std::fabs(i_sharp(f, s, 0.25 * k) - f.eval(0.25 * k)) < 1e-7);
    }
}

TEST_CASE("zero function, linearity and translation") {
    const InterpolantSpec s{CardinalBase::Gaussian, 0.5, 0.25};
    const auto z = zero_function();
    CHECK(i_sharp(z, s, 0.37) == 0.0);

    const auto f = rational_bump(4.0), g = decayed_gaussian(4.0);
    TestFunction fg = f;
    fg.name = "combo";
    fg.eval = [&](double x) { return 2.5 * f.eval(x) - 0.75 * g.eval(x); };
    fg.decay_const = 2.5 * f.decay_const + 0.75 * g.decay_const;
    for (double x : {0.1, -0.93, 1.7}) {
        const double lhs = i_flat(fg, s, x);
        const double rhs = 2.5 * i_flat(f, s, x) - 0.75 * i_flat(g, s, x);
        CHECK(std::fabs(lhs - rhs) < 1e-10);
    }

    const int m = 3;
    TestFunction shifted = f;
    shifted.eval = [&](double x) { return f.eval(x - s.h * m); };
    shifted.decay_const = 8 * f.decay_const;
    for (double x : {0.1, 0.61}) {
        CHECK(std::fabs(i_sharp(shifted, s, x + s.h * m) - i_sharp(f, s, x)) < 1e-9);
    }
}

TEST_CASE("truncated interpolant agrees with the full sum up to the tail") {
    const auto f = rational_bump(4.0);
    const InterpolantSpec s{CardinalBase::Gaussian, 0.5, 0.25};
    CHECK(i_flat_radius(0.25) == 16);
    for (double x : {0.0, 0.3, -1.1}) {
        CHECK(std::fabs(i_flat(f, s, x) - i_sharp(f, s, x)) < 2 * lattice_tail_sum(f, 0.25) + 1e-8);
    }
    CHECK(i_n_spacing(16) == doctest::Approx(0.25));
    CHECK(std::fabs(i_n(f, CardinalBase::Gaussian, 0.5, 16, 0.3) - i_flat(f, s, 0.3)) < 1e-14);
}

TEST_CASE("lattice tail sum shrinks with h") {
    const auto f = rational_bump(4.0);
    double prev = lattice_tail_sum(f, 0.25);
    for (double h : {0.125, 0.0625}) {
        const double t = lattice_tail_sum(f, h);
        CHECK(prev / t >= std::pow(2.0, 1.5));
        prev = t;
    }
}

TEST_CASE("cardinal norm scales like h^{1/p}") {
    for (auto b : {CardinalBase::Gaussian, CardinalBase::Multiquadric}) {
        const double a = b == CardinalBase::Gaussian ? 0.5 : 1.5;
        for (double h : {0.25, 0.125}) {
            const double r = cardinal_norm_scaling({b, a, h}, 2) / std::sqrt(h);
            CHECK(r > 1.0 / 3);
            CHECK(r < 3.0);
        }
    }
}

TEST_CASE("test function decay constants hold") {
    for (const auto& f : {rational_bump(4.0), decayed_gaussian(4.0)}) {
        f.validate();
        CHECK(f.decay_check() <= f.decay_const * (1 + 1e-12));
    }
}

TEST_CASE("interpolation error decreases and p = inf is measured") {
    const auto f = rational_bump(4.0);
    const InterpolantSpec a{CardinalBase::Gaussian, 0.5, 0.25}, b{CardinalBase::Gaussian, 0.5, 0.125};
    const double ea = interpolation_error(f, a, 2), eb = interpolation_error(f, b, 2);
    CHECK(eb < ea / 4);
    CHECK(interpolation_error(f, b, 0) > 0);
}

TEST_CASE("invalid inputs") {
    CHECK(code_of([] { InterpolantSpec{CardinalBase::Gaussian, 0.5, -1}.validate(); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { InterpolantSpec{CardinalBase::Multiquadric, 0.4, 0.25}.validate(); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { parse_base("spline"); }) == ErrorCode::UsageError);
    CHECK(std::string(base_name(parse_base("multiquadric"))) == "multiquadric");
    const std::string csv = rate_csv(CardinalBase::Gaussian, 0.5, 2, {{0.25, 1e-3}, {0.125, 1e-4}}, 3.32);
    CHECK(csv.rfind("family,alpha,h,p,error,fitted_slope", 0) == 0);
}
