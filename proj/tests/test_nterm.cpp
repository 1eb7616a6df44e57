#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kterm/error.hpp"
#include "kterm/nterm.hpp"
#include "kterm/specfun.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace kterm;
using namespace kterm::nterm;
using wavelet::cube;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidArgument;
}

wavelet::SparseExpansion unit_terms(int M) {
    std::vector<wavelet::Term> t;
    for (int i = 0; i < M; ++i) t.push_back({cube(0, i), 1.0});
    return wavelet::make_expansion(t, true);
}

} // namespace

TEST_CASE("smoothness parameters") {
    for (double s : {0.5, 1.0, 2.0})
        for (double p : {1.0, 2.0, 4.0})
            for (int d : {1, 2}) {
                SmoothnessParams sp{s, p, d};
                CHECK(sp.tau() < p);
                CHECK(sp.q() < 1);
                CHECK(std::fabs(1 - s * sp.tau() / d - sp.tau() / p) < 1e-14);
            }
    CHECK(SmoothnessParams{1, 2, 1}.tau() == doctest::Approx(2.0 / 3.0));
    CHECK(code_of([] { SmoothnessParams{0, 2, 1}.validate(); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { SmoothnessParams{1, 0.5, 1}.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("partial maximal function on a single cube") {
    CHECK(partial_max_sup(cube(0, 0), 3, {1, 2, 1}) == doctest::Approx(3));
    CHECK(partial_max_sup(cube(-1, 0), 1, {1, 2, 1}) == doctest::Approx(2));
    CHECK(partial_max_sup(cube(1, 0, 0), 1, {1, 2, 2}) == doctest::Approx(0.5));
}

TEST_CASE("disjoint Triebel-Lizorkin seminorm") {
    SmoothnessParams sp{1, 2, 1};
    CHECK(tl_seminorm_disjoint(wavelet::make_expansion({{cube(0, 0), 2.0}}, true), sp) == doctest::Approx(2));
    CHECK(tl_seminorm_disjoint(unit_terms(2), sp) == doctest::Approx(std::pow(2.0, 1.0 / sp.tau())));
    const auto e = fixed_expansion();
    // mpmath: (sum |a|^(2/3) |I|^(1/3))^(3/2)
    CHECK(tl_seminorm_disjoint(e, sp) == doctest::Approx(60.2768679220704261781).epsilon(1e-13));
    // ||M f||_{L_tau} by quadrature of the piecewise constant maximal function over the cubes.
    double integral = 0.0;
    for (const auto& t : e.terms) {
        const double m = partial_max_sup(t.cube, t.coeff, sp);
        const double a = t.cube.corner()[0], b = a + t.cube.side();
        integral += specfun::integrate([&](double) { return std::pow(m, sp.tau()); }, specfun::Interval{a, b});
    }
    CHECK(std::pow(integral, 1.0 / sp.tau()) == doctest::Approx(tl_seminorm_disjoint(e, sp)).epsilon(1e-12));
    wavelet::SparseExpansion nd = e;
    nd.disjoint = false;
    CHECK(code_of([&] { tl_seminorm_disjoint(nd, sp); }) == ErrorCode::NotDisjoint);
}

TEST_CASE("cost conventions") {
    SmoothnessParams sp{1, 2, 1};
    const auto one = wavelet::make_expansion({{cube(2, 5), 7.5}}, true);
    CHECK(costs(one, sp, 100)[0] == doctest::Approx(100).epsilon(1e-15));
    for (int M : {3, 10}) {
        for (double c : costs(unit_terms(M), sp, 100)) CHECK(c == doctest::Approx(100.0 / M));
        for (double c : costs(unit_terms(M), sp, 100, CostConvention::SectionEight))
            CHECK(c == doctest::Approx(std::pow(M, -1.0 / sp.tau()) * 100));
    }
    CHECK(code_of([&] { costs(wavelet::SparseExpansion{{}, true}, sp, 10); }) == ErrorCode::EmptyExpansion);

    const auto e = fixed_expansion();
    const auto c = costs(e, sp, 100);
    const double ref[7] = {14.537534495557343, 14.914563394369771, 14.874034658277059, 9.2290574901296361,
                           28.144565901628079, 15.532825347327659, 2.7674187127104535};
    double sum = 0;
    for (int i = 0; i < 7; ++i) {
        CHECK(c[i] == doctest::Approx(ref[i]).epsilon(1e-13));
        sum += c[i];
    }
    CHECK(std::fabs(sum - 100) < 1e-10 * 100);
    double s8 = 0;
    for (double v : costs(e, sp, 100, CostConvention::SectionEight)) s8 += v;
    CHECK(s8 <= 100);
}

TEST_CASE("cost invariances") {
    SmoothnessParams sp{1.5, 2, 1};
    auto e = fixed_expansion();
    for (auto conv : {CostConvention::Definition, CostConvention::SectionEight}) {
        const auto c0 = costs(e, sp, 250, conv);
        auto scaled = e;
        for (auto& t : scaled.terms) t.coeff *= 3.7;
        const auto c1 = costs(scaled, sp, 250, conv);
        if (conv == CostConvention::Definition)
            for (size_t i = 0; i < c0.size(); ++i) CHECK(c1[i] == doctest::Approx(c0[i]).epsilon(1e-13));
    }
    const auto c0 = costs(e, sp, 250);
    auto bumped = e;
    bumped.terms[3].coeff *= 1.5;
    const auto c1 = costs(bumped, sp, 250);
    for (size_t i = 0; i < c0.size(); ++i) {
        if (i == 3) CHECK(c1[i] > c0[i]);
        else CHECK(c1[i] < c0[i]);
    }
}

TEST_CASE("budget rule") {
    const auto b = budgets({54.9, 0.7}, 1);
    CHECK(b == std::vector<long>{54, 0});
    CHECK(budgets({5.5, 3.2}, 4) == std::vector<long>{5, 0});
    CHECK(budgets({100.0}, 1) == std::vector<long>{100});
    SmoothnessParams sp{1, 2, 1};
    // M > N^tau unit terms under the SectionEight convention: every budget vanishes.
    const long N = 100;
    const int M = static_cast<int>(std::ceil(std::pow(N, sp.tau()))) + 1;
    const auto pl = plan(unit_terms(M), sp, N, CostConvention::SectionEight);
    CHECK(pl.total_budget() == 0);
    const auto a = assemble(pl, kernels::gaussian(0.3));
    CHECK(a.atoms.empty());
    CHECK(approx::eval_approximant(a, Point(0.4)) == 0.0);
}

TEST_CASE("budgets never exceed N on random disjoint expansions") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coef(0.01, 10);
    std::uniform_int_distribution<int> dil(0, 4);
    SmoothnessParams sp{1, 2, 1};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<wavelet::Term> t;
        std::set<long> used;
        const int M = 1 + trial % 9;
        for (int i = 0; i < M; ++i) {
            long k = static_cast<long>(rng() % 40);
            while (used.count(k)) k = (k + 1) % 40;
            used.insert(k);
            const int j = dil(rng);
            t.push_back({cube(-j, k * (1L << j)), coef(rng)});
        }
        const auto e = wavelet::make_expansion(t, true);
        double sw = 0;
        for (double w : cost_weights(e, sp)) sw += w;
        for (long N : {10L, 137L, 1000L}) {
            CHECK(plan(e, sp, N).total_budget() <= N);
            // The SectionEight costs sum to N (sum w)^{1 - 1/tau}, which stays below N only when sum w >= 1.
            double s8 = 0;
            for (double c : costs(e, sp, N, CostConvention::SectionEight)) s8 += c;
            CHECK(s8 == doctest::Approx(N * std::pow(sw, 1 - 1 / sp.tau())).epsilon(1e-12));
            if (sw >= 1) CHECK(plan(e, sp, N, CostConvention::SectionEight).total_budget() <= N);
        }
    }
}

TEST_CASE("assembly") {
    const auto k = kernels::gaussian(0.3);
    const auto one = wavelet::make_expansion({{cube(0, 0), 1.0}}, true);
    const auto pl = plan(one, {1, 2, 1}, 40);
    CHECK(pl.entries[0].budget == 40);
    const auto a = assemble(pl, k);
    const auto ref = approx::t_n(approx::meyer_band(), k, 40);
    for (double x : {-2.0, 0.3, 1.1, 4.0})
        CHECK(approx::eval_approximant(a, Point(x)) ==
              doctest::Approx(approx::eval_approximant(ref, Point(x))).epsilon(1e-13));
    CHECK(min_useful_budget(1) == 8);
    const std::string csv = pl.to_csv();
    CHECK(csv == "m,n,coeff,cost,budget\n0,0,1,40,40\n");
}

TEST_CASE("fixed seven-term expansion improves from N = 100 to N = 400") {
    const auto e = fixed_expansion();
    CHECK(e.terms.size() == 7);
    CHECK(e.terms[0].cube.corner()[0] == -3.0);
    CHECK(e.terms[0].cube.side() == 0.125);
    CHECK(e.terms[6].cube.corner()[0] == 3.0);
    const SmoothnessParams sp{1, 2, 1};
    const auto k = kernels::gaussian(0.2);
    auto err = [&](long N) {
        const auto a = assemble(plan(e, sp, N), k);
        double m = 0;
        for (int i = 0; i <= 4800; ++i) {
            const Point x(-6.0 + 12.0 * i / 4800);
            m = std::max(m, std::fabs(approx::eval_approximant(a, x) - wavelet::synthesize(e, x)));
        }
        return m;
    };
    CHECK(err(400) < err(100));
}
