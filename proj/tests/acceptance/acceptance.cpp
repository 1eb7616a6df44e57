// Acceptance suite: one PASS/FAIL line per criterion.
// Exit status is 0 when every criterion ran; --strict also fails on any FAIL line.
#include "kterm/approx.hpp"
#include "kterm/cardinal.hpp"
#include "kterm/error.hpp"
#include "kterm/growing.hpp"
#include "kterm/harness.hpp"
#include "kterm/interp.hpp"
#include "kterm/kernels.hpp"
#include "kterm/nterm.hpp"
#include "kterm/specfun.hpp"
#include "kterm/wavelet.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace kterm;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "[x] ") + what;
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

const double R = wavelet::kBandRadius;

std::vector<std::vector<std::string>> csv_rows(const std::string& csv) {
    std::vector<std::vector<std::string>> out;
    std::stringstream ss(csv);
    std::string line;
    bool header = true;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        out.push_back(cells);
    }
    return out;
}

// Non-increasing up to at most one inversion, and that inversion at most 2x.
bool monotone_with_one_inversion(const std::vector<double>& e, std::string& note) {
    int inversions = 0;
    double worst = 1;
    for (size_t i = 1; i < e.size(); ++i)
        if (e[i] > e[i - 1]) {
            ++inversions;
            worst = std::max(worst, e[i] / e[i - 1]);
        }
    note = std::to_string(inversions) + " inversion(s), worst x" + fmt("%.3f", worst);
    return inversions <= 1 && worst <= 2;
}

Outcome criterion1() {
    using namespace wavelet;
    Outcome o;
    double part = 0;
    for (auto p : {NuProfile::Linear, NuProfile::Quartic})
        for (int i = 0; i <= 2000; ++i) {
            const double x = -0.5 + 2.0 * i / 2000;
            part = std::max(part, std::fabs(nu(x, p) + nu(1 - x, p) - 1));
        }
    o.check(part <= 1e-12, "nu partition " + sci(part));

    double leak = 0;
    for (auto p : {NuProfile::Linear, NuProfile::Quartic}) {
        std::vector<double> xs;
        for (int i = 0; i <= 20000; ++i) xs.push_back(-20 + 40.0 * i / 20000);
        for (double s : {1.0, -1.0})
            for (double e : {1e-12, 1e-9, 1e-6}) {
                xs.push_back(s * (2 * pi / 3) * (1 - e));
                xs.push_back(s * (8 * pi / 3) * (1 + e));
            }
        for (double xi : xs) {
            const double a = std::fabs(xi);
            if (a < 2 * pi / 3 || a > 8 * pi / 3) leak = std::max(leak, std::abs(meyer_hat(xi, p)));
        }
    }
    o.check(leak < 1e-15, "band leakage " + sci(leak));

    double norm_err = 0;
    for (auto p : {NuProfile::Linear, NuProfile::Quartic}) {
        const double n2 = specfun::integrate([&](double xi) { return std::norm(meyer_hat(xi, p)); },
                                             {-8 * pi / 3, -4 * pi / 3, -2 * pi / 3, 2 * pi / 3, 4 * pi / 3, 8 * pi / 3}) /
                          (2 * pi);
        norm_err = std::max(norm_err, std::fabs(std::sqrt(n2) - 1));
    }
    o.check(norm_err <= 1e-6, "|‖psi‖2 - 1| " + sci(norm_err));

    double inv = 0;
    for (int i = 0; i < 200; ++i) {
        const double x = -6 + 12.0 * (i + 0.5) / 200;
        inv = std::max(inv, std::fabs(meyer_time(x) - meyer_time_numeric(x)));
    }
    o.check(inv <= 1e-8, "closed form vs inversion " + sci(inv));
    return o;
}

Outcome criterion2() {
    Outcome o;
    harness::ExperimentConfig cfg;
    cfg.families = {"gaussian"};
    const auto rows = csv_rows(harness::run_wavelet_table(cfg));
    std::map<double, std::vector<double>> col;
    double e_02_50 = NAN;
    for (const auto& r : rows) {
        const double a = std::stod(r[1]), linf = std::stod(r[4]);
        col[a].push_back(linf);
        if (a == 0.2 && r[2] == "50") e_02_50 = linf;
    }
    for (auto& [a, e] : col) {
        std::string note;
        const bool ok = e.size() == 5 && monotone_with_one_inversion(e, note);
        o.check(ok, "alpha=" + fmt("%g", a) + " Linf " + note);
    }
    o.check(e_02_50 <= 1e-4, "Linf(alpha=.2, N=50) " + sci(e_02_50) + " <= 1e-4");
    return o;
}

Outcome criterion3() {
    Outcome o;
    harness::ExperimentConfig cfg;
    cfg.families = {"multiquadric"};
    cfg.multiquadric_alpha = {-7.5};
    const auto rows = csv_rows(harness::run_wavelet_table(cfg));
    std::vector<double> l1;
    for (const auto& r : rows) l1.push_back(std::stod(r[3]));
    bool dec = l1.size() == 5;
    for (size_t i = 1; i < l1.size(); ++i) dec = dec && l1[i] < l1[i - 1];
    std::string col;
    for (double v : l1) col += (col.empty() ? "" : ",") + sci(v);
    o.check(dec, "L1 column decreasing [" + col + "]");
    o.check(!l1.empty() && l1.back() <= 1e-3, "L1(N=50) " + sci(l1.empty() ? NAN : l1.back()) + " <= 1e-3");
    return o;
}

Outcome criterion4() {
    Outcome o;
    const auto f = approx::meyer_band();
    harness::CounterRng rng(4, 0);
    const double h = 0.3;
    for (const auto& k : {kernels::gaussian(0.4), kernels::inverse_multiquadric(-2.5)}) {
        approx::FPhi fp(f, k);
        double worst = 0;
        for (int i = 0; i < 5; ++i) {
            const Point x(rng.uniform(-4, 4));
            const double lhs = f.eval(x) - h * approx::t_sharp(fp, h, x);
            const double rhs = -approx::aliasing_integral(f, k, h, x);
            worst = std::max(worst, std::fabs(lhs - rhs));
        }
        o.check(worst <= 1e-6, k.describe() + " " + sci(worst));
    }
    return o;
}

Outcome criterion5() {
    Outcome o;
    const nterm::SmoothnessParams sp{1.0, 2.0, 1};
    double worst_sum = 0;
    long over = 0, min_slack = 1L << 40;
    for (long t = 1; t <= 100; ++t) {
        const auto e = harness::random_expansion(5, t, 1 + static_cast<int>(t % 20));
        const long N = 50 + 37 * t;
        const auto c = nterm::costs(e, sp, N);
        double s = 0;
        for (double v : c) s += v;
        worst_sum = std::max(worst_sum, std::fabs(s - N) / N);
        const auto pl = nterm::plan(e, sp, N);
        if (pl.total_budget() > N) ++over;
        min_slack = std::min(min_slack, N - pl.total_budget());
    }
    o.check(worst_sum <= 1e-10, "Definition cost sum rel err " + sci(worst_sum));
    o.check(over == 0, "sum N_I <= N on 100 random expansions (min slack " + std::to_string(min_slack) + ")");

    std::vector<wavelet::Term> unit;
    for (long n = 0; n < 4; ++n) unit.push_back({wavelet::cube(0, n), 1.0});
    const auto lim = wavelet::make_expansion(unit, true);
    const long N = 1; // M = 4 > N^tau = 1
    const auto pl = nterm::plan(lim, sp, N, nterm::CostConvention::SectionEight);
    const auto a = nterm::assemble(pl, kernels::gaussian(0.2));
    double sup = 0;
    for (int i = 0; i <= 100; ++i) sup = std::max(sup, std::fabs(approx::eval_approximant(a, Point(-2 + 0.08 * i))));
    o.check(pl.total_budget() == 0 && a.atoms.empty() && sup == 0.0,
            "SectionEight limitation: budgets " + std::to_string(pl.total_budget()) + ", atoms " +
                std::to_string(a.atoms.size()));

    const auto single = wavelet::make_expansion({{wavelet::cube(-2, 4), 3.5}}, true);
    double worst_single = 0;
    for (long n : {1L, 10L, 100L, 400L})
        worst_single = std::max(worst_single, std::fabs(nterm::costs(single, sp, n)[0] - n) / n);
    o.check(worst_single <= 1e-12, "single term c = N (rel err " + sci(worst_single) + ")");
    return o;
}

Outcome criterion6() {
    Outcome o;
    harness::ExperimentConfig cfg;
    cfg.trials = 1;
    const auto rows = harness::sparse_rows(cfg);
    std::vector<double> err;
    bool budgets_ok = true;
    for (const auto& r : rows) {
        if (r.part != "fixed") continue;
        err.push_back(r.linf_error);
        long t = 0;
        for (long b : r.budgets) t += b;
        budgets_ok = budgets_ok && t <= r.N;
    }
    bool dec = err.size() == 4;
    for (size_t i = 1; i < err.size(); ++i) dec = dec && err[i] < err[i - 1];
    std::string col;
    for (double v : err) col += (col.empty() ? "" : ",") + fmt("%.4f", v);
    o.check(dec, "Linf strictly decreasing over N=100..400 [" + col + "]");
    o.check(budgets_ok, "budgets sum <= N per row");

    const auto e = nterm::fixed_expansion();
    const auto w = nterm::cost_weights(e, cfg.smoothness());
    bool argmax_ok = true;
    for (long N : cfg.sparse_N) {
        const auto c = nterm::costs(e, cfg.smoothness(), N, cfg.convention);
        argmax_ok = argmax_ok && std::max_element(c.begin(), c.end()) - c.begin() ==
                                     std::max_element(w.begin(), w.end()) - w.begin();
    }
    o.check(argmax_ok, "largest-cost cube has the largest |a|^tau |I|^{tau/p}");
    return o;
}

Outcome criterion7() {
    Outcome o;
    std::string slopes;
    bool slope_ok = true;
    for (int a = 1; a <= 3; ++a) {
        std::vector<double> lx, ys;
        for (int i = 0; i <= 40; ++i) {
            const double x = std::pow(10.0, 1.0 + 2.0 * i / 40);
            lx.push_back(std::log(x));
            ys.push_back(std::fabs(kernels::eval(kernels::dd_multiquadric(a, 1.0), Point(x))));
        }
        const double s = harness::fit_rate(lx, ys);
        slope_ok = slope_ok && std::fabs(s + (2 * a + 1)) <= 0.3;
        slopes += (slopes.empty() ? "" : ",") + fmt("%.3f", s);
    }
    o.check(slope_ok, "DD decay slopes [" + slopes + "]");

    harness::CounterRng rng(7, 0);
    double worst = 0;
    for (int n : {1, 2, 3}) {
        const auto dd = growing::GrowingBase::from_kernel(kernels::dd_multiquadric(n, 1.0));
        const auto raw = growing::GrowingBase::raw_multiquadric(n, 1.0);
        for (int i = 0; i < 100; ++i) {
            const double xi = rng.uniform(-R, R);
            const long N = 2 + static_cast<long>(rng.next() % 6);
            const long j = (i % 2 ? 1 : -1) * (1 + static_cast<long>(rng.next() % 3));
            worst = std::max(worst, std::fabs(growing::aliasing_ratio(dd, N, xi, j) /
                                                  growing::aliasing_ratio(raw, N, xi, j) -
                                              1));
        }
    }
    o.check(worst <= 1e-10, "ratio identity rel " + sci(worst));

    const auto pw = growing::GrowingBase::from_kernel(kernels::power(3.0));
    const double s32 = growing::b4_derivative_sums(pw, 32, R, 0)[0];
    const double s64 = growing::b4_derivative_sums(pw, 64, R, 0)[0];
    const double shape = (s64 / s32) / std::pow(2.0, -4.0);
    const double exact = s64 / growing::b3_exact_sup(3.0, 64, R);
    o.check(std::fabs(shape - 1) <= 0.1 && std::fabs(exact - 1) <= 0.1 && s64 <= growing::b3_displayed_bound(3.0, 64, R),
            "B3 N=32->64 ratio / 2^-4 = " + fmt("%.4f", shape) + ", sum / exact form = " + fmt("%.6f", exact));

    const auto f = approx::meyer_band();
    for (auto base : {growing::GrowingBase::from_kernel(kernels::dd_multiquadric(2)),
                      growing::GrowingBase::from_kernel(kernels::dd_multiquadric(3)), pw}) {
        std::vector<double> e;
        for (long N : {8, 16, 32}) {
            const growing::TildeFlat t(f, {base, N, R});
            double m = 0;
            for (int i = 0; i <= 121; ++i) m = std::max(m, std::fabs(t.residual(-6.0 + 12.0 * i / 121)));
            e.push_back(m);
        }
        o.check(e[1] < e[0] && e[2] < e[1],
                "TT_flat " + base.name() + fmt("(%g)", base.alpha) + " residual " + sci(e[0]) + "," + sci(e[1]) + "," +
                    sci(e[2]));
    }
    return o;
}

Outcome criterion8() {
    Outcome o;
    for (const auto& b : {kernels::gaussian(1.0), kernels::inverse_multiquadric(1.5, 1.0)}) {
        const auto L = kernels::cardinal(b, 1.0);
        const double l0 = std::fabs(kernels::eval(L, Point(0.0)) - 1);
        double lj = 0;
        for (int j = 1; j <= 10; ++j)
            lj = std::max({lj, std::fabs(kernels::eval(L, Point(double(j)))), std::fabs(kernels::eval(L, Point(double(-j))))});
        o.check(l0 <= 1e-6 && lj <= 1e-6, b.describe() + " |L(0)-1| " + sci(l0) + ", max|L(j)| " + sci(lj));
    }
    for (double h : {0.3, 0.2})
        for (const auto& b : {kernels::gaussian(1.0), kernels::matern(1.5, 1.0)}) {
            const auto [gl, bound] = kernels::cardinal_g_bound_check(b, h, R, 10, 256);
            o.check(gl <= bound, "cardinal alias bound h=" + fmt("%g", h) + " " + b.describe() + " " + sci(gl) + " <= " + sci(bound));
        }
    return o;
}

Outcome criterion9() {
    Outcome o;
    const auto f = interp::rational_bump(4.0);
    for (auto b : {interp::CardinalBase::Gaussian, interp::CardinalBase::Multiquadric}) {
        const double alpha = b == interp::CardinalBase::Gaussian ? 0.5 : 1.5;
        const double rho = b == interp::CardinalBase::Gaussian ? 3.0 : 2.5;
        std::vector<double> xs, ys;
        for (double h : {0.25, 0.125, 0.0625}) {
            xs.push_back(std::log(1 / h));
            ys.push_back(interp::interpolation_error(f, {b, alpha, h}, 2));
        }
        const double slope = -harness::fit_rate(xs, ys);
        o.check(std::fabs(slope - rho) <= 0.5,
                std::string(interp::base_name(b)) + " slope " + fmt("%.3f", slope) + " vs " + fmt("%g", rho) + " +- 0.5");
        double res = 0;
        const interp::InterpolantSpec s{b, alpha, 0.25};
        for (int k : {0, 1, 3, -7, 12}) res = std::max(res, std::fabs(interp::i_sharp(f, s, 0.25 * k) - f.eval(0.25 * k)));
        o.check(res < 1e-7, std::string(interp::base_name(b)) + " lattice residual " + sci(res));
    }
    return o;
}

Outcome criterion10() {
    Outcome o;
    double closed = 0;
    for (double r : {0.05, 0.3, 1.0, 2.0, 9.0, 40.0, 300.0}) {
        const double k = std::sqrt(pi / (2 * r)) * std::exp(-r);
        closed = std::max(closed, std::fabs(specfun::bessel_k(0.5, r) / k - 1));
    }
    o.check(closed <= 1e-8, "K_1/2 closed form rel " + sci(closed));

    auto direct = [](double nu, double r) {
        specfun::QuadratureSpec q{1e-16, 1e-12, 4000};
        return specfun::integrate([&](double t) { return std::exp(-r * std::cosh(t)) * std::cosh(nu * t); },
                                  specfun::Interval{0.0, 40.0}, q);
    };
    double quad = 0;
    int pairs = 0;
    for (double nu : {0.0, 0.3, 1.0, 2.7, 6.0})
        for (double r : {0.5, 1.5, 4.0, 9.0}) {
            quad = std::max(quad, std::fabs(specfun::bessel_k(nu, r) / direct(nu, r) - 1));
            ++pairs;
        }
    o.check(quad <= 1e-8, std::to_string(pairs) + " pairs vs quadrature rel " + sci(quad));

    bool exact = true;
    for (int n = 1; n <= 5; ++n)
        for (int deg = 0; deg < 2 * n; ++deg) {
            auto p = [&](double x) { return 3.0 * std::pow(x, deg) - 2.0; };
            for (double x : {-2.0, 0.0, 1.0, 5.0}) exact = exact && specfun::divided_difference(p, n, x) == 0.0;
        }
    o.check(exact, "divided differences annihilate degree < 2n exactly");
    return o;
}

Outcome criterion11() {
    Outcome o;
    harness::ExperimentConfig cfg;
    cfg.seed = 20240611;
    const std::string a = harness::run_sparse_experiments(cfg), b = harness::run_sparse_experiments(cfg);
    o.check(a == b, "sparse seed " + std::to_string(cfg.seed) + " byte-identical (" + std::to_string(a.size()) + " bytes)");
    cfg.families = {"gaussian"};
    cfg.gaussian_alpha = {0.3};
    const std::string c = harness::run_wavelet_table(cfg), d = harness::run_wavelet_table(cfg);
    o.check(c == d, "wavelet-table byte-identical");
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    bool strict = false;
    std::vector<int> only;
    std::string report;
    app.add_flag("--strict", strict, "exit nonzero if any criterion fails");
    app.add_option("--report", report, "also write the result lines to this file");
    app.add_option("--only", only, "run only these criteria")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all{
        {1, "Meyer wavelet validity", 10, criterion1},
        {2, "Gaussian wavelet table", 300, criterion2},
        {3, "multiquadric wavelet table", 300, criterion3},
        {4, "aliasing identity", 60, criterion4},
        {5, "cost and budget properties", 30, criterion5},
        {6, "fixed 7-term experiment", 600, criterion6},
        {7, "growing kernels", 300, criterion7},
        {8, "cardinal functions", 120, criterion8},
        {9, "interpolation rates", 300, criterion9},
        {10, "special functions", 10, criterion10},
        {11, "determinism", 600, criterion11},
    };
    int failed = 0, errors = 0;
    std::string lines;
    auto emit = [&](const std::string& line) {
        std::fputs(line.c_str(), stdout);
        std::fflush(stdout);
        lines += line;
    };
    for (const auto& c : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const Error& e) {
            o.pass = false;
            o.detail = std::string("ERROR ") + code_name(e.code()) + ": " + e.detail();
            ++errors;
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("ERROR ") + e.what();
            ++errors;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.limit_s) {
            o.pass = false;
            o.detail += "; [x] runtime over " + fmt("%g", c.limit_s) + " s";
        }
        if (!o.pass) ++failed;
        emit(std::string(o.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(c.id) + " (" + c.name + "): " +
             o.detail + " [" + fmt("%.1f", secs) + " s]\n");
    }
    emit(std::to_string(failed) + " criteria failed\n");
    if (!report.empty()) {
        std::FILE* f = std::fopen(report.c_str(), "w");
        if (!f || std::fputs(lines.c_str(), f) < 0) {
            std::fprintf(stderr, "cannot write %s\n", report.c_str());
            return 1;
        }
        std::fclose(f);
    }
    if (errors) return 1;
    return strict && failed ? 1 : 0;
}
