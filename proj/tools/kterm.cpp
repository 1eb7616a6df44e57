// kterm: experiment and diagnostic driver.
#include "kterm/error.hpp"
#include "kterm/growing.hpp"
#include "kterm/harness.hpp"
#include "kterm/kernels.hpp"
#include "kterm/nterm.hpp"
#include "kterm/wavelet.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

using namespace kterm;

namespace {

struct Options {
    std::string config;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string kernel;
    std::vector<double> alpha;
    std::vector<long> N;
    std::string convention;
    std::string expansion;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "key=value config file");
    sub->add_option("--set", o.sets, "override a config key (key=value), repeatable");
    sub->add_option("--seed", o.seed, "64-bit RNG seed");
    sub->add_option("--out", o.out, "output file, or a directory for <experiment>_<seed>.csv (default stdout)");
    sub->add_option("--kernel", o.kernel, "kernel family");
    sub->add_option("--alpha", o.alpha, "kernel parameter(s)")->delimiter(',');
    sub->add_option("--N", o.N, "budget(s)")->delimiter(',');
    sub->add_option("--convention", o.convention, "cost convention: definition or section8");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, "cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

harness::ExperimentConfig build_config(const Options& o) {
    harness::ExperimentConfig cfg = o.config.empty() ? harness::ExperimentConfig{} : harness::load_config(o.config);
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) fail(ErrorCode::UsageError, "--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.seed) cfg.seed = *o.seed;
    if (!o.convention.empty()) cfg.convention = nterm::parse_convention(o.convention);
    return cfg;
}

void write_output(const Options& o, const std::string& experiment, std::uint64_t seed, const std::string& text) {
    if (o.out.empty() || o.out == "-") {
        std::cout << text;
        return;
    }
    std::filesystem::path p(o.out);
    if (std::filesystem::is_directory(p)) p /= harness::experiment_filename(experiment, seed);
    std::ofstream f(p, std::ios::binary);
    if (!f) fail(ErrorCode::ParseError, "cannot write '" + p.string() + "'");
    f << text;
    if (!f) fail(ErrorCode::ParseError, "write failed for '" + p.string() + "'");
}

std::string run_wavelet_table(const Options& o, harness::ExperimentConfig cfg) {
    if (!o.kernel.empty()) cfg.families = {o.kernel};
    if (!o.alpha.empty()) {
        for (const auto& f : cfg.families) (f == "gaussian" ? cfg.gaussian_alpha : cfg.multiquadric_alpha) = o.alpha;
    }
    if (!o.N.empty()) cfg.N = o.N;
    return harness::run_wavelet_table(cfg);
}

std::string run_sweep(const Options& o, harness::ExperimentConfig cfg) {
    if (!o.kernel.empty() && o.kernel != "gaussian") fail(ErrorCode::UsageError, "sweep uses the gaussian kernel");
    if (!o.alpha.empty()) cfg.sweep_alpha = o.alpha;
    if (o.N.size() > 1) fail(ErrorCode::UsageError, "sweep takes a single N");
    if (!o.N.empty()) cfg.sweep_N = o.N.front();
    return harness::run_parameter_sweep(cfg);
}

std::string run_sparse(const Options& o, harness::ExperimentConfig cfg) {
    if (!o.kernel.empty() && o.kernel != "gaussian") fail(ErrorCode::UsageError, "sparse uses the gaussian kernel");
    if (o.alpha.size() > 1) fail(ErrorCode::UsageError, "sparse takes a single alpha");
    if (!o.alpha.empty()) cfg.sparse_alpha = o.alpha.front();
    if (!o.N.empty()) cfg.sparse_N = o.N;
    return harness::run_sparse_experiments(cfg);
}

std::string run_interp(const Options& o, harness::ExperimentConfig cfg) {
    if (!o.kernel.empty()) cfg.families = {o.kernel};
    if (!o.alpha.empty()) fail(ErrorCode::UsageError, "interp-rates uses fixed bases; set interp.h instead");
    return harness::run_interp_rates(cfg);
}

std::string run_growing_diag(const Options& o, const harness::ExperimentConfig& cfg) {
    const std::string k = o.kernel.empty() ? "power" : o.kernel;
    const std::vector<double> alphas = o.alpha.empty() ? std::vector<double>{3.0} : o.alpha;
    const std::vector<long> Ns = o.N.empty() ? std::vector<long>{8, 16, 32, 64} : o.N;
    const double R = wavelet::kBandRadius;
    std::ostringstream os;
    os << "# experiment=growing-diag\n# kernel=" << k << "\n# band_radius=" << harness::fmt(R) << "\n";
    os << "base,alpha,N,quantity,value\n";
    for (double a : alphas) {
        growing::GrowingBase b;
        if (k == "power") {
            b = growing::GrowingBase::from_kernel(kernels::power(a));
        } else if (k == "ddmq" || k == "dd_multiquadric") {
            if (a != std::floor(a)) fail(ErrorCode::UsageError, "ddmq takes an integer alpha");
            b = growing::GrowingBase::from_kernel(kernels::dd_multiquadric(static_cast<int>(a)));
        } else if (k == "mq" || k == "multiquadric") {
            if (a != std::floor(a)) fail(ErrorCode::UsageError, "mq takes an integer exponent n");
            b = growing::GrowingBase::raw_multiquadric(static_cast<int>(a));
        } else {
            fail(ErrorCode::UsageError, "growing-diag kernel must be power, ddmq or mq");
        }
        for (long N : Ns) {
            const auto sums = growing::b4_derivative_sums(b, N, R);
            auto row = [&](const std::string& q, double v) {
                os << b.name() << ',' << harness::fmt(a) << ',' << N << ',' << q << ',' << harness::fmt(v) << '\n';
            };
            for (size_t l = 0; l < sums.size(); ++l) row("b4_l" + std::to_string(l), sums[l]);
            if (b.kind == growing::GrowingBase::Kind::Power) {
                row("b3_exact", growing::b3_exact_sup(a, N, R));
                row("b3_displayed", growing::b3_displayed_bound(a, N, R));
            }
        }
    }
    (void)cfg;
    return os.str();
}

std::string run_kernel_diag(const Options& o, const harness::ExperimentConfig& cfg) {
    const std::string fam = o.kernel.empty() ? "gaussian" : o.kernel;
    const std::vector<double> alphas = o.alpha.empty() ? std::vector<double>{0.3} : o.alpha;
    const double R = wavelet::kBandRadius;
    const std::vector<double> hs{0.35, 0.3, 0.25, 0.2, 0.15};
    std::ostringstream os;
    os << "# experiment=kernel-diag\n# band_radius=" << harness::fmt(R) << "\n# band_condition_h_max="
       << harness::fmt(std::numbers::pi / R) << "\n";
    std::string summary;
    std::ostringstream rows;
    rows << "family,alpha,h,g_alpha\n";
    for (double a : alphas) {
        kernels::KernelSpec k;
        if (fam == "matern")
            k = kernels::matern(a);
        else
            k = harness::family_kernel(fam, a);
        std::vector<double> xs, ys;
        for (double h : hs) {
            const double g = kernels::g_alpha(k, h, R, 20);
            rows << fam << ',' << harness::fmt(a) << ',' << harness::fmt(h) << ',' << harness::fmt(g) << '\n';
            if (g > 0 && std::isfinite(g)) {
                xs.push_back(1 / h);
                ys.push_back(g);
            }
        }
        if (xs.size() >= 2)
            summary += "# g_slope_vs_inv_h(" + fam + "," + harness::fmt(a) + ")=" +
                       harness::fmt(harness::fit_rate(xs, ys)) + "\n";
        summary += "# g_decreasing(" + fam + "," + harness::fmt(a) + ")=" +
                   (std::is_sorted(ys.rbegin(), ys.rend()) && ys.size() == hs.size() ? "true" : "false") + "\n";
    }
    (void)cfg;
    return os.str() + summary + rows.str();
}

std::string run_cost(const Options& o, const harness::ExperimentConfig& cfg) {
    const wavelet::SparseExpansion e =
        o.expansion.empty() ? nterm::fixed_expansion() : wavelet::parse_csv(read_file(o.expansion));
    if (o.N.size() > 1) fail(ErrorCode::UsageError, "cost takes a single N");
    const long N = o.N.empty() ? 100 : o.N.front();
    nterm::SmoothnessParams sp = cfg.smoothness();
    sp.d = e.dim();
    const auto plan = nterm::plan(e, sp, N, cfg.convention, cfg.N0);
    long active = 0;
    for (const auto& en : plan.entries)
        if (en.budget >= nterm::min_useful_budget(sp.d)) ++active;
    std::ostringstream os;
    os << "# experiment=cost\n# N=" << N << "\n# cost.convention=" << nterm::convention_name(cfg.convention)
       << "\n# cost.s=" << harness::fmt(sp.s) << "\n# cost.p=" << harness::fmt(sp.p) << "\n# cost.N0=" << cfg.N0
       << "\n# tau=" << harness::fmt(sp.tau()) << "\n# total_budget=" << plan.total_budget()
       << "\n# active_cubes=" << active << "\n# zero_approximant=" << (active == 0 ? "true" : "false") << "\n";
    os << plan.to_csv();
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kterm: N-term kernel approximation experiments"};
    app.require_subcommand(1);
    Options o;
    const std::vector<std::pair<std::string, std::string>> verbs{
        {"wavelet-table", "Gaussian and multiquadric approximation of the Meyer wavelet"},
        {"sweep", "Gaussian width sweep at fixed N"},
        {"sparse", "fixed 7-term and random 5-term expansions"},
        {"interp-rates", "cardinal interpolation error rates"},
        {"growing-diag", "growing kernel aliasing sums"},
        {"kernel-diag", "aliasing function g_alpha(h) tables"},
        {"cost", "cost distribution and budgets for an expansion"},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, help] : verbs) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, o);
        if (name == "cost") sub->add_option("--expansion", o.expansion, "CSV m,n,coeff with '# disjoint=true'");
        subs[name] = sub;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    std::string verb;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) verb = name;
    try {
        const harness::ExperimentConfig cfg = build_config(o);
        std::string text;
        if (verb == "wavelet-table")
            text = run_wavelet_table(o, cfg);
        else if (verb == "sweep")
            text = run_sweep(o, cfg);
        else if (verb == "sparse")
            text = run_sparse(o, cfg);
        else if (verb == "interp-rates")
            text = run_interp(o, cfg);
        else if (verb == "growing-diag")
            text = run_growing_diag(o, cfg);
        else if (verb == "kernel-diag")
            text = run_kernel_diag(o, cfg);
        else
            text = run_cost(o, cfg);
        write_output(o, verb, cfg.seed, text);
    } catch (const Error& e) {
        std::cout.flush();
        std::fprintf(stderr, "ERROR,%s,%s\n", code_name(e.code()), e.detail().c_str());
        if (e.code() == ErrorCode::UsageError) {
            std::fprintf(stderr, "%s", app.help().c_str());
            return 2;
        }
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "ERROR,Internal,%s\n", e.what());
        return 1;
    }
    return 0;
}
