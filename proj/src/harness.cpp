#include "kterm/harness.hpp"

#include "kterm/approx.hpp"
#include "kterm/error.hpp"
#include "kterm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace kterm::harness {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void GridFunction::validate() const {
    if (dim != 1 && dim != 2) fail(ErrorCode::UnsupportedDim, "grid functions support d = 1, 2");
    if (samples_per_axis < 2) fail(ErrorCode::InvalidArgument, "a grid needs at least 2 samples per axis");
    if (!(hi > lo)) fail(ErrorCode::InvalidArgument, "grid domain is empty");
    const size_t n = dim == 1 ? samples_per_axis : samples_per_axis * samples_per_axis;
    if (values.size() != n) fail(ErrorCode::ShapeMismatch, "grid values do not match the sample count");
}

GridFunction sample(const std::function<double(const Point&)>& f, double lo, double hi, long n, int dim) {
    GridFunction g;
    g.lo = lo;
    g.hi = hi;
    g.dim = dim;
    g.samples_per_axis = n;
    if (dim != 1 && dim != 2) fail(ErrorCode::UnsupportedDim, "grid functions support d = 1, 2");
    if (n < 2) fail(ErrorCode::InvalidArgument, "a grid needs at least 2 samples per axis");
    g.values.resize(dim == 1 ? n : n * n);
    parallel_for(g.values.size(), [&](size_t k) {
        const long i = static_cast<long>(k);
        g.values[k] = dim == 1 ? f(Point(g.node(i))) : f(Point(g.node(i / n), g.node(i % n)));
    });
    return g;
}

namespace {

double trapezoid_weight(long i, long n) { return i == 0 || i == n - 1 ? 0.5 : 1.0; }

double lp_norm(const GridFunction& g, const std::vector<double>& v, double p) {
    if (std::isinf(p)) {
        double m = 0;
        for (double x : v) m = std::max(m, std::fabs(x));
        return m;
    }
    const long n = g.samples_per_axis;
    const double cell = std::pow(g.spacing(), g.dim);
    double s = 0;
    for (size_t k = 0; k < v.size(); ++k) {
        const long i = static_cast<long>(k);
        const double w = g.dim == 1 ? trapezoid_weight(i, n) : trapezoid_weight(i / n, n) * trapezoid_weight(i % n, n);
        s += w * std::pow(std::fabs(v[k]), p);
    }
    return std::pow(s * cell, 1.0 / p);
}

} // namespace

double lp_error(const GridFunction& a, const GridFunction& b, double p, bool relative) {
    a.validate();
    b.validate();
    if (a.dim != b.dim || a.samples_per_axis != b.samples_per_axis || a.lo != b.lo || a.hi != b.hi)
        fail(ErrorCode::ShapeMismatch, "grid functions live on different grids");
    if (!(p >= 1)) fail(ErrorCode::InvalidArgument, "p must be >= 1");
    std::vector<double> d(a.values.size());
    for (size_t k = 0; k < d.size(); ++k) d[k] = a.values[k] - b.values[k];
    const double e = lp_norm(a, d, p);
    if (!relative) return e;
    const double r = lp_norm(a, a.values, p);
    if (r == 0) fail(ErrorCode::DomainError, "relative error against a zero reference");
    return e / r;
}

double fit_rate(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) fail(ErrorCode::ShapeMismatch, "fit_rate needs equally many xs and ys");
    if (xs.size() < 2) fail(ErrorCode::DegenerateFit, "fit_rate needs at least 2 points");
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (!(ys[i] > 0) || !std::isfinite(ys[i]) || !std::isfinite(xs[i]))
            fail(ErrorCode::DegenerateFit, "fit_rate needs finite xs and positive ys");
        mx += xs[i];
        my += std::log(ys[i]);
    }
    mx /= xs.size();
    my /= xs.size();
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (std::log(ys[i]) - my);
    }
    if (!(sxx > 0)) fail(ErrorCode::DegenerateFit, "fit_rate xs are all equal");
    return sxy / sxx;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t CounterRng::next() {
    ++counter_;
    return splitmix64(seed_ + 0x9e3779b97f4a7c15ULL * ((stream_ << 32) + counter_));
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

// ---- config ----

namespace {

double parse_double(const std::string& key, const std::string& v) {
    size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        fail(ErrorCode::ParseError, key + ": '" + v + "' is not a number");
    }
    if (pos != v.size() || !std::isfinite(x)) fail(ErrorCode::ParseError, key + ": '" + v + "' is not a number");
    return x;
}

long parse_long(const std::string& key, const std::string& v) {
    size_t pos = 0;
    long x;
    try {
        x = std::stol(v, &pos);
    } catch (const std::exception&) {
        fail(ErrorCode::ParseError, key + ": '" + v + "' is not an integer");
    }
    if (pos != v.size()) fail(ErrorCode::ParseError, key + ": '" + v + "' is not an integer");
    return x;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

std::vector<std::string> split(const std::string& v, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

template <class T, class F>
std::vector<T> parse_list(const std::string& key, const std::string& v, F one) {
    std::vector<T> out;
    for (const auto& s : split(v)) out.push_back(one(key, s));
    if (out.empty()) fail(ErrorCode::ParseError, key + ": empty list");
    return out;
}

template <class T>
std::string join(const std::vector<T>& v, char sep = ',') {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        if constexpr (std::is_floating_point_v<T>)
            out += fmt(v[i]);
        else if constexpr (std::is_integral_v<T>)
            out += std::to_string(v[i]);
        else
            out += v[i];
    }
    return out;
}

} // namespace

void ExperimentConfig::validate() const {
    if (families.empty() || N.empty() || sweep_alpha.empty() || sparse_N.empty() || interp_h.empty())
        fail(ErrorCode::InvalidArgument, "experiment grids must be nonempty");
    for (const auto& f : families)
        if (f != "gaussian" && f != "multiquadric") fail(ErrorCode::UsageError, "unknown kernel family '" + f + "'");
    for (long n : N)
        if (n < 1) fail(ErrorCode::InvalidArgument, "N must be positive");
    for (long n : sparse_N)
        if (n < 1) fail(ErrorCode::InvalidArgument, "N must be positive");
    if (!(hi > lo) || grid_points < 2) fail(ErrorCode::InvalidArgument, "invalid evaluation grid");
    if (!(random_hi > random_lo)) fail(ErrorCode::InvalidArgument, "invalid random-experiment domain");
    if (trials < 1 || terms < 1 || terms > 20) fail(ErrorCode::InvalidArgument, "trials >= 1 and 1 <= terms <= 20");
    if (N0 < 1 || sweep_N < 1) fail(ErrorCode::InvalidArgument, "N0 and sweep N must be positive");
    smoothness().validate();
    for (double h : interp_h)
        if (!(h > 0 && h < 1)) fail(ErrorCode::InvalidArgument, "interpolation spacings must lie in (0, 1)");
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "kernel.family") {
        families = split(v);
    } else if (key == "kernel.gaussian_alpha") {
        gaussian_alpha = parse_list<double>(key, v, parse_double);
    } else if (key == "kernel.multiquadric_alpha") {
        multiquadric_alpha = parse_list<double>(key, v, parse_double);
    } else if (key == "grid.N") {
        N = parse_list<long>(key, v, parse_long);
    } else if (key == "wavelet.nu") {
        if (v == "linear")
            nu = wavelet::NuProfile::Linear;
        else if (v == "quartic")
            nu = wavelet::NuProfile::Quartic;
        else
            fail(ErrorCode::ParseError, "wavelet.nu must be linear or quartic");
    } else if (key == "domain.lo") {
        lo = parse_double(key, v);
    } else if (key == "domain.hi") {
        hi = parse_double(key, v);
    } else if (key == "grid.points") {
        grid_points = parse_long(key, v);
    } else if (key == "rng.seed") {
        size_t pos = 0;
        try {
            seed = std::stoull(v, &pos, 0);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != v.size() || v[0] == '-') fail(ErrorCode::ParseError, "rng.seed must be a 64-bit integer");
    } else if (key == "cost.convention") {
        convention = nterm::parse_convention(v);
    } else if (key == "cost.s") {
        s = parse_double(key, v);
    } else if (key == "cost.p") {
        p = parse_double(key, v);
    } else if (key == "cost.N0") {
        N0 = parse_long(key, v);
    } else if (key == "sweep.alpha") {
        sweep_alpha = parse_list<double>(key, v, parse_double);
    } else if (key == "sweep.N") {
        sweep_N = parse_long(key, v);
    } else if (key == "sparse.N") {
        sparse_N = parse_list<long>(key, v, parse_long);
    } else if (key == "sparse.trials") {
        trials = parse_long(key, v);
    } else if (key == "sparse.terms") {
        terms = static_cast<int>(parse_long(key, v));
    } else if (key == "sparse.alpha") {
        sparse_alpha = parse_double(key, v);
    } else if (key == "sparse.lo") {
        random_lo = parse_double(key, v);
    } else if (key == "sparse.hi") {
        random_hi = parse_double(key, v);
    } else if (key == "interp.h") {
        interp_h = parse_list<double>(key, v, parse_double);
    } else if (key == "interp.p") {
        interp_p = parse_double(key, v);
    } else {
        fail(ErrorCode::UsageError, "unknown config key '" + key + "'");
    }
}

std::string ExperimentConfig::header() const {
    std::ostringstream os;
    os << "# kernel.family=" << join(families) << "\n";
    os << "# kernel.gaussian_alpha=" << join(gaussian_alpha) << "\n";
    os << "# kernel.multiquadric_alpha=" << join(multiquadric_alpha) << "\n";
    os << "# grid.N=" << join(N) << "\n";
    os << "# wavelet.nu=" << (nu == wavelet::NuProfile::Linear ? "linear" : "quartic") << "\n";
    os << "# domain.lo=" << fmt(lo) << "\n";
    os << "# domain.hi=" << fmt(hi) << "\n";
    os << "# grid.points=" << grid_points << "\n";
    os << "# rng.seed=" << seed << "\n";
    os << "# cost.convention=" << nterm::convention_name(convention) << "\n";
    os << "# cost.s=" << fmt(s) << "\n";
    os << "# cost.p=" << fmt(p) << "\n";
    os << "# cost.N0=" << N0 << "\n";
    os << "# sweep.alpha=" << join(sweep_alpha) << "\n";
    os << "# sweep.N=" << sweep_N << "\n";
    os << "# sparse.N=" << join(sparse_N) << "\n";
    os << "# sparse.trials=" << trials << "\n";
    os << "# sparse.terms=" << terms << "\n";
    os << "# sparse.alpha=" << fmt(sparse_alpha) << "\n";
    os << "# sparse.lo=" << fmt(random_lo) << "\n";
    os << "# sparse.hi=" << fmt(random_hi) << "\n";
    os << "# interp.h=" << join(interp_h) << "\n";
    os << "# interp.p=" << fmt(interp_p) << "\n";
    return os.str();
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected key=value");
        cfg.set(trim(t.substr(0, eq)), t.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, "cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

kernels::KernelSpec family_kernel(const std::string& family, double alpha) {
    if (family == "gaussian") return kernels::gaussian(alpha);
    if (family == "multiquadric") return kernels::inverse_multiquadric(alpha);
    fail(ErrorCode::UsageError, "unknown kernel family '" + family + "'");
}

// ---- experiments ----

namespace {

struct Cell {
    std::string family;
    double alpha;
    long N;
    double l1 = 0, linf = 0;
};

GridFunction sample_approximant(const approx::NTermApproximant& a, double lo, double hi, long n) {
    return sample([&](const Point& x) { return approx::eval_approximant(a, x); }, lo, hi, n);
}

void fill_cells(std::vector<Cell>& cells, const ExperimentConfig& cfg) {
    const auto band = approx::meyer_band(cfg.nu);
    const GridFunction ref = sample([&](const Point& x) { return band.eval(x); }, cfg.lo, cfg.hi, cfg.grid_points);
    // One FPhi per kernel, shared across N.
    std::vector<std::pair<std::string, double>> kernels;
    for (const auto& c : cells)
        if (std::find(kernels.begin(), kernels.end(), std::make_pair(c.family, c.alpha)) == kernels.end())
            kernels.emplace_back(c.family, c.alpha);
    for (const auto& [fam, alpha] : kernels) {
        approx::FPhi fp(band, family_kernel(fam, alpha));
        long nmax = 0;
        for (const auto& c : cells)
            if (c.family == fam && c.alpha == alpha) nmax = std::max(nmax, c.N);
        fp.reserve(1.0 / approx::t_n_spacing(nmax, 1) + 1);
        for (auto& c : cells) {
            if (c.family != fam || c.alpha != alpha) continue;
            const GridFunction g = sample_approximant(approx::t_n(fp, c.N), cfg.lo, cfg.hi, cfg.grid_points);
            c.l1 = lp_error(ref, g, 1, true);
            c.linf = lp_error(ref, g, INFINITY, true);
        }
    }
}

} // namespace

std::string run_wavelet_table(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<Cell> cells;
    for (const auto& fam : cfg.families)
        for (double a : fam == "gaussian" ? cfg.gaussian_alpha : cfg.multiquadric_alpha)
            for (long n : cfg.N) cells.push_back({fam, a, n});
    fill_cells(cells, cfg);
    std::ostringstream os;
    os << "# experiment=wavelet-table\n" << cfg.header() << "family,alpha,N,L1_rel,Linf_rel\n";
    for (const auto& c : cells)
        os << c.family << ',' << fmt(c.alpha) << ',' << c.N << ',' << fmt(c.l1) << ',' << fmt(c.linf) << '\n';
    return os.str();
}

std::string run_parameter_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<Cell> cells;
    for (double a : cfg.sweep_alpha) cells.push_back({"gaussian", a, cfg.sweep_N});
    fill_cells(cells, cfg);
    std::ostringstream os;
    os << "# experiment=sweep\n" << cfg.header() << "alpha,N,L1_rel,log_L1_rel\n";
    for (const auto& c : cells)
        os << fmt(c.alpha) << ',' << c.N << ',' << fmt(c.l1) << ',' << fmt(std::log(c.l1)) << '\n';
    return os.str();
}

wavelet::SparseExpansion random_expansion(std::uint64_t seed, long trial, int terms) {
    if (terms < 1 || terms > 20) fail(ErrorCode::InvalidArgument, "random expansions take 1..20 terms");
    CounterRng rng(seed, static_cast<std::uint64_t>(trial));
    std::set<long> used;
    std::vector<wavelet::Term> out;
    while (static_cast<int>(out.size()) < terms) {
        const long k = 1 + std::min(19L, static_cast<long>(std::floor(rng.uniform(0, 20))));
        if (!used.insert(k).second) continue;
        const int j = std::clamp(static_cast<int>(std::floor(rng.uniform(0, 5))), 0, 4);
        const double a = rng.uniform(0, 10);
        out.push_back({wavelet::cube(-j, k * (1L << j)), a});
    }
    return wavelet::make_expansion(std::move(out), true);
}

namespace {

SparseRow sparse_row(const wavelet::SparseExpansion& e, const ExperimentConfig& cfg, long N, double lo, double hi,
                     long points) {
    const auto pl = nterm::plan(e, cfg.smoothness(), N, cfg.convention, cfg.N0);
    const auto a = nterm::assemble(pl, kernels::gaussian(cfg.sparse_alpha), cfg.nu);
    const GridFunction ref = sample([&](const Point& x) { return wavelet::synthesize(e, x, cfg.nu); }, lo, hi, points);
    SparseRow r;
    r.N = N;
    r.linf_error = lp_error(ref, sample_approximant(a, lo, hi, points), INFINITY);
    for (const auto& en : pl.entries) {
        r.costs.push_back(en.cost);
        r.budgets.push_back(en.budget);
    }
    return r;
}

} // namespace

std::vector<SparseRow> sparse_rows(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<SparseRow> rows;
    const auto fixed = nterm::fixed_expansion();
    for (long n : cfg.sparse_N) {
        SparseRow r = sparse_row(fixed, cfg, n, cfg.lo, cfg.hi, cfg.grid_points);
        r.part = "fixed";
        rows.push_back(std::move(r));
    }
    // Same spacing as the main grid.
    const double step = (cfg.hi - cfg.lo) / static_cast<double>(cfg.grid_points - 1);
    const long points = static_cast<long>(std::llround((cfg.random_hi - cfg.random_lo) / step)) + 1;
    for (long t = 1; t <= cfg.trials; ++t) {
        const auto e = random_expansion(cfg.seed, t, cfg.terms);
        for (long n : cfg.sparse_N) {
            SparseRow r = sparse_row(e, cfg, n, cfg.random_lo, cfg.random_hi, points);
            r.part = "random";
            r.trial = t;
            rows.push_back(std::move(r));
        }
    }
    for (long n : cfg.sparse_N) {
        double m = 0, m2 = 0;
        long k = 0;
        for (const auto& r : rows)
            if (r.part == "random" && r.N == n) {
                m += r.linf_error;
                ++k;
            }
        m /= k;
        for (const auto& r : rows)
            if (r.part == "random" && r.N == n) m2 += (r.linf_error - m) * (r.linf_error - m);
        SparseRow s;
        s.part = "summary";
        s.N = n;
        s.linf_error = m;
        s.std_error = k > 1 ? std::sqrt(m2 / (k - 1) / k) : 0.0;
        rows.push_back(std::move(s));
    }
    return rows;
}

std::string run_sparse_experiments(const ExperimentConfig& cfg) {
    const auto rows = sparse_rows(cfg);
    std::ostringstream os;
    os << "# experiment=sparse\n" << cfg.header() << "part,trial,N,linf_error,std_error,costs,budgets\n";
    for (const auto& r : rows)
        os << r.part << ',' << r.trial << ',' << r.N << ',' << fmt(r.linf_error) << ',' << fmt(r.std_error) << ','
           << join(r.costs, ';') << ',' << join(r.budgets, ';') << '\n';
    return os.str();
}

std::string run_interp_rates(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto f = interp::rational_bump(4.0);
    std::ostringstream os;
    os << "# experiment=interp-rates\n" << cfg.header() << "# test_function=" << f.name << "\n";
    bool first = true;
    for (const auto& fam : cfg.families) {
        const auto b = interp::parse_base(fam);
        const double alpha = b == interp::CardinalBase::Gaussian ? 0.5 : 1.5;
        std::vector<interp::RateRow> rows;
        std::vector<double> xs, ys;
        for (double h : cfg.interp_h) {
            const double e = interp::interpolation_error(f, {b, alpha, h}, cfg.interp_p);
            rows.push_back({h, e});
            xs.push_back(std::log(1 / h));
            ys.push_back(e);
        }
        const double slope = xs.size() >= 2 ? -fit_rate(xs, ys) : NAN;
        std::string csv = interp::rate_csv(b, alpha, cfg.interp_p, rows, slope);
        if (!first) csv = csv.substr(csv.find('\n') + 1);
        first = false;
        os << csv;
    }
    return os.str();
}

std::string experiment_filename(const std::string& experiment, std::uint64_t seed) {
    return experiment + "_" + std::to_string(seed) + ".csv";
}

} // namespace kterm::harness
