#include "kterm/nterm.hpp"

#include "kterm/error.hpp"
#include "kterm/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

namespace kterm::nterm {

void SmoothnessParams::validate() const {
    if (!(s > 0) || !std::isfinite(s)) fail(ErrorCode::InvalidArgument, "smoothness s must be positive");
    if (!(p >= 1) || !std::isfinite(p)) fail(ErrorCode::InvalidArgument, "p must lie in [1, inf)");
    if (d < 1 || d > 2) fail(ErrorCode::UnsupportedDim, "only d = 1 and d = 2 are supported");
}

const char* convention_name(CostConvention c) {
    return c == CostConvention::Definition ? "definition" : "section-eight";
}

CostConvention parse_convention(const std::string& s) {
    if (s == "definition") return CostConvention::Definition;
    if (s == "section-eight" || s == "section8") return CostConvention::SectionEight;
    fail(ErrorCode::UsageError, "unknown cost convention '" + s + "'");
}

long BudgetPlan::total_budget() const {
    long t = 0;
    for (const auto& e : entries) t += e.budget;
    return t;
}

std::string BudgetPlan::to_csv() const {
    std::ostringstream os;
    const bool two = !entries.empty() && entries.front().cube.dim == 2;
    os << (two ? "m,n1,n2,coeff,cost,budget\n" : "m,n,coeff,cost,budget\n");
    char buf[256];
    for (const auto& e : entries) {
        if (two)
            std::snprintf(buf, sizeof buf, "%d,%ld,%ld,%.12g,%.12g,%ld\n", e.cube.m, e.cube.n[0], e.cube.n[1], e.coeff,
                          e.cost, e.budget);
        else
            std::snprintf(buf, sizeof buf, "%d,%ld,%.12g,%.12g,%ld\n", e.cube.m, e.cube.n[0], e.coeff, e.cost, e.budget);
        os << buf;
    }
    return os.str();
}

namespace {

void require_disjoint(const wavelet::SparseExpansion& e, const SmoothnessParams& sp) {
    sp.validate();
    if (!e.disjoint) fail(ErrorCode::NotDisjoint, "expansion is not flagged disjoint");
    e.validate();
    if (!e.terms.empty() && e.dim() != sp.d) fail(ErrorCode::ShapeMismatch, "expansion dimension differs from d");
}

} // namespace

double partial_max_sup(const wavelet::DyadicCube& cube, double coeff, const SmoothnessParams& sp) {
    return std::pow(cube.volume(), -sp.s / sp.d) * std::fabs(coeff);
}

std::vector<double> cost_weights(const wavelet::SparseExpansion& e, const SmoothnessParams& sp) {
    require_disjoint(e, sp);
    const double tau = sp.tau();
    std::vector<double> w;
    w.reserve(e.terms.size());
    for (const auto& t : e.terms) w.push_back(std::pow(std::fabs(t.coeff), tau) * std::pow(t.cube.volume(), tau / sp.p));
    return w;
}

double tl_seminorm_disjoint(const wavelet::SparseExpansion& e, const SmoothnessParams& sp) {
    double s = 0.0;
    for (double w : cost_weights(e, sp)) s += w;
    return std::pow(s, 1.0 / sp.tau());
}

std::vector<double> costs(const wavelet::SparseExpansion& e, const SmoothnessParams& sp, long N, CostConvention conv) {
    if (N < 0) fail(ErrorCode::InvalidArgument, "budget N must be nonnegative");
    if (e.terms.empty()) fail(ErrorCode::EmptyExpansion, "cost distribution of an empty expansion");
    const std::vector<double> w = cost_weights(e, sp);
    double sum = 0.0;
    for (double v : w) sum += v;
    if (!(sum > 0)) fail(ErrorCode::DomainError, "all coefficients vanish");
    const double denom = conv == CostConvention::Definition ? sum : std::pow(sum, 1.0 / sp.tau());
    std::vector<double> c;
    c.reserve(w.size());
    for (double v : w) c.push_back(static_cast<double>(N) * (v / denom));
    return c;
}

std::vector<long> budgets(const std::vector<double>& costs, long N0) {
    std::vector<long> b;
    b.reserve(costs.size());
    for (double c : costs) {
        if (!std::isfinite(c) || c < 0) fail(ErrorCode::InvalidArgument, "costs must be finite and nonnegative");
        const long f = static_cast<long>(std::floor(c + 1e-12 * std::max(1.0, c)));
        b.push_back(f >= N0 ? f : 0);
    }
    return b;
}

BudgetPlan plan(const wavelet::SparseExpansion& e, const SmoothnessParams& sp, long N, CostConvention conv, long N0) {
    const std::vector<double> c = costs(e, sp, N, conv);
    const std::vector<long> b = budgets(c, N0);
    BudgetPlan pl;
    pl.N = N;
    pl.N0 = N0;
    for (size_t i = 0; i < c.size(); ++i) pl.entries.push_back({e.terms[i].cube, e.terms[i].coeff, c[i], b[i]});
    return pl;
}

long min_useful_budget(int dim) { return approx::band_floor(wavelet::kBandRadius, dim); }

approx::NTermApproximant assemble(const BudgetPlan& plan, const kernels::KernelSpec& k, wavelet::NuProfile nu) {
    approx::NTermApproximant out;
    out.dim = k.dim;
    out.budget = plan.N;
    if (plan.entries.empty()) return out;
    for (const auto& e : plan.entries)
        if (e.cube.dim != k.dim) fail(ErrorCode::ShapeMismatch, "cube and kernel dimensions differ");
    const long floor_n = min_useful_budget(k.dim);
    approx::FPhi fp(approx::meyer_band(nu, k.dim), k);
    std::vector<approx::NTermApproximant> parts(plan.entries.size());
    parallel_for(parts.size(), [&](size_t i) {
        const auto& e = plan.entries[i];
        if (e.budget < floor_n || e.coeff == 0.0) return;
        approx::NTermApproximant a = approx::materialize(approx::affine_image(approx::t_n(fp, e.budget), e.cube));
        for (auto& at : a.atoms) at.weight *= e.coeff;
        parts[i] = std::move(a);
    });
    for (auto& p : parts)
        for (auto& at : p.atoms) out.atoms.push_back(std::move(at));
    return out;
}

wavelet::SparseExpansion fixed_expansion() {
    const double a[7] = {9.45, 4.91, 4.89, 3.38, 9.00, 3.69, 1.11};
    const int j[7] = {3, 1, 1, 2, 0, 0, 4};
    std::vector<wavelet::Term> terms;
    for (int i = 0; i < 7; ++i) {
        const long k = i - 3;
        terms.push_back({wavelet::cube(-j[i], k * (1L << j[i])), a[i]});
    }
    return wavelet::make_expansion(std::move(terms), true);
}

} // namespace kterm::nterm
