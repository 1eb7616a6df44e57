#include "kterm/wavelet.hpp"

#include "kterm/error.hpp"
#include "kterm/specfun.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace kterm::wavelet {

using std::numbers::pi;

namespace {

constexpr double kPoleRadius = 1e-6;

// (sin(a u) - sin(b u)) / (2 pi u)
double sin_term(double a, double b, double u) {
    if (std::fabs(u) < kPoleRadius) {
        const double u2 = u * u;
        return ((a - b) - (a * a * a - b * b * b) * u2 / 6 + (std::pow(a, 5) - std::pow(b, 5)) * u2 * u2 / 120) /
               (2 * pi);
    }
    return (std::sin(a * u) - std::sin(b * u)) / (2 * pi * u);
}

// (cos(a u) - cos(b u)) / (2 pi u)
double cos_term(double a, double b, double u) {
    if (std::fabs(u) < kPoleRadius) {
        const double u2 = u * u;
        return (-(a * a - b * b) * u / 2 + (std::pow(a, 4) - std::pow(b, 4)) * u * u2 / 24 -
                (std::pow(a, 6) - std::pow(b, 6)) * u * u2 * u2 / 720) /
               (2 * pi);
    }
    return (std::cos(a * u) - std::cos(b * u)) / (2 * pi * u);
}

double magnitude(double xi, NuProfile p) {
    const double a = std::fabs(xi);
    if (a < 2 * pi / 3 || a > 8 * pi / 3) return 0.0;
    if (a <= 4 * pi / 3) return std::sin(0.5 * pi * nu(3 * a / (2 * pi) - 1, p));
    return std::cos(0.5 * pi * nu(3 * a / (4 * pi) - 1, p));
}

} // namespace

std::vector<double> seams() {
    return {-8 * pi / 3, -4 * pi / 3, -2 * pi / 3, 2 * pi / 3, 4 * pi / 3, 8 * pi / 3};
}

double nu(double x, NuProfile p) {
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    if (p == NuProfile::Linear) return x;
    const double x2 = x * x;
    return x2 * x2 * (35 - 84 * x + 70 * x2 - 20 * x2 * x);
}

std::complex<double> meyer_hat(double xi, NuProfile p) {
    const double m = magnitude(xi, p);
    if (m == 0.0) return {0.0, 0.0};
    return std::polar(m, 0.5 * xi);
}

double meyer_time(double x) {
    const double a = 2 * pi / 3, b = 4 * pi / 3, c = 8 * pi / 3;
    return sin_term(a, b, x + 1.25) + sin_term(a, b, x - 0.25) + cos_term(c, b, x + 0.125) +
           cos_term(b, c, x + 0.875);
}

double meyer_time_numeric(double x, NuProfile p) {
    // psi(x) = (1/pi) int_{2pi/3}^{8pi/3} |psi^(xi)| cos(xi (x + 1/2)) dxi
    specfun::QuadratureSpec q{1e-14, 1e-12, 4000};
    const double v = specfun::integrate([&](double xi) { return magnitude(xi, p) * std::cos(xi * (x + 0.5)); },
                                        {2 * pi / 3, 4 * pi / 3, 8 * pi / 3}, q);
    return v / pi;
}

double meyer(double x, NuProfile p) { return p == NuProfile::Linear ? meyer_time(x) : meyer_time_numeric(x, p); }

double DyadicCube::side() const { return std::ldexp(1.0, m); }

Point DyadicCube::corner() const {
    const double l = side();
    return dim == 1 ? Point(l * n[0]) : Point(l * n[0], l * n[1]);
}

double DyadicCube::volume() const { return std::ldexp(1.0, m * dim); }

bool DyadicCube::interiors_overlap(const DyadicCube& o) const {
    if (dim != o.dim) fail(ErrorCode::ShapeMismatch, "cubes of different dimension");
    for (int i = 0; i < dim; ++i) {
        const double a0 = std::ldexp(static_cast<double>(n[i]), m), a1 = std::ldexp(static_cast<double>(n[i] + 1), m);
        const double b0 = std::ldexp(static_cast<double>(o.n[i]), o.m),
                     b1 = std::ldexp(static_cast<double>(o.n[i] + 1), o.m);
        if (a1 <= b0 || b1 <= a0) return false;
    }
    return true;
}

DyadicCube cube(int m, long n) { return DyadicCube{m, {n, 0}, 1}; }
DyadicCube cube(int m, long n1, long n2) { return DyadicCube{m, {n1, n2}, 2}; }

double psi_I(const Point& x, const DyadicCube& I, NuProfile p) {
    if (x.dim != I.dim) fail(ErrorCode::ShapeMismatch, "point and cube dimensions differ");
    const double l = I.side();
    const Point c = I.corner();
    double v = 1.0;
    for (int i = 0; i < I.dim; ++i) v *= meyer((x[i] - c[i]) / l, p);
    return v;
}

void SparseExpansion::validate() const {
    const int d = dim();
    for (const auto& t : terms) {
        if (!std::isfinite(t.coeff)) fail(ErrorCode::InvalidArgument, "non-finite expansion coefficient");
        if (t.cube.dim != d || d < 1 || d > 2) fail(ErrorCode::ShapeMismatch, "mixed or unsupported cube dimensions");
    }
    if (!disjoint) return;
    for (size_t i = 0; i < terms.size(); ++i)
        for (size_t j = i + 1; j < terms.size(); ++j)
            if (terms[i].cube.interiors_overlap(terms[j].cube))
                fail(ErrorCode::NotDisjoint, "expansion flagged disjoint has overlapping cubes " + std::to_string(i) +
                                                 " and " + std::to_string(j));
}

SparseExpansion make_expansion(std::vector<Term> terms, bool disjoint) {
    SparseExpansion e{std::move(terms), disjoint};
    e.validate();
    return e;
}

double synthesize(const SparseExpansion& e, const Point& x, NuProfile p) {
    double s = 0.0;
    for (const auto& t : e.terms) s += t.coeff * psi_I(x, t.cube, p);
    return s;
}

std::string to_csv(const SparseExpansion& e) {
    std::ostringstream os;
    os << "# disjoint=" << (e.disjoint ? "true" : "false") << "\n";
    os << (e.dim() == 1 ? "m,n,coeff\n" : "m,n1,n2,coeff\n");
    char buf[64];
    for (const auto& t : e.terms) {
        std::snprintf(buf, sizeof buf, "%.17g", t.coeff);
        os << t.cube.m << "," << t.cube.n[0];
        if (t.cube.dim == 2) os << "," << t.cube.n[1];
        os << "," << buf << "\n";
    }
    return os.str();
}

SparseExpansion parse_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    SparseExpansion e;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("disjoint=true") != std::string::npos) e.disjoint = true;
            continue;
        }
        if (line.rfind("m,", 0) == 0) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        try {
            size_t used = 0;
            Term t{};
            if (f.size() == 3) {
                t.cube = cube(std::stoi(f[0]), std::stol(f[1]));
                t.coeff = std::stod(f[2], &used);
            } else if (f.size() == 4) {
                t.cube = cube(std::stoi(f[0]), std::stol(f[1]), std::stol(f[2]));
                t.coeff = std::stod(f[3], &used);
            } else {
                fail(ErrorCode::ParseError, "expansion line " + std::to_string(lineno) + " has " +
                                                std::to_string(f.size()) + " fields");
            }
            e.terms.push_back(t);
        } catch (const std::logic_error&) {
            fail(ErrorCode::ParseError, "cannot parse expansion line " + std::to_string(lineno) + ": " + line);
        }
    }
    e.validate();
    return e;
}

} // namespace kterm::wavelet
