#include "relucoll/fem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "relucoll/errors.hpp"

namespace rc {

double PsiFamily::eval(int j, double at) const {
    if (j < 1 || j > count()) throw DomainError("psi index " + std::to_string(j) + " out of range");
    if (kind == Kind::Sine) return c * std::pow(static_cast<double>(j), -alpha) * std::sin(j * std::numbers::pi * at);
    const auto& v = values[static_cast<std::size_t>(j - 1)];
    if (at <= x.front()) return v.front();
    if (at >= x.back()) return v.back();
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double t = (at - x[i - 1]) / (x[i] - x[i - 1]);
    return (1.0 - t) * v[i - 1] + t * v[i];
}

PsiFamily PsiFamily::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("problem.psi.file: cannot open " + path);
    PsiFamily p;
    p.kind = Kind::Table;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("problem.psi.file: empty file");
    std::size_t cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    if (cols < 2) throw ConfigError("problem.psi.file: need columns x,psi1,...");
    p.values.assign(cols - 1, {});
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("problem.psi.file: bad number on line " + std::to_string(lineno));
            }
        }
        if (row.size() != cols) throw ConfigError("problem.psi.file: wrong column count on line " + std::to_string(lineno));
        if (!p.x.empty() && !(row[0] > p.x.back()))
            throw ConfigError("problem.psi.file: x must be strictly increasing (line " + std::to_string(lineno) + ")");
        p.x.push_back(row[0]);
        for (std::size_t j = 1; j < cols; ++j) p.values[j - 1].push_back(row[j]);
    }
    if (p.x.size() < 2) throw ConfigError("problem.psi.file: need at least two rows");
    p.dims = static_cast<int>(p.values.size());
    return p;
}

void LognormalProblem::validate() const {
    if (mesh_n < 3) throw DomainError("problem.mesh_n must be at least 3");
    if (psi.kind == PsiFamily::Kind::Sine) {
        if (!(psi.alpha > 1.0)) throw DomainError("problem.psi.alpha must exceed 1");
        if (psi.dims < 1) throw DomainError("problem.psi.dims must be positive");
    }
    if (!f) throw DomainError("problem.f is missing");
}

FemSolver::FemSolver(LognormalProblem problem) : p_(std::move(problem)) {
    p_.validate();
    const int ne = p_.elements();
    const double h = p_.h();
    psi_mid_.assign(static_cast<std::size_t>(p_.psi.count()), std::vector<double>(static_cast<std::size_t>(ne)));
    for (int j = 1; j <= p_.psi.count(); ++j)
        for (int e = 0; e < ne; ++e) psi_mid_[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(e)] = p_.psi.eval(j, (e + 0.5) * h);
    load_.resize(static_cast<std::size_t>(p_.mesh_n));
    for (int i = 1; i <= p_.mesh_n; ++i) load_[static_cast<std::size_t>(i - 1)] = h * p_.f(i * h);
}

std::vector<double> FemSolver::coefficient(std::span<const double> y, bool* capped) const {
    const std::size_t ne = static_cast<std::size_t>(p_.elements());
    std::vector<double> b(ne, 0.0);
    const std::size_t J = std::min(y.size(), psi_mid_.size());
    for (std::size_t j = 0; j < J; ++j) {
        if (!std::isfinite(y[j])) throw DomainError("assemble_coefficient: non-finite parameter y_" + std::to_string(j + 1));
        if (y[j] == 0.0) continue;
        for (std::size_t e = 0; e < ne; ++e) b[e] += y[j] * psi_mid_[j][e];
    }
    bool hit = false;
    std::vector<double> a(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        a[e] = std::exp(b[e]);
        if (!(a[e] <= kCoefficientCap)) {
            a[e] = kCoefficientCap;
            hit = true;
        }
    }
    if (capped) *capped = hit;
    return a;
}

FemSolution FemSolver::solve_with_coefficient(const std::vector<double>& a) const {
    const std::size_t n = static_cast<std::size_t>(p_.mesh_n);
    const double h = p_.h();
    if (a.size() != n + 1) throw DomainError("fem_solve: one coefficient per element required");
    std::vector<double> diag(n), off(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(a[i] > 0.0) || !(a[i + 1] > 0.0)) throw NumericError("fem_solve: non-positive coefficient");
        diag[i] = (a[i] + a[i + 1]) / h;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) off[i] = -a[i + 1] / h;

    // Thomas algorithm on the symmetric tridiagonal system.
    std::vector<double> c(n), d(n);
    double denom = diag[0];
    if (denom == 0.0) throw NumericError("fem_solve: singular system");
    c[0] = n > 1 ? off[0] / denom : 0.0;
    d[0] = load_[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - off[i - 1] * c[i - 1];
        if (denom == 0.0) throw NumericError("fem_solve: singular system");
        c[i] = i + 1 < n ? off[i] / denom : 0.0;
        d[i] = (load_[i] - off[i - 1] * d[i - 1]) / denom;
    }
    FemSolution sol;
    sol.h = h;
    sol.nodal.assign(n + 2, 0.0);
    sol.nodal[n] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) sol.nodal[i + 1] = d[i] - c[i] * sol.nodal[i + 2];

    double res = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = diag[i] * sol.nodal[i + 1] - load_[i];
        if (i > 0) r += off[i - 1] * sol.nodal[i];
        if (i + 1 < n) r += off[i] * sol.nodal[i + 2];
        res = std::max(res, std::abs(r));
        scale = std::max(scale, std::abs(load_[i]) + diag[i] * std::abs(sol.nodal[i + 1]));
    }
    if (scale > 0.0 && res > 1e-10 * scale) throw NumericError("fem_solve: residual check failed");
    sol.energy_norm = h1_seminorm(sol.nodal, h);
    return sol;
}

FemSolution FemSolver::solve(std::span<const double> y) const {
    bool capped = false;
    const auto a = coefficient(y, &capped);
    FemSolution s = solve_with_coefficient(a);
    s.coefficient_capped = capped;
    return s;
}

std::vector<double> assemble_coefficient(const LognormalProblem& problem, std::span<const double> y) {
    return FemSolver(problem).coefficient(y);
}

FemSolution fem_solve(const LognormalProblem& problem, std::span<const double> y) { return FemSolver(problem).solve(y); }

double h1_seminorm(std::span<const double> nodal, double h) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < nodal.size(); ++i) {
        const double g = (nodal[i + 1] - nodal[i]) / h;
        acc += g * g * h;
    }
    return std::sqrt(acc);
}

double solution_norm(const FemSolution& u) { return h1_seminorm(u.nodal, u.h); }

std::vector<double> restrict_nodal(std::span<const double> fine, int factor) {
    if (factor < 1 || (fine.size() - 1) % static_cast<std::size_t>(factor) != 0)
        throw DomainError("restrict_nodal: mesh sizes are not nested");
    std::vector<double> out;
    for (std::size_t i = 0; i < fine.size(); i += static_cast<std::size_t>(factor)) out.push_back(fine[i]);
    return out;
}

LognormalProblem refined(const LognormalProblem& p, int factor) {
    LognormalProblem r = p;
    r.mesh_n = factor * (p.mesh_n + 1) - 1;
    return r;
}

}  // namespace rc
