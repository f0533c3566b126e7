#pragma once
// Piecewise-linear Galerkin solver for -(a(y,x) u')' = f on (0,1) with
// u(0) = u(1) = 0 and a(y,x) = exp(sum_j y_j psi_j(x)).

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rc {

struct PsiFamily {
    enum class Kind { Sine, Table };
    Kind kind = Kind::Sine;
    // Sine family: psi_j(x) = c j^{-alpha} sin(j pi x), j = 1..dims.
    double c = 0.4;
    double alpha = 2.0;
    int dims = 20;
    // Table family: psi_j sampled at increasing x, interpolated linearly.
    std::vector<double> x;
    std::vector<std::vector<double>> values;  // values[j-1][i]

    double eval(int j, double at) const;
    int count() const { return kind == Kind::Sine ? dims : static_cast<int>(values.size()); }

    // CSV with header "x,psi1,...,psiJ".
    static PsiFamily from_csv(const std::string& path);
};

struct LognormalProblem {
    int mesh_n = 63;  // interior nodes
    std::function<double(double)> f = [](double) { return 1.0; };
    std::string f_text = "one";
    PsiFamily psi;

    double h() const { return 1.0 / (mesh_n + 1); }
    int elements() const { return mesh_n + 1; }
    void validate() const;
};

constexpr double kCoefficientCap = 1e300;

struct FemSolution {
    double h = 0.0;
    std::vector<double> nodal;  // mesh_n + 2 values, boundary entries are 0
    double energy_norm = 0.0;
    bool coefficient_capped = false;
};

// Precomputes psi at element midpoints and the load vector.
class FemSolver {
public:
    explicit FemSolver(LognormalProblem problem);

    const LognormalProblem& problem() const { return p_; }
    std::size_t value_dim() const { return static_cast<std::size_t>(p_.mesh_n) + 2; }

    // a at element midpoints; y[j-1] multiplies psi_j, missing entries are 0.
    std::vector<double> coefficient(std::span<const double> y, bool* capped = nullptr) const;
    FemSolution solve(std::span<const double> y) const;
    FemSolution solve_with_coefficient(const std::vector<double>& a) const;

private:
    LognormalProblem p_;
    std::vector<std::vector<double>> psi_mid_;  // psi_mid_[j][e]
    std::vector<double> load_;
};

std::vector<double> assemble_coefficient(const LognormalProblem& problem, std::span<const double> y);
FemSolution fem_solve(const LognormalProblem& problem, std::span<const double> y);

// Discrete H^1_0 seminorm sqrt(sum_e ((u_{i+1} - u_i)/h)^2 h) of a nodal vector.
double h1_seminorm(std::span<const double> nodal, double h);
double solution_norm(const FemSolution& u);

// Samples a fine nodal vector at the nodes of a mesh `factor` times coarser.
std::vector<double> restrict_nodal(std::span<const double> fine, int factor);

// The same problem with `factor` times as many elements.
LognormalProblem refined(const LognormalProblem& p, int factor);

}  // namespace rc
