#include "relucoll/hermite.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "relucoll/errors.hpp"

namespace rc {

HermiteBasis::HermiteBasis(int max_degree) : max_degree_(max_degree) {
    if (max_degree < 0) throw DomainError("HermiteBasis: negative max_degree");
    sqrt_int_.resize(static_cast<std::size_t>(max_degree) + 2);
    for (std::size_t k = 0; k < sqrt_int_.size(); ++k) sqrt_int_[k] = std::sqrt(static_cast<double>(k));
}

void HermiteBasis::eval_upto(int n, double y, double* out) const {
    if (n > max_degree_)
        throw CapacityError("hermite degree " + std::to_string(n) + " exceeds cache limit " +
                            std::to_string(max_degree_));
    if (n < 0) return;
    out[0] = 1.0;
    if (n == 0) return;
    out[1] = y;
    for (int k = 1; k < n; ++k) out[k + 1] = (y * out[k] - sqrt_int_[k] * out[k - 1]) / sqrt_int_[k + 1];
}

double HermiteBasis::eval(int k, double y) const {
    if (k > max_degree_)
        throw CapacityError("hermite degree " + std::to_string(k) + " exceeds cache limit " +
                            std::to_string(max_degree_));
    if (k < 0) throw DomainError("hermite degree must be non-negative");
    double hm1 = 1.0, h = y;
    if (k == 0) return 1.0;
    for (int j = 1; j < k; ++j) {
        const double next = (y * h - sqrt_int_[j] * hm1) / sqrt_int_[j + 1];
        hm1 = h;
        h = next;
    }
    return h;
}

double HermiteBasis::derivative(int n, double y) const {
    if (n == 0) return 0.0;
    return std::sqrt(static_cast<double>(n)) * eval(n - 1, y);
}

double hermite_eval(int k, double y) {
    static const HermiteBasis basis;
    return basis.eval(k, y);
}

double log_gaussian_density(std::span<const double> y) {
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    double acc = 0.0;
    for (double v : y) acc += -0.5 * v * v - half_log_2pi;
    return acc;
}

double gaussian_density(std::span<const double> y) { return std::exp(log_gaussian_density(y)); }

NodeFamily::NodeFamily(int m, std::vector<double> sorted_nodes) : m_(m), nodes_(std::move(sorted_nodes)) {
    if (m < 0 || nodes_.size() != static_cast<std::size_t>(m) + 1)
        throw DomainError("NodeFamily: order and node count disagree");
}

int NodeFamily::min_index() const { return -static_cast<int>((m_ + 1) / 2); }
int NodeFamily::max_index() const { return static_cast<int>((m_ + 1) / 2); }

int NodeFamily::index_at(std::size_t pos) const {
    const int p = static_cast<int>(pos);
    if (m_ % 2 == 0) return p - m_ / 2;
    const int j = (m_ + 1) / 2;
    return p < j ? p - j : p - j + 1;
}

std::size_t NodeFamily::position_of(int k) const {
    if (m_ % 2 == 0) {
        const int half = m_ / 2;
        if (k < -half || k > half) throw DomainError("node index outside pi_m");
        return static_cast<std::size_t>(k + half);
    }
    const int j = (m_ + 1) / 2;
    if (k == 0 || k < -j || k > j) throw DomainError("node index outside pi_m");
    return static_cast<std::size_t>(k < 0 ? k + j : k + j - 1);
}

NodeFamily gauss_hermite_nodes(int m) {
    if (m < 0) throw DomainError("gauss_hermite_nodes: negative order");
    const int n = m + 1;
    if (n == 1) return NodeFamily(0, {0.0});

    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericError("Jacobi eigen-solver did not converge for order " + std::to_string(m));

    std::vector<double> x(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    std::sort(x.begin(), x.end());

    HermiteBasis basis(std::max(n, HermiteBasis::kDefaultMaxDegree));
    for (double& r : x) {
        const double d = basis.derivative(n, r);
        if (d != 0.0) r -= basis.eval(n, r) / d;
    }
    std::sort(x.begin(), x.end());

    for (int i = 0; i < n / 2; ++i) {
        const double v = 0.5 * (x[n - 1 - i] - x[i]);
        x[i] = -v;
        x[n - 1 - i] = v;
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
    return NodeFamily(m, std::move(x));
}

std::vector<double> gauss_hermite_weights(const NodeFamily& family) {
    // w_i proportional to 1 / (n * H_{n-1}(x_i)^2) for the orthonormal family.
    const int n = static_cast<int>(family.size());
    HermiteBasis basis(std::max(n, HermiteBasis::kDefaultMaxDegree));
    std::vector<double> w(family.size());
    double total = 0.0;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const double h = basis.eval(n - 1, family.nodes()[i]);
        w[i] = 1.0 / (static_cast<double>(n) * h * h);
        total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
}

NodeTable::NodeTable(int max_order) {
    if (max_order < 0) throw DomainError("NodeTable: negative order");
    families_.reserve(static_cast<std::size_t>(max_order) + 1);
    for (int m = 0; m <= max_order; ++m) families_.push_back(gauss_hermite_nodes(m));
}

const NodeFamily& NodeTable::family(int m) const {
    if (m < 0 || m > max_order())
        throw CapacityError("node order " + std::to_string(m) + " not in table (max " +
                            std::to_string(max_order()) + ")");
    return families_[static_cast<std::size_t>(m)];
}

double hermite_tensor_eval(const MultiIndex& s, std::span<const double> y) {
    if (s.max_coordinate() > y.size())
        throw DomainError("hermite_tensor_eval: point has " + std::to_string(y.size()) +
                          " coordinates, index needs " + std::to_string(s.max_coordinate()));
    double p = 1.0;
    for (const auto& [j, v] : s.entries()) p *= hermite_eval(static_cast<int>(v), y[j - 1]);
    return p;
}

}  // namespace rc
