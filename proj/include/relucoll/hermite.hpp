#pragma once
// Orthonormal probabilists' Hermite polynomials under the standard Gaussian
// measure, Gauss-Hermite node families, and tensorized evaluation.

#include <cstddef>
#include <span>
#include <vector>

#include "relucoll/multi_index.hpp"

namespace rc {

// H_k with the normalization  int H_k^2 g = 1.  Evaluation is by forward
// recurrence; degrees above max_degree raise CapacityError.
class HermiteBasis {
public:
    static constexpr int kDefaultMaxDegree = 128;

    explicit HermiteBasis(int max_degree = kDefaultMaxDegree);

    int max_degree() const { return max_degree_; }

    double eval(int k, double y) const;

    // Writes H_0(y) .. H_n(y) into out[0..n].
    void eval_upto(int n, double y, double* out) const;

    // H_n'(y) = sqrt(n) H_{n-1}(y).
    double derivative(int n, double y) const;

private:
    int max_degree_;
    std::vector<double> sqrt_int_;  // sqrt(k) for k = 0..max_degree+1
};

double hermite_eval(int k, double y);

// prod_j g(y_j), accumulated in log-space.
double gaussian_density(std::span<const double> y);
double log_gaussian_density(std::span<const double> y);

// The m+1 roots of H_{m+1}, sorted, indexed by the signed set pi_m:
//   m = 2j     ->  k in {-j, ..., j}
//   m = 2j - 1 ->  k in {-j, ..., -1, 1, ..., j}
class NodeFamily {
public:
    NodeFamily() = default;
    NodeFamily(int m, std::vector<double> sorted_nodes);

    int order() const { return m_; }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<double>& nodes() const { return nodes_; }

    // Signed index of the i-th node in sorted order, and its inverse.
    int index_at(std::size_t pos) const;
    std::size_t position_of(int k) const;
    double at(int k) const { return nodes_[position_of(k)]; }

    int min_index() const;
    int max_index() const;

private:
    int m_ = 0;
    std::vector<double> nodes_;
};

// Golub-Welsch on the Jacobi matrix of the orthonormal recurrence, one Newton
// polish step per root, then exact symmetrization.  Throws NumericError with
// the order if the eigen-solver does not converge.
NodeFamily gauss_hermite_nodes(int m);

// Quadrature weights matching gauss_hermite_nodes(m), normalized to sum 1.
std::vector<double> gauss_hermite_weights(const NodeFamily& family);

// Immutable table of node families of orders 0..max_order.
class NodeTable {
public:
    explicit NodeTable(int max_order);
    int max_order() const { return static_cast<int>(families_.size()) - 1; }
    const NodeFamily& family(int m) const;
    double node(int m, int k) const { return family(m).at(k); }

private:
    std::vector<NodeFamily> families_;
};

// prod_{j in supp s} H_{s_j}(y_j); coordinates are 1-based, y[j-1] is y_j.
double hermite_tensor_eval(const MultiIndex& s, std::span<const double> y);

}  // namespace rc
