#pragma once
// Univariate Lagrange bases on Gauss-Hermite nodes, their monomial
// coefficients, difference operators, and the sparse-grid interpolant.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "relucoll/hermite.hpp"
#include "relucoll/index_sets.hpp"
#include "relucoll/matrix.hpp"

namespace rc {

// Monomial coefficients a_0..a_n of the orthonormal H_n.
std::vector<double> hermite_monomial_coeffs(int n);

struct Deflation {
    std::vector<double> quotient;  // q with p(y) = (y - y0) q(y)
    bool bound_held = true;        // |q_k| <= sum |a| at every step
};

// Synthetic division by (y - y0).  For |y0| <= 1 the recurrence runs from the
// top coefficient down, otherwise from the constant term up.
Deflation deflate(const std::vector<double>& a, double y0);

class LagrangeBasis {
public:
    LagrangeBasis() = default;
    explicit LagrangeBasis(int m);

    int order() const { return family_.order(); }
    const NodeFamily& nodes() const { return family_; }

    // Coefficients b_0..b_m of L_{m;k}.
    const std::vector<double>& coeffs(int k) const { return coeffs_[family_.position_of(k)]; }
    const std::vector<double>& coeffs_at(std::size_t pos) const { return coeffs_[pos]; }

    // A_{m;k} = sqrt((m+1)!) prod_{k' != k} (y_k - y_k')^{-1}
    double a_factor(int k) const { return a_[family_.position_of(k)]; }

    // Product-form evaluation (stable); used by the interpolant.
    double eval(int k, double y) const { return eval_at(family_.position_of(k), y); }
    double eval_at(std::size_t pos, double y) const;
    // Horner evaluation of the monomial coefficients.
    double eval_monomial(int k, double y) const;

    bool deflation_bound_held() const { return deflation_ok_; }

private:
    NodeFamily family_;
    std::vector<std::vector<double>> coeffs_;
    std::vector<double> a_;
    std::vector<double> inv_denom_;  // prod_{k' != k} (y_k - y_k')^{-1}
    bool deflation_ok_ = true;
};

LagrangeBasis lagrange_coeffs(int m);

// Immutable bases of orders 0..max_order.
class LagrangeTable {
public:
    explicit LagrangeTable(int max_order);
    int max_order() const { return static_cast<int>(bases_.size()) - 1; }
    const LagrangeBasis& basis(int m) const;

private:
    std::vector<LagrangeBasis> bases_;
};

// Sampler for X-valued functions of a dense parameter vector.
using Sampler = std::function<std::vector<double>(const std::vector<double>&)>;
using UnivariateSampler = std::function<std::vector<double>(double)>;

// Coefficients of I_m(v) - I_{m-1}(v): result[l] is the X-vector multiplying y^l.
std::vector<std::vector<double>> delta_op(const LagrangeTable& table, int m, const UnivariateSampler& v);

// Monomial-coefficient matrix of I_m(v).
std::vector<std::vector<double>> interp_op(const LagrangeTable& table, int m, const UnivariateSampler& v);

std::vector<double> eval_poly(const std::vector<std::vector<double>>& coeffs, double y);

class SparseInterpolant {
public:
    SparseInterpolant(std::shared_ptr<const CollocationPlan> plan, Mat point_values);

    const CollocationPlan& plan() const { return *plan_; }
    std::shared_ptr<const CollocationPlan> plan_ptr() const { return plan_; }
    const Mat& point_values() const { return values_; }
    std::size_t value_dim() const { return values_.cols; }
    std::size_t input_dim() const { return static_cast<std::size_t>(plan_->m_active); }
    // Dimension of the truncation box B^m_omega.
    std::size_t box_dim() const { return std::max<std::size_t>(1, input_dim()); }

    // Signed sum over triples; extra coordinates of y are ignored.
    std::vector<double> evaluate(std::span<const double> y) const;
    // Per-point weights w_p with I(y) = sum_p w_p v(y_p).
    std::vector<double> point_weights(std::span<const double> y) const;

    // Zero outside the closed box [-2 sqrt(omega), 2 sqrt(omega)]^m.
    std::vector<double> evaluate_truncated(std::span<const double> y, double omega) const;
    bool inside_box(std::span<const double> y, double omega) const;

private:
    std::shared_ptr<const CollocationPlan> plan_;
    Mat values_;
    std::shared_ptr<const LagrangeTable> table_;
    // Flattened per-coordinate basis-value layout.
    std::vector<int> max_order_;             // per coordinate (1-based index - 1)
    std::vector<std::size_t> coord_offset_;  // start of coordinate j's block
    std::vector<std::vector<std::size_t>> order_offset_;
    std::size_t table_size_ = 0;
    std::vector<std::uint32_t> lookup_;      // flattened per-triple table slots
    std::vector<std::uint32_t> lookup_start_;
};

// One sample per distinct grid point, evaluated through parallel_for.
// Sampler failures are rethrown as NumericError naming the grid point.
SparseInterpolant sparse_interpolate(std::shared_ptr<const CollocationPlan> plan, const Sampler& sampler,
                                     int threads = 1);

// Samples for every grid point of a plan (dense coordinates 1..m_active).
Mat sample_points(const CollocationPlan& plan, const Sampler& sampler, int threads = 1);

}  // namespace rc
