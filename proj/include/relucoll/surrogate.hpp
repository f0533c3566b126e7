#pragma once
// Compilation of the truncated sparse-grid interpolant into ReLU networks:
// per-triple networks phi_{s-e;k}, the accuracy delta, and the X-valued
// surrogate Phi(y) = sum_G (-1)^{|e|} v(y_{s-e;k}) phi_{s-e;k}(y).

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "relucoll/index_sets.hpp"
#include "relucoll/lagrange.hpp"
#include "relucoll/matrix.hpp"
#include "relucoll/network.hpp"

namespace rc {

// Smallest accuracy a double-precision network can certify.
constexpr double kDeltaFloor = 0x1p-40;
constexpr double kDeltaCeil = 0.5;

// K with sum_k (2 pi)^{1/4} exp(y_{s;k}^2 / 4) <= e^{K s} for 1 <= s <= max_order,
// which bounds sum_k |H_{s'}(y_{s;k})| uniformly in s'.
double fit_node_sum_constant(int max_order);

struct DeltaInfo {
    double log_inv_delta = 0.0;  // log of the closed-form delta^{-1}
    double delta_formula = 1.0;  // exp(-log_inv_delta), may underflow to 0
    double delta = 0.5;          // value actually used, clamped into [floor, 1/2]
    double K = 0.0;
    bool clamped = false;
};

DeltaInfo compute_delta(const CollocationPlan& plan, double omega, double K);

// Per-coordinate factor of a monomial component: exponent 0 means a phi_0
// factor on that coordinate, e > 0 means phi_1 repeated e times.
using ComponentKey = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

// prod over the key of phi(y_j / (4 sqrt omega)) within delta; exactly zero
// once any keyed coordinate leaves [-8 sqrt omega, 8 sqrt omega].
ReluNetwork component_network(const ComponentKey& key, std::size_t input_dim, double omega, double delta);

// The scale 1/(4 sqrt omega), rounded up so that the support bound is exact.
double input_scale(double omega);

// phi_{s-e;k}: parallelization of the components with coefficients
// b_l (4 sqrt omega)^{|l|_1}.  k is aligned with the support of s_minus_e;
// fallback_coord carries the constant gadget when s_minus_e = 0.
ReluNetwork assemble_phi_triple(const MultiIndex& s_minus_e, const std::vector<int>& k, const LagrangeTable& table,
                                double omega, double delta, std::size_t input_dim, std::uint32_t fallback_coord);

class Surrogate {
public:
    struct Term {
        std::uint32_t component;
        double coeff;
    };
    // One distinct network phi_{s-e;k}.
    struct Unit {
        MultiIndex s_minus_e;
        std::vector<int> k;  // aligned with s_minus_e support
        std::uint32_t fallback = 1;
        std::vector<Term> terms;
        double coeff_abs_sum = 0.0;
        std::size_t size = 0;           // padded W
        std::size_t unpadded_size = 0;  // skip-connection W
        std::size_t depth = 0;
    };

    Surrogate(std::shared_ptr<const CollocationPlan> plan, Mat point_values, double omega, double delta,
              int threads = 1);

    const CollocationPlan& plan() const { return *plan_; }
    const Mat& point_values() const { return values_; }
    double omega() const { return omega_; }
    double delta() const { return delta_; }
    std::size_t input_dim() const { return input_dim_; }

    std::size_t unit_count() const { return units_.size(); }
    const Unit& unit(std::size_t u) const { return units_[u]; }
    std::uint32_t unit_of_triple(std::size_t t) const { return triple_unit_[t]; }
    std::size_t component_count() const { return components_.size(); }
    const ReluNetwork& component(std::size_t c) const { return components_[c]; }

    // Explicit network for a unit (same construction as assemble_phi_triple).
    ReluNetwork build_unit_network(std::size_t u) const;

    // Bundle accounting: sums over all |G| triples and the maximal depth.
    std::size_t bundle_size() const { return bundle_size_; }
    std::size_t bundle_unpadded_size() const { return bundle_unpadded_size_; }
    std::size_t bundle_depth() const { return bundle_depth_; }

    // Rows of Y are points (at least input_dim() coordinates).
    Mat evaluate_batch(const Mat& Y, int threads = 1) const;
    std::vector<double> evaluate(std::span<const double> y) const;
    // phi_{s-e;k} values, one row per point, one column per unit.
    Mat unit_values(const Mat& Y, int threads = 1) const;

    // delta * sum_G ||v_t|| * sum_l |b_l| (4 sqrt omega)^{|l|_1}.
    double gap_bound(std::span<const double> point_norms) const;

private:
    std::shared_ptr<const CollocationPlan> plan_;
    Mat values_;
    double omega_;
    double delta_;
    std::size_t input_dim_;
    std::shared_ptr<const LagrangeTable> table_;
    std::vector<Unit> units_;
    std::vector<std::uint32_t> triple_unit_;
    std::vector<ComponentKey> component_keys_;
    std::vector<ReluNetwork> components_;
    std::vector<std::size_t> component_out_nnz_;
    std::size_t bundle_size_ = 0;
    std::size_t bundle_unpadded_size_ = 0;
    std::size_t bundle_depth_ = 0;
};

}  // namespace rc
