#pragma once
// Weight sequences, the anisotropic sets Lambda(xi) = {s : sigma_s^q <= xi},
// and the collocation triple set G(xi).

#include <cstdint>
#include <map>
#include <vector>

#include "relucoll/hermite.hpp"
#include "relucoll/multi_index.hpp"

namespace rc {

struct WeightModel {
    // Explicit leading values rho_1..rho_n; beyond them rho_j = tail_c * j^tail_r.
    std::vector<double> rho_explicit;
    double tail_c = 2.0;
    double tail_r = 2.0;
    double q = 1.0;
    int eta = 1;
    double theta = 0.0;
    double lambda = 1.0;

    double rho(std::uint32_t j) const;

    // Throws DomainError naming the offending field.
    void validate() const;

    // theta = 2/(delta q), eta = ceil(2(theta+1)/q) + 1.
    static WeightModel with_defaults(double q, double tail_c, double tail_r, double delta = 1.0 / 6.0);
};

// log(sigma_s^2) via the coordinatewise factorization of the weight sum.
double log_sigma_sq(const MultiIndex& s, const WeightModel& w);
double sigma_of(const MultiIndex& s, const WeightModel& w);

// prod_j (1 + lambda s_j)^theta.
double p_weight(const MultiIndex& s, double theta, double lambda);

constexpr std::size_t kDefaultLambdaCap = 1'000'000;

// Exact enumeration by monotone depth-first search; canonical order.
std::vector<MultiIndex> build_lambda(double xi, const WeightModel& w, std::size_t cap = kDefaultLambdaCap);

using SparsePoint = std::vector<std::pair<std::uint32_t, double>>;

struct Triple {
    std::uint32_t s_ref = 0;     // index into lambda_set
    std::uint32_t e_mask = 0;    // bit i set <=> e_j = 1 for the i-th support coordinate of s
    std::vector<int> k;          // one signed node index per support coordinate of s
    int sign = 1;                // (-1)^{|e|_1}
    std::uint32_t point_ref = 0; // index into points
};

struct CollocationPlan {
    double xi = 0.0;
    WeightModel weights;
    std::vector<MultiIndex> lambda_set;
    std::vector<double> sigma;       // aligned with lambda_set
    std::vector<Triple> triples;
    std::vector<SparsePoint> points; // distinct grid points, canonical order
    int m1 = 0;
    int m_active = 0;

    // s - e for a triple as a multi-index.
    MultiIndex s_minus_e(const Triple& t) const;
    // The per-coordinate orders s_j - e_j aligned with the support of s.
    std::vector<int> orders(const Triple& t) const;
    std::vector<double> dense_point(std::size_t point_index, std::size_t dims) const;
};

CollocationPlan build_plan(double xi, const WeightModel& w, std::size_t cap = kDefaultLambdaCap);

// Plan from an explicit downward-closed set (used by tests and small demos).
CollocationPlan build_plan_from_set(std::vector<MultiIndex> lambda_set, const WeightModel& w, double xi = 0.0);

struct PlanStats {
    std::size_t lambda_size = 0;
    std::size_t triple_count = 0;
    std::size_t unique_points = 0;
    int m1 = 0;
    int m_active = 0;
    double max_sigma = 0.0;
};

PlanStats plan_stats(const CollocationPlan& plan);

bool is_downward_closed(const std::vector<MultiIndex>& set);

// sum_{s in Lambda} sum_{e in E_s} prod_j (s_j - e_j + 1), by brute force.
std::size_t count_triples(const std::vector<MultiIndex>& set);

}  // namespace rc
