#include "relucoll/index_sets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <string>

#include "relucoll/errors.hpp"

namespace rc {

double WeightModel::rho(std::uint32_t j) const {
    if (j == 0) throw DomainError("rho: coordinates are 1-based");
    if (j <= rho_explicit.size()) return rho_explicit[j - 1];
    return tail_c * std::pow(static_cast<double>(j), tail_r);
}

void WeightModel::validate() const {
    if (!(q > 0.0 && q < 2.0)) throw DomainError("weights.q must lie in (0,2)");
    if (eta < 1) throw DomainError("weights.eta must be a positive integer");
    if (theta < 0.0) throw DomainError("weights.theta must be non-negative");
    if (lambda < 0.0) throw DomainError("weights.lambda must be non-negative");
    if (!(tail_r > 0.0)) throw DomainError("rho.r must be positive");
    if (!(tail_c > 0.0)) throw DomainError("rho.c must be positive");
    double prev = 1.0;
    const std::uint32_t n_check = static_cast<std::uint32_t>(rho_explicit.size()) + 4;
    for (std::uint32_t j = 1; j <= n_check; ++j) {
        const double r = rho(j);
        if (!(r > 1.0)) throw DomainError("rho_" + std::to_string(j) + " must exceed 1");
        if (r < prev) throw DomainError("rho must be non-decreasing (at j=" + std::to_string(j) + ")");
        prev = r;
    }
}

WeightModel WeightModel::with_defaults(double q, double tail_c, double tail_r, double delta) {
    WeightModel w;
    w.q = q;
    w.tail_c = tail_c;
    w.tail_r = tail_r;
    w.theta = 2.0 / (delta * q);
    w.eta = static_cast<int>(std::ceil(2.0 * (w.theta + 1.0) / q)) + 1;
    w.lambda = 1.0;
    return w;
}

namespace {

double log_binom(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// log sum_{t=0}^{min(v, eta)} C(v,t) rho^{2t}
double log_factor(std::uint32_t v, double rho, int eta) {
    const int top = std::min<int>(static_cast<int>(v), eta);
    const double lr2 = 2.0 * std::log(rho);
    double mx = -INFINITY;
    std::vector<double> terms(static_cast<std::size_t>(top) + 1);
    for (int t = 0; t <= top; ++t) {
        terms[static_cast<std::size_t>(t)] = log_binom(static_cast<int>(v), t) + t * lr2;
        mx = std::max(mx, terms[static_cast<std::size_t>(t)]);
    }
    double acc = 0.0;
    for (double x : terms) acc += std::exp(x - mx);
    return mx + std::log(acc);
}

}  // namespace

double log_sigma_sq(const MultiIndex& s, const WeightModel& w) {
    double acc = 0.0;
    for (const auto& [j, v] : s.entries()) acc += log_factor(v, w.rho(j), w.eta);
    return acc;
}

double sigma_of(const MultiIndex& s, const WeightModel& w) { return std::exp(0.5 * log_sigma_sq(s, w)); }

double p_weight(const MultiIndex& s, double theta, double lambda) {
    if (theta < 0.0 || lambda < 0.0) throw DomainError("p_weight: theta and lambda must be non-negative");
    double p = 1.0;
    for (const auto& [j, v] : s.entries()) p *= std::pow(1.0 + lambda * v, theta);
    return p;
}

std::vector<MultiIndex> build_lambda(double xi, const WeightModel& w, std::size_t cap) {
    if (!(xi > 0.0)) throw DomainError("build_lambda: xi must be positive");
    w.validate();
    // sigma_s^q <= xi  <=>  (q/2) log sigma_s^2 <= log xi
    const double budget = 2.0 * std::log(xi) / w.q;
    std::vector<MultiIndex> out;
    if (budget < 0.0) return out;

    std::vector<MultiIndex::Entry> cur;
    struct Frame {
        std::uint32_t j;
        double acc;
    };
    // Recursive enumeration: emit the current index, then extend with a new
    // coordinate j' >= j.  Factors are non-decreasing in j and in s_j, so the
    // first infeasible value ends each loop.
    auto rec = [&](auto&& self, std::uint32_t start, double acc) -> void {
        out.emplace_back(cur);
        if (out.size() > cap)
            throw CapacityError("index set exceeds cap " + std::to_string(cap) + " (partial count " +
                                std::to_string(out.size()) + ")");
        for (std::uint32_t j = start;; ++j) {
            const double rho = w.rho(j);
            const double f1 = log_factor(1, rho, w.eta);
            if (acc + f1 > budget) break;
            for (std::uint32_t v = 1;; ++v) {
                const double f = log_factor(v, rho, w.eta);
                if (acc + f > budget) break;
                cur.emplace_back(j, v);
                self(self, j + 1, acc + f);
                cur.pop_back();
            }
        }
    };
    rec(rec, 1, 0.0);
    std::sort(out.begin(), out.end(), canonical_less);
    return out;
}

MultiIndex CollocationPlan::s_minus_e(const Triple& t) const {
    const auto& s = lambda_set[t.s_ref];
    std::vector<MultiIndex::Entry> e;
    for (std::size_t i = 0; i < s.entries().size(); ++i) {
        const auto [j, v] = s.entries()[i];
        const std::uint32_t d = v - ((t.e_mask >> i) & 1u);
        if (d > 0) e.emplace_back(j, d);
    }
    return MultiIndex(std::move(e));
}

std::vector<int> CollocationPlan::orders(const Triple& t) const {
    const auto& s = lambda_set[t.s_ref];
    std::vector<int> o(s.entries().size());
    for (std::size_t i = 0; i < o.size(); ++i)
        o[i] = static_cast<int>(s.entries()[i].second) - static_cast<int>((t.e_mask >> i) & 1u);
    return o;
}

std::vector<double> CollocationPlan::dense_point(std::size_t point_index, std::size_t dims) const {
    std::vector<double> y(dims, 0.0);
    for (const auto& [j, v] : points[point_index]) {
        if (j > dims) throw DomainError("dense_point: dimension too small for grid point");
        y[j - 1] = v;
    }
    return y;
}

namespace {

struct PointLess {
    bool operator()(const SparsePoint& a, const SparsePoint& b) const { return a < b; }
};

}  // namespace

CollocationPlan build_plan_from_set(std::vector<MultiIndex> lambda_set, const WeightModel& w, double xi) {
    CollocationPlan plan;
    plan.xi = xi;
    plan.weights = w;
    std::sort(lambda_set.begin(), lambda_set.end(), canonical_less);
    plan.lambda_set = std::move(lambda_set);
    if (!is_downward_closed(plan.lambda_set)) throw DomainError("build_plan: index set is not downward closed");

    int max_order = 0;
    for (const auto& s : plan.lambda_set) {
        plan.m1 = std::max(plan.m1, s.l1());
        plan.m_active = std::max<int>(plan.m_active, static_cast<int>(s.max_coordinate()));
        for (const auto& [j, v] : s.entries()) max_order = std::max<int>(max_order, static_cast<int>(v));
        if (s.l0() > 31) throw CapacityError("build_plan: support size above 31 not supported");
    }
    plan.sigma.reserve(plan.lambda_set.size());
    for (const auto& s : plan.lambda_set) plan.sigma.push_back(sigma_of(s, w));

    const NodeTable nodes(max_order);
    std::map<SparsePoint, std::uint32_t, PointLess> point_ids;
    std::vector<SparsePoint> raw_points;

    for (std::uint32_t si = 0; si < plan.lambda_set.size(); ++si) {
        const auto& ent = plan.lambda_set[si].entries();
        const std::size_t d = ent.size();
        for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
            std::vector<int> ord(d);
            for (std::size_t i = 0; i < d; ++i) ord[i] = static_cast<int>(ent[i].second) - static_cast<int>((mask >> i) & 1u);
            std::vector<int> k(d);
            for (std::size_t i = 0; i < d; ++i) k[i] = nodes.family(ord[i]).index_at(0);
            const int sign = (std::popcount(mask) % 2 == 0) ? 1 : -1;
            for (;;) {
                SparsePoint p;
                for (std::size_t i = 0; i < d; ++i) {
                    const double y = nodes.node(ord[i], k[i]);
                    if (y != 0.0) p.emplace_back(ent[i].first, y);
                }
                auto [it, inserted] = point_ids.emplace(p, static_cast<std::uint32_t>(raw_points.size()));
                if (inserted) raw_points.push_back(p);
                plan.triples.push_back(Triple{si, mask, k, sign, it->second});
                // odometer over pi_{s-e}
                std::size_t i = 0;
                for (; i < d; ++i) {
                    const auto& fam = nodes.family(ord[i]);
                    const std::size_t pos = fam.position_of(k[i]);
                    if (pos + 1 < fam.size()) {
                        k[i] = fam.index_at(pos + 1);
                        break;
                    }
                    k[i] = fam.index_at(0);
                }
                if (i == d) break;
            }
        }
    }

    // Renumber points into canonical (sorted) order.
    std::vector<std::uint32_t> remap(raw_points.size());
    std::uint32_t idx = 0;
    plan.points.reserve(raw_points.size());
    for (const auto& [p, old] : point_ids) {
        remap[old] = idx++;
        plan.points.push_back(p);
    }
    for (auto& t : plan.triples) t.point_ref = remap[t.point_ref];
    return plan;
}

CollocationPlan build_plan(double xi, const WeightModel& w, std::size_t cap) {
    if (!(xi > 1.0)) throw DomainError("build_plan: xi must exceed 1");
    auto set = build_lambda(xi, w, cap);
    return build_plan_from_set(std::move(set), w, xi);
}

PlanStats plan_stats(const CollocationPlan& plan) {
    PlanStats st;
    st.lambda_size = plan.lambda_set.size();
    st.triple_count = plan.triples.size();
    st.unique_points = plan.points.size();
    st.m1 = plan.m1;
    st.m_active = plan.m_active;
    for (double s : plan.sigma) st.max_sigma = std::max(st.max_sigma, s);
    return st;
}

bool is_downward_closed(const std::vector<MultiIndex>& set) {
    std::set<std::vector<MultiIndex::Entry>> members;
    for (const auto& s : set) members.insert(s.entries());
    for (const auto& s : set) {
        for (const auto& [j, v] : s.entries()) {
            if (!members.count(s.with(j, v - 1).entries())) return false;
        }
    }
    return true;
}

std::size_t count_triples(const std::vector<MultiIndex>& set) {
    std::size_t total = 0;
    for (const auto& s : set) {
        const auto& ent = s.entries();
        const std::size_t d = ent.size();
        for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
            std::size_t prod = 1;
            for (std::size_t i = 0; i < d; ++i) prod *= ent[i].second - ((mask >> i) & 1u) + 1;
            total += prod;
        }
    }
    return total;
}

}  // namespace rc
