#include "relucoll/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "relucoll/errors.hpp"
#include "relucoll/parallel.hpp"
#include "relucoll/product_net.hpp"

namespace rc {

double fit_node_sum_constant(int max_order) {
    const double log_c = 0.25 * std::log(2.0 * std::numbers::pi);
    double K = 0.0;
    for (int s = 1; s <= std::max(1, max_order); ++s) {
        const auto fam = gauss_hermite_nodes(s);
        double mx = -INFINITY;
        for (double y : fam.nodes()) mx = std::max(mx, y * y / 4.0);
        double acc = 0.0;
        for (double y : fam.nodes()) acc += std::exp(y * y / 4.0 - mx);
        K = std::max(K, (log_c + mx + std::log(acc)) / s);
    }
    return K;
}

namespace {

// log max_{k,l} |b^{m;k}_l|
double log_max_coeff(const LagrangeBasis& b) {
    double mx = 0.0;
    for (std::size_t pos = 0; pos < b.nodes().size(); ++pos)
        for (double c : b.coeffs_at(pos)) mx = std::max(mx, std::abs(c));
    return std::log(mx);
}

int max_coordinate_order(const CollocationPlan& plan) {
    int mx = 0;
    for (const auto& s : plan.lambda_set)
        for (const auto& [j, v] : s.entries()) mx = std::max<int>(mx, static_cast<int>(v));
    return mx;
}

}  // namespace

DeltaInfo compute_delta(const CollocationPlan& plan, double omega, double K) {
    if (!(omega >= 1.0)) throw DomainError("compute_delta: omega must be at least 1");
    if (plan.lambda_set.empty()) throw DomainError("compute_delta: empty index set");
    const double q = plan.weights.q;
    const LagrangeTable table(max_coordinate_order(plan));
    std::vector<double> log_m(static_cast<std::size_t>(table.max_order()) + 1);
    for (int o = 0; o <= table.max_order(); ++o) log_m[static_cast<std::size_t>(o)] = log_max_coeff(table.basis(o));

    const double log_box = std::log(4.0 * std::sqrt(omega));
    std::vector<double> terms;
    terms.reserve(plan.lambda_set.size());
    for (const auto& s : plan.lambda_set) {
        double t = (K + log_box) * s.l1();
        for (const auto& [j, v] : s.entries()) {
            t += 2.0 * std::log(1.0 + v);
            // B_s factorizes: the maximizing e picks the larger coordinate factor.
            t += std::max(log_m[v], log_m[v - 1]);
        }
        terms.push_back(t);
    }
    const double mx = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - mx);

    DeltaInfo info;
    info.K = K;
    info.log_inv_delta = (1.0 / q - 0.5) * std::log(plan.xi > 0 ? plan.xi : 1.0) + mx + std::log(acc);
    info.delta_formula = std::exp(-info.log_inv_delta);
    info.delta = std::clamp(info.delta_formula, kDeltaFloor, kDeltaCeil);
    info.clamped = info.delta != info.delta_formula;
    return info;
}

double input_scale(double omega) {
    if (!(omega >= 1.0)) throw DomainError("omega must be at least 1");
    return std::nextafter(1.0 / (4.0 * std::sqrt(omega)), INFINITY);
}

ReluNetwork component_network(const ComponentKey& key, std::size_t input_dim, double omega, double delta) {
    if (key.empty()) throw DomainError("component_network: empty key");
    const double c = input_scale(omega);
    NetBuilder b(input_dim);
    std::vector<Lin> factors;
    for (const auto& [j, e] : key) {
        if (j < 1 || j > input_dim) throw DomainError("component_network: coordinate outside input");
        const Lin x = Lin::of(b.input(j - 1), c);
        if (e == 0) {
            factors.push_back(phi0_factor(b, x));
        } else {
            const Lin f = phi1_factor(b, x);
            for (std::uint32_t r = 0; r < e; ++r) factors.push_back(f);
        }
    }
    const int levels = levels_for(factors.size(), delta);
    const Lin out = emit_product(b, std::move(factors), levels);
    std::string label;
    for (const auto& [j, e] : key) label += (label.empty() ? "" : ",") + std::to_string(j) + ":" + std::to_string(e);
    return b.build({out}, -1, label);
}

namespace {

struct MonomialTerm {
    ComponentKey key;
    double coeff;
};

// Monomial expansion of L_{s-e;k}(y) = sum_l c_l prod_j (c y_j)^{l_j}, with
// c_l = b_l c^{-|l|_1}.  Exactly vanishing coefficients are dropped.
std::vector<MonomialTerm> monomial_terms(const MultiIndex& sme, const std::vector<int>& k, const LagrangeTable& table,
                                         double omega, std::uint32_t fallback) {
    const double log_inv_scale = -std::log(input_scale(omega));
    const auto& ent = sme.entries();
    if (ent.empty()) return {MonomialTerm{{{fallback, 0}}, 1.0}};
    if (k.size() != ent.size()) throw DomainError("monomial_terms: node index count mismatch");
    std::vector<const std::vector<double>*> coeffs;
    for (std::size_t i = 0; i < ent.size(); ++i) coeffs.push_back(&table.basis(static_cast<int>(ent[i].second)).coeffs(k[i]));
    std::vector<MonomialTerm> out;
    std::vector<std::uint32_t> l(ent.size(), 0);
    for (;;) {
        double log_mag = 0.0;
        double sign = 1.0;
        bool zero = false;
        int l1 = 0;
        ComponentKey key;
        for (std::size_t i = 0; i < ent.size(); ++i) {
            const double b = (*coeffs[i])[l[i]];
            if (b == 0.0) {
                zero = true;
                break;
            }
            log_mag += std::log(std::abs(b));
            if (b < 0) sign = -sign;
            l1 += static_cast<int>(l[i]);
            key.emplace_back(ent[i].first, l[i]);
        }
        if (!zero) out.push_back(MonomialTerm{std::move(key), sign * std::exp(log_mag + l1 * log_inv_scale)});
        std::size_t i = 0;
        for (; i < ent.size(); ++i) {
            if (l[i] < ent[i].second) {
                ++l[i];
                break;
            }
            l[i] = 0;
        }
        if (i == ent.size()) break;
    }
    return out;
}

std::vector<int> aligned_k(const CollocationPlan& plan, const Triple& t) {
    const auto ord = plan.orders(t);
    std::vector<int> k;
    for (std::size_t i = 0; i < ord.size(); ++i)
        if (ord[i] > 0) k.push_back(t.k[i]);
    return k;
}

std::uint32_t fallback_of(const MultiIndex& s) { return s.is_zero() ? 1u : s.entries().front().first; }

}  // namespace

ReluNetwork assemble_phi_triple(const MultiIndex& s_minus_e, const std::vector<int>& k, const LagrangeTable& table,
                                double omega, double delta, std::size_t input_dim, std::uint32_t fallback_coord) {
    const auto terms = monomial_terms(s_minus_e, k, table, omega, fallback_coord);
    std::vector<ReluNetwork> nets;
    std::vector<double> coeffs;
    for (const auto& t : terms) {
        nets.push_back(component_network(t.key, input_dim, omega, delta));
        coeffs.push_back(t.coeff);
    }
    auto net = parallelize(nets, coeffs, Padding::IdentityCarry);
    net.set_label(s_minus_e.str());
    return net;
}

Surrogate::Surrogate(std::shared_ptr<const CollocationPlan> plan, Mat point_values, double omega, double delta,
                     int threads)
    : plan_(std::move(plan)), values_(std::move(point_values)), omega_(omega), delta_(delta) {
    if (values_.rows != plan_->points.size())
        throw DomainError("assemble_surrogate: " + std::to_string(values_.rows) + " samples for " +
                          std::to_string(plan_->points.size()) + " grid points");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("assemble_surrogate: delta must lie in (0,1)");
    input_dim_ = std::max<std::size_t>(1, static_cast<std::size_t>(plan_->m_active));
    table_ = std::make_shared<LagrangeTable>(max_coordinate_order(*plan_));

    // Distinct units keyed by (s-e, k, fallback).
    std::map<std::tuple<std::vector<MultiIndex::Entry>, std::vector<int>, std::uint32_t>, std::uint32_t> unit_ids;
    std::map<ComponentKey, std::uint32_t> comp_ids;
    triple_unit_.reserve(plan_->triples.size());
    for (const auto& t : plan_->triples) {
        MultiIndex sme = plan_->s_minus_e(t);
        auto k = aligned_k(*plan_, t);
        const std::uint32_t fb = sme.is_zero() ? fallback_of(plan_->lambda_set[t.s_ref]) : 0u;
        auto key = std::make_tuple(sme.entries(), k, fb);
        auto it = unit_ids.find(key);
        if (it == unit_ids.end()) {
            Unit u;
            u.s_minus_e = std::move(sme);
            u.k = std::move(k);
            u.fallback = fb ? fb : 1u;
            for (auto& mt : monomial_terms(u.s_minus_e, u.k, *table_, omega_, u.fallback)) {
                auto [cit, inserted] = comp_ids.emplace(mt.key, static_cast<std::uint32_t>(component_keys_.size()));
                if (inserted) component_keys_.push_back(mt.key);
                u.terms.push_back(Term{cit->second, mt.coeff});
                u.coeff_abs_sum += std::abs(mt.coeff);
            }
            it = unit_ids.emplace(std::move(key), static_cast<std::uint32_t>(units_.size())).first;
            units_.push_back(std::move(u));
        }
        triple_unit_.push_back(it->second);
    }

    components_.resize(component_keys_.size());
    parallel_for(component_keys_.size(), threads, [&](std::size_t c) {
        components_[c] = component_network(component_keys_[c], input_dim_, omega_, delta_);
    });
    component_out_nnz_.resize(components_.size());
    for (std::size_t c = 0; c < components_.size(); ++c) {
        const auto& last = components_[c].layers().back();
        component_out_nnz_[c] = last.col_idx.size();
    }

    // Size of the parallelization with identity-carry padding, mirroring
    // parallelize(): a shallower component's output row becomes two neurons,
    // carried by one weight each per layer, recombined by two output weights.
    for (auto& u : units_) {
        std::size_t lmax = 0;
        for (const auto& t : u.terms) lmax = std::max(lmax, components_[t.component].depth());
        std::size_t raw = 0, padded = 0;
        for (const auto& t : u.terms) {
            const auto& net = components_[t.component];
            raw += net.size();
            padded += net.size();
            if (net.depth() < lmax) padded += component_out_nnz_[t.component] + 2 * (lmax - net.depth());
        }
        u.size = padded;
        u.unpadded_size = raw;
        u.depth = lmax;
    }
    for (std::uint32_t ui : triple_unit_) {
        bundle_size_ += units_[ui].size;
        bundle_unpadded_size_ += units_[ui].unpadded_size;
        bundle_depth_ = std::max(bundle_depth_, units_[ui].depth);
    }
}

ReluNetwork Surrogate::build_unit_network(std::size_t u) const {
    const Unit& unit = units_.at(u);
    std::vector<ReluNetwork> nets;
    std::vector<double> coeffs;
    for (const auto& t : unit.terms) {
        nets.push_back(components_[t.component]);
        coeffs.push_back(t.coeff);
    }
    auto net = parallelize(nets, coeffs, Padding::IdentityCarry);
    net.set_label(unit.s_minus_e.str());
    return net;
}

Mat Surrogate::unit_values(const Mat& Y, int threads) const {
    if (Y.cols < input_dim_)
        throw DomainError("surrogate: point has " + std::to_string(Y.cols) + " coordinates, needs " +
                          std::to_string(input_dim_));
    const std::size_t B = Y.rows;
    Mat X(B, input_dim_);
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t j = 0; j < input_dim_; ++j) X(b, j) = Y(b, j);
    std::vector<std::vector<double>> comp(components_.size());
    parallel_for(components_.size(), threads, [&](std::size_t c) {
        const Mat out = components_[c].eval_batch(X);
        comp[c] = out.data;
    });
    Mat U(B, units_.size());
    for (std::size_t u = 0; u < units_.size(); ++u) {
        const auto& terms = units_[u].terms;
        for (std::size_t b = 0; b < B; ++b) {
            double acc = 0.0;
            for (const auto& t : terms) acc += t.coeff * comp[t.component][b];
            U(b, u) = acc;
        }
    }
    return U;
}

Mat Surrogate::evaluate_batch(const Mat& Y, int threads) const {
    const Mat U = unit_values(Y, threads);
    const std::size_t B = Y.rows;
    Mat out(B, values_.cols);
    std::vector<double> w(plan_->points.size());
    for (std::size_t b = 0; b < B; ++b) {
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t t = 0; t < plan_->triples.size(); ++t)
            w[plan_->triples[t].point_ref] += plan_->triples[t].sign * U(b, triple_unit_[t]);
        auto row = out.row(b);
        for (std::size_t p = 0; p < w.size(); ++p) {
            if (w[p] == 0.0) continue;
            const auto v = values_.row(p);
            for (std::size_t d = 0; d < row.size(); ++d) row[d] += w[p] * v[d];
        }
    }
    return out;
}

std::vector<double> Surrogate::evaluate(std::span<const double> y) const {
    Mat Y(1, y.size());
    std::copy(y.begin(), y.end(), Y.data.begin());
    const Mat out = evaluate_batch(Y);
    return out.data;
}

double Surrogate::gap_bound(std::span<const double> point_norms) const {
    if (point_norms.size() != plan_->points.size()) throw DomainError("gap_bound: one norm per grid point required");
    double acc = 0.0;
    for (std::size_t t = 0; t < plan_->triples.size(); ++t)
        acc += point_norms[plan_->triples[t].point_ref] * units_[triple_unit_[t]].coeff_abs_sum;
    return acc * delta_;
}

}  // namespace rc
