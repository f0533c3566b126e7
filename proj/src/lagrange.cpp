#include "relucoll/lagrange.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "relucoll/errors.hpp"
#include "relucoll/parallel.hpp"

namespace rc {

std::vector<double> hermite_monomial_coeffs(int n) {
    if (n < 0) throw DomainError("hermite_monomial_coeffs: negative degree");
    std::vector<double> a(static_cast<std::size_t>(n) + 1, 0.0);
    const double half_log_fact = 0.5 * std::lgamma(n + 1.0);
    for (int l = 0; 2 * l <= n; ++l) {
        const double lg = half_log_fact - std::lgamma(l + 1.0) - std::lgamma(n - 2 * l + 1.0) - l * std::log(2.0);
        a[static_cast<std::size_t>(n - 2 * l)] = ((l % 2) ? -1.0 : 1.0) * std::exp(lg);
    }
    return a;
}

Deflation deflate(const std::vector<double>& a, double y0) {
    if (a.size() < 2) throw DomainError("deflate: polynomial degree must be at least 1");
    const std::size_t n = a.size() - 1;
    Deflation d;
    d.quotient.assign(n, 0.0);
    auto& q = d.quotient;
    double bound = 0.0;
    for (double v : a) bound += std::abs(v);
    const double tol = bound * (1.0 + 1e-12);
    if (std::abs(y0) <= 1.0) {
        q[n - 1] = a[n];
        if (std::abs(q[n - 1]) > tol) d.bound_held = false;
        for (std::size_t k = n - 1; k-- > 0;) {
            q[k] = a[k + 1] + y0 * q[k + 1];
            if (std::abs(q[k]) > tol) d.bound_held = false;
        }
    } else {
        q[0] = -a[0] / y0;
        if (std::abs(q[0]) > tol) d.bound_held = false;
        for (std::size_t k = 1; k < n; ++k) {
            q[k] = (q[k - 1] - a[k]) / y0;
            if (std::abs(q[k]) > tol) d.bound_held = false;
        }
    }
    return d;
}

LagrangeBasis::LagrangeBasis(int m) : family_(gauss_hermite_nodes(m)) {
    const std::size_t n = family_.size();
    const auto& x = family_.nodes();
    coeffs_.resize(n);
    a_.resize(n);
    inv_denom_.resize(n);
    if (m == 0) {
        coeffs_[0] = {1.0};
        a_[0] = 1.0;
        inv_denom_[0] = 1.0;
        return;
    }
    const auto h = hermite_monomial_coeffs(m + 1);
    const double half_log_fact = 0.5 * std::lgamma(m + 2.0);
    for (std::size_t i = 0; i < n; ++i) {
        double log_mag = 0.0;
        double sign = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double diff = x[i] - x[j];
            log_mag -= std::log(std::abs(diff));
            if (diff < 0) sign = -sign;
        }
        inv_denom_[i] = sign * std::exp(log_mag);
        a_[i] = sign * std::exp(half_log_fact + log_mag);
        Deflation d = deflate(h, x[i]);
        deflation_ok_ = deflation_ok_ && d.bound_held;
        coeffs_[i].resize(n);
        for (std::size_t l = 0; l < n; ++l) coeffs_[i][l] = a_[i] * d.quotient[l];
        // Parity of the centre node's basis makes odd coefficients vanish.
        if (x[i] == 0.0)
            for (std::size_t l = (m % 2 == 0) ? 1 : 0; l < n; l += 2) coeffs_[i][l] = 0.0;
    }
}

double LagrangeBasis::eval_at(std::size_t pos, double y) const {
    const auto& x = family_.nodes();
    double p = inv_denom_[pos];
    for (std::size_t j = 0; j < x.size(); ++j)
        if (j != pos) p *= (y - x[j]);
    return p;
}

double LagrangeBasis::eval_monomial(int k, double y) const {
    const auto& c = coeffs(k);
    double acc = 0.0;
    for (std::size_t l = c.size(); l-- > 0;) acc = acc * y + c[l];
    return acc;
}

LagrangeBasis lagrange_coeffs(int m) {
    if (m < 0) throw DomainError("lagrange_coeffs: negative order");
    return LagrangeBasis(m);
}

LagrangeTable::LagrangeTable(int max_order) {
    if (max_order < 0) throw DomainError("LagrangeTable: negative order");
    bases_.reserve(static_cast<std::size_t>(max_order) + 1);
    for (int m = 0; m <= max_order; ++m) bases_.emplace_back(m);
}

const LagrangeBasis& LagrangeTable::basis(int m) const {
    if (m < 0 || m > max_order())
        throw CapacityError("Lagrange order " + std::to_string(m) + " not in table");
    return bases_[static_cast<std::size_t>(m)];
}

std::vector<std::vector<double>> interp_op(const LagrangeTable& table, int m, const UnivariateSampler& v) {
    const auto& b = table.basis(m);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(m) + 1);
    for (std::size_t pos = 0; pos < b.nodes().size(); ++pos) {
        const auto val = v(b.nodes().nodes()[pos]);
        const auto& c = b.coeffs_at(pos);
        for (std::size_t l = 0; l < c.size(); ++l) {
            if (out[l].empty()) out[l].assign(val.size(), 0.0);
            for (std::size_t d = 0; d < val.size(); ++d) out[l][d] += c[l] * val[d];
        }
    }
    return out;
}

std::vector<std::vector<double>> delta_op(const LagrangeTable& table, int m, const UnivariateSampler& v) {
    auto cur = interp_op(table, m, v);
    if (m == 0) return cur;
    const auto prev = interp_op(table, m - 1, v);
    for (std::size_t l = 0; l < prev.size(); ++l)
        for (std::size_t d = 0; d < prev[l].size(); ++d) cur[l][d] -= prev[l][d];
    return cur;
}

std::vector<double> eval_poly(const std::vector<std::vector<double>>& coeffs, double y) {
    if (coeffs.empty()) return {};
    std::vector<double> acc(coeffs.back().size(), 0.0);
    for (std::size_t l = coeffs.size(); l-- > 0;)
        for (std::size_t d = 0; d < acc.size(); ++d) acc[d] = acc[d] * y + coeffs[l][d];
    return acc;
}

SparseInterpolant::SparseInterpolant(std::shared_ptr<const CollocationPlan> plan, Mat point_values)
    : plan_(std::move(plan)), values_(std::move(point_values)) {
    if (values_.rows != plan_->points.size())
        throw DomainError("SparseInterpolant: one value row per grid point required");
    const std::size_t dims = static_cast<std::size_t>(plan_->m_active);
    max_order_.assign(dims, 0);
    int global_max = 0;
    for (const auto& s : plan_->lambda_set)
        for (const auto& [j, v] : s.entries()) {
            max_order_[j - 1] = std::max<int>(max_order_[j - 1], static_cast<int>(v));
            global_max = std::max<int>(global_max, static_cast<int>(v));
        }
    table_ = std::make_shared<LagrangeTable>(global_max);

    coord_offset_.resize(dims);
    order_offset_.resize(dims);
    std::size_t off = 0;
    for (std::size_t j = 0; j < dims; ++j) {
        coord_offset_[j] = off;
        order_offset_[j].resize(static_cast<std::size_t>(max_order_[j]) + 1);
        for (int t = 0; t <= max_order_[j]; ++t) {
            order_offset_[j][static_cast<std::size_t>(t)] = off;
            off += static_cast<std::size_t>(t) + 1;
        }
    }
    table_size_ = off;

    lookup_start_.reserve(plan_->triples.size() + 1);
    for (const auto& t : plan_->triples) {
        lookup_start_.push_back(static_cast<std::uint32_t>(lookup_.size()));
        const auto& ent = plan_->lambda_set[t.s_ref].entries();
        const auto ord = plan_->orders(t);
        for (std::size_t i = 0; i < ent.size(); ++i) {
            if (ord[i] == 0) continue;  // L_{0;0} == 1
            const std::size_t j = ent[i].first - 1;
            const std::size_t pos = table_->basis(ord[i]).nodes().position_of(t.k[i]);
            lookup_.push_back(static_cast<std::uint32_t>(order_offset_[j][static_cast<std::size_t>(ord[i])] + pos));
        }
    }
    lookup_start_.push_back(static_cast<std::uint32_t>(lookup_.size()));
}

std::vector<double> SparseInterpolant::point_weights(std::span<const double> y) const {
    const std::size_t dims = input_dim();
    if (y.size() < dims)
        throw DomainError("evaluate_interpolant: point has " + std::to_string(y.size()) + " coordinates, plan needs " +
                          std::to_string(dims));
    std::vector<double> table(table_size_);
    for (std::size_t j = 0; j < dims; ++j)
        for (int t = 0; t <= max_order_[j]; ++t) {
            const auto& b = table_->basis(t);
            const std::size_t base = order_offset_[j][static_cast<std::size_t>(t)];
            for (std::size_t pos = 0; pos <= static_cast<std::size_t>(t); ++pos) table[base + pos] = b.eval_at(pos, y[j]);
        }
    std::vector<double> w(plan_->points.size(), 0.0);
    for (std::size_t ti = 0; ti < plan_->triples.size(); ++ti) {
        double p = static_cast<double>(plan_->triples[ti].sign);
        for (std::uint32_t q = lookup_start_[ti]; q < lookup_start_[ti + 1]; ++q) p *= table[lookup_[q]];
        w[plan_->triples[ti].point_ref] += p;
    }
    return w;
}

std::vector<double> SparseInterpolant::evaluate(std::span<const double> y) const {
    const auto w = point_weights(y);
    std::vector<double> out(values_.cols, 0.0);
    for (std::size_t p = 0; p < w.size(); ++p) {
        if (w[p] == 0.0) continue;
        const auto row = values_.row(p);
        for (std::size_t d = 0; d < out.size(); ++d) out[d] += w[p] * row[d];
    }
    return out;
}

bool SparseInterpolant::inside_box(std::span<const double> y, double omega) const {
    const double half = 2.0 * std::sqrt(omega);
    const std::size_t m = box_dim();
    if (y.size() < m) throw DomainError("truncated evaluation: point dimension below box dimension");
    for (std::size_t j = 0; j < m; ++j)
        if (std::abs(y[j]) > half) return false;
    return true;
}

std::vector<double> SparseInterpolant::evaluate_truncated(std::span<const double> y, double omega) const {
    if (!(omega >= 1.0)) throw DomainError("truncation requires omega >= 1");
    if (!inside_box(y, omega)) return std::vector<double>(values_.cols, 0.0);
    return evaluate(y);
}

Mat sample_points(const CollocationPlan& plan, const Sampler& sampler, int threads) {
    const std::size_t n = plan.points.size();
    const std::size_t dims = static_cast<std::size_t>(plan.m_active);
    std::vector<std::vector<double>> rows(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const auto y = plan.dense_point(i, dims);
        try {
            rows[i] = sampler(y);
        } catch (const std::exception& ex) {
            std::ostringstream os;
            os << "sampler failed at grid point #" << i << " (";
            for (std::size_t j = 0; j < y.size(); ++j) os << (j ? "," : "") << y[j];
            os << "): " << ex.what();
            throw NumericError(os.str());
        }
    });
    const std::size_t dim = n ? rows[0].size() : 0;
    Mat m(n, dim);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != dim) throw DomainError("sampler returned inconsistent value dimension");
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
}

SparseInterpolant sparse_interpolate(std::shared_ptr<const CollocationPlan> plan, const Sampler& sampler, int threads) {
    Mat values = sample_points(*plan, sampler, threads);
    return SparseInterpolant(std::move(plan), std::move(values));
}

}  // namespace rc
