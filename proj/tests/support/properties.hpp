#pragma once
// Property checks shared by the unit tests and the acceptance binary.  Each
// returns a Check whose detail names the first violation.

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "relucoll/hermite.hpp"
#include "relucoll/index_sets.hpp"
#include "relucoll/lagrange.hpp"
#include "relucoll/network.hpp"
#include "relucoll/product_net.hpp"
#include "relucoll/rng.hpp"

namespace rc::props {

struct Check {
    bool ok = true;
    std::string detail;

    void fail(const std::string& msg) {
        if (ok) detail = msg;
        ok = false;
    }
};

template <class... T>
std::string str(const T&... parts) {
    std::ostringstream os;
    os.precision(17);
    (os << ... << parts);
    return os.str();
}

// |H_s(y)| sqrt(g(y)) < 1 for s <= max_s at n uniform points of [-12, 12].
inline Check cramer_bound(int max_s = 60, std::size_t n = 10000) {
    Check c;
    HermiteBasis hb(max_s);
    std::vector<double> h(max_s + 1);
    for (std::size_t i = 0; i < n && c.ok; ++i) {
        SampleStream rs(11, "cramer", i);
        const double y = -12.0 + 24.0 * rs.uniform();
        hb.eval_upto(max_s, y, h.data());
        const double w = std::sqrt(std::exp(-0.5 * y * y) / std::sqrt(2.0 * M_PI));
        for (int s = 0; s <= max_s; ++s)
            if (!(std::abs(h[s]) * w < 1.0)) c.fail(str("s=", s, " y=", y, " value=", std::abs(h[s]) * w));
    }
    return c;
}

// Gauss-Hermite quadrature of H_i H_j equals the Kronecker delta.
inline Check hermite_orthonormality(int max_deg = 30, double tol = 1e-10) {
    Check c;
    const NodeFamily fam = gauss_hermite_nodes(max_deg + 1);
    const auto w = gauss_hermite_weights(fam);
    HermiteBasis hb(max_deg);
    std::vector<std::vector<double>> h(fam.size(), std::vector<double>(max_deg + 1));
    for (std::size_t p = 0; p < fam.size(); ++p) hb.eval_upto(max_deg, fam.nodes()[p], h[p].data());
    for (int i = 0; i <= max_deg; ++i)
        for (int j = 0; j <= i; ++j) {
            double sum = 0.0;
            for (std::size_t p = 0; p < fam.size(); ++p) sum += w[p] * h[p][i] * h[p][j];
            const double target = i == j ? 1.0 : 0.0;
            if (std::abs(sum - target) > tol) c.fail(str("<H", i, ",H", j, "> = ", sum));
        }
    return c;
}

// Exact symmetry, strict interlacing of consecutive orders, and the lower
// spacing bound pi sqrt(2) / sqrt(2s+3) for s <= max_s.
inline Check node_structure(int max_s = 100) {
    Check c;
    std::vector<double> prev;
    for (int s = 0; s <= max_s; ++s) {
        const auto nodes = gauss_hermite_nodes(s).nodes();
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i] != -nodes[nodes.size() - 1 - i]) c.fail(str("asymmetric nodes at order ", s));
        double d = INFINITY;
        for (std::size_t i = 1; i < nodes.size(); ++i) d = std::min(d, nodes[i] - nodes[i - 1]);
        if (nodes.size() > 1 && d < M_PI * std::sqrt(2.0) / std::sqrt(2.0 * s + 3.0))
            c.fail(str("spacing ", d, " below bound at order ", s));
        for (std::size_t i = 0; i + 1 < nodes.size() && !prev.empty(); ++i)
            if (!(nodes[i] < prev[i] && prev[i] < nodes[i + 1])) c.fail(str("no interlacing at order ", s));
        prev = nodes;
    }
    return c;
}

inline WeightModel weights_for(double q, double c, double r) { return WeightModel::with_defaults(q, c, r); }

// s' <= s implies sigma_{s'} <= sigma_s, checked on every immediate
// predecessor, and sigma_{e^i} is non-decreasing in i.
inline Check sigma_monotone(const WeightModel& w, double xi) {
    Check c;
    for (const auto& s : build_lambda(xi, w)) {
        const double sig = sigma_of(s, w);
        for (const auto& [j, v] : s.entries()) {
            const MultiIndex t = s.with(j, v - 1);
            if (sigma_of(t, w) > sig) c.fail(str("sigma(", t.str(), ") > sigma(", s.str(), ")"));
        }
    }
    for (std::uint32_t i = 1; i < 200; ++i)
        if (sigma_of(MultiIndex::unit(i), w) > sigma_of(MultiIndex::unit(i + 1), w))
            c.fail(str("sigma(e", i, ") > sigma(e", i + 1, ")"));
    return c;
}

inline Check downward_closed(const WeightModel& w, double xi) {
    Check c;
    const auto set = build_lambda(xi, w);
    std::set<MultiIndex, CanonicalLess> members(set.begin(), set.end());
    for (const auto& s : set) {
        if (std::pow(sigma_of(s, w), w.q) > xi) c.fail(str(s.str(), " violates sigma^q <= xi"));
        for (const auto& [j, v] : s.entries())
            if (!members.count(s.with(j, v - 1))) c.fail(str("predecessor of ", s.str(), " missing"));
    }
    return c;
}

// |Lambda(xi)| <= K xi with K fitted on the first decade of a two-decade
// sweep and allowed to grow by at most 20% over the second.  With check_g the
// same is required of |G(xi)|.
inline Check cardinality_linear(const WeightModel& w, double xi0, bool check_g = false) {
    Check c;
    double k_lambda = 0.0, k_g = 0.0;
    for (int i = 0; i <= 8; ++i) {
        const double xi = xi0 * std::pow(10.0, i / 4.0);
        const auto plan = build_plan(xi, w);
        const double rl = plan.lambda_set.size() / xi, rg = plan.triples.size() / xi;
        if (i <= 4) {
            k_lambda = std::max(k_lambda, rl);
            k_g = std::max(k_g, rg);
        } else {
            if (rl > 1.2 * k_lambda) c.fail(str("|Lambda|/xi=", rl, " exceeds 1.2 K=", 1.2 * k_lambda, " at xi=", xi));
            if (check_g && rg > 1.2 * k_g) c.fail(str("|G|/xi=", rg, " exceeds 1.2 K=", 1.2 * k_g, " at xi=", xi));
        }
    }
    return c;
}

// sum_{Lambda(xi)} p_s(theta) <= K xi with K = sum p_s(theta) sigma_s^{-q}
// over the largest set of the sweep.
inline Check weighted_sum_linear(const WeightModel& w, double xi0, double xi1) {
    Check c;
    double K = 0.0;
    for (const auto& s : build_lambda(xi1, w))
        K += p_weight(s, w.theta, w.lambda) * std::pow(sigma_of(s, w), -w.q);
    for (int i = 0; i <= 8; ++i) {
        const double xi = xi0 * std::pow(xi1 / xi0, i / 8.0);
        double sum = 0.0;
        for (const auto& s : build_lambda(xi, w)) sum += p_weight(s, w.theta, w.lambda);
        if (sum > K * xi * (1.0 + 1e-12)) c.fail(str("sum p_s = ", sum, " > K xi = ", K * xi, " at xi=", xi));
    }
    return c;
}

inline Check triple_count(const WeightModel& w, double xi) {
    Check c;
    const auto plan = build_plan(xi, w);
    const std::size_t brute = count_triples(plan.lambda_set);
    if (brute != plan.triples.size()) c.fail(str("stored ", plan.triples.size(), " brute force ", brute));
    return c;
}

// Cardinality at the nodes, the deflation bound, and linear trends in s of
// log ||L_{s;k}||_{L2(gamma)} and of log(sum |b_l|).
inline Check lagrange_bounds(int max_s = 30) {
    Check c;
    std::vector<double> log_norm, log_coef;
    for (int s = 0; s <= max_s; ++s) {
        const LagrangeBasis b(s);
        const auto& fam = b.nodes();
        for (std::size_t p = 0; p < fam.size(); ++p)
            for (std::size_t q = 0; q < fam.size(); ++q) {
                const double v = b.eval_at(p, fam.nodes()[q]);
                if (std::abs(v - (p == q ? 1.0 : 0.0)) > 1e-9) c.fail(str("cardinality residual at order ", s));
            }
        if (!b.deflation_bound_held()) c.fail(str("deflation bound violated at order ", s));
        const NodeFamily quad = gauss_hermite_nodes(s + 1);
        const auto qw = gauss_hermite_weights(quad);
        double nmax = 0.0, cmax = 0.0;
        for (std::size_t p = 0; p < fam.size(); ++p) {
            double sq = 0.0;
            for (std::size_t i = 0; i < quad.size(); ++i) {
                const double v = b.eval_at(p, quad.nodes()[i]);
                sq += qw[i] * v * v;
            }
            nmax = std::max(nmax, std::sqrt(sq));
            double cs = 0.0;
            for (double x : b.coeffs_at(p)) cs += std::abs(x);
            cmax = std::max(cmax, cs);
        }
        log_norm.push_back(std::log(nmax));
        log_coef.push_back(std::log(cmax));
    }
    auto linear_envelope = [&](const std::vector<double>& ys, const char* what) {
        // Least-squares line; every point must lie within 1 of it.
        const double n = static_cast<double>(ys.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < ys.size(); ++i) {
            sx += i;
            sy += ys[i];
            sxx += double(i) * i;
            sxy += i * ys[i];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double icpt = (sy - slope * sx) / n;
        for (std::size_t i = 0; i < ys.size(); ++i)
            if (ys[i] > slope * i + icpt + 1.0) c.fail(str(what, " above linear trend at s=", i));
        if (!(slope < 1.0)) c.fail(str(what, " slope ", slope));
    };
    linear_envelope(log_norm, "log Lagrange norm");
    linear_envelope(log_coef, "log coefficient sum");
    return c;
}

// A random network: `layers` hidden layers of `width` relu neurons reading
// random earlier nodes, then `outputs` affine outputs.
inline ReluNetwork random_network(std::size_t input_dim, int layers, int width, std::size_t outputs,
                                  std::uint64_t seed) {
    NetBuilder b(input_dim);
    std::vector<NetBuilder::Node> nodes;
    for (std::size_t i = 0; i < input_dim; ++i) nodes.push_back(b.input(i));
    std::uint64_t draw = 0;
    auto lin = [&](std::size_t fanin) {
        SampleStream rs(seed, "random-net", draw++);
        NetBuilder::Lin l;
        for (std::size_t t = 0; t < fanin; ++t) {
            const auto pick = static_cast<std::size_t>(rs.uniform() * nodes.size());
            l.add(nodes[std::min(pick, nodes.size() - 1)], 2.0 * rs.uniform() - 1.0);
        }
        l.bias = 0.5 * (2.0 * rs.uniform() - 1.0);
        return l;
    };
    for (int l = 0; l < layers; ++l) {
        std::vector<NetBuilder::Node> fresh;
        for (int k = 0; k < width; ++k) fresh.push_back(b.relu(lin(3), l + 1));
        nodes.insert(nodes.end(), fresh.begin(), fresh.end());
    }
    std::vector<NetBuilder::Lin> outs;
    for (std::size_t o = 0; o < outputs; ++o) outs.push_back(lin(4));
    return b.build(outs, layers + 1);
}

inline std::vector<double> random_point(std::size_t dims, std::uint64_t seed, std::uint64_t i, double half = 2.0) {
    SampleStream rs(seed, "random-point", i);
    std::vector<double> x(dims);
    for (auto& v : x) v = half * (2.0 * rs.uniform() - 1.0);
    return x;
}

// parallelize and concatenate agree with the direct computation to 1e-10 at
// 1000 points and keep their cached W equal to a recount.
inline Check network_algebra(std::size_t points = 1000) {
    Check c;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const ReluNetwork a = random_network(3, 1 + seed % 3, 4, 2, seed);
        const ReluNetwork b2 = random_network(3, 2 + seed % 2, 3, 2, seed + 100);
        const ReluNetwork inner = random_network(3, 2, 4, 3, seed + 200);
        const std::vector<double> lam{0.75, -1.25};
        const ReluNetwork par = parallelize({a, b2}, lam);
        const ReluNetwork raw = parallelize({a, b2}, lam, Padding::None);
        const ReluNetwork cat = concatenate(inner, a);
        for (const ReluNetwork* n : {&par, &raw, &cat})
            if (n->size() != n->recount_size()) c.fail(str("cached W differs from recount, seed ", seed));
        if (par.depth() != std::max(a.depth(), b2.depth())) c.fail("parallelize depth");
        if (cat.depth() != inner.depth() + a.depth()) c.fail("concatenate depth");
        if (cat.size() > 2 * inner.size() + 2 * a.size()) c.fail(str("concatenate size bound, seed ", seed));
        for (std::size_t i = 0; i < points; ++i) {
            const auto x = random_point(3, seed, i);
            const auto ya = a.eval(x), yb = b2.eval(x), yi = inner.eval(x);
            const auto yp = par.eval(x), yr = raw.eval(x), yc = cat.eval(x), yd = a.eval(yi);
            for (std::size_t o = 0; o < ya.size(); ++o) {
                const double want = lam[0] * ya[o] + lam[1] * yb[o];
                if (std::abs(yp[o] - want) > 1e-10 || std::abs(yr[o] - want) > 1e-10)
                    c.fail(str("parallelize mismatch seed ", seed));
                if (std::abs(yc[o] - yd[o]) > 1e-10) c.fail(str("concatenate mismatch seed ", seed));
            }
        }
    }
    return c;
}

// Exact zero of product networks whenever one coordinate is zero.
inline Check product_zero_annihilation() {
    Check c;
    for (std::size_t d : {2u, 3u, 4u, 8u})
        for (double delta : {1e-2, 1e-4}) {
            const ReluNetwork net = product_net(d, delta);
            for (std::uint64_t i = 0; i < 200; ++i) {
                auto x = random_point(d, 77 + d, i, 1.0);
                x[i % d] = (i & 1) ? 0.0 : -0.0;
                const double v = net.eval(x)[0];
                if (v != 0.0) c.fail(str("d=", d, " delta=", delta, " value ", v));
            }
        }
    return c;
}

}  // namespace rc::props
