#include "relucoll/product_net.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "relucoll/errors.hpp"

namespace rc {

Lin signed_pair(NetBuilder& b, const Lin& x) {
    const auto p = b.relu(x);
    const auto n = b.relu(x.scaled(-1.0));
    return Lin::of(p).add(n, -1.0);
}

Lin phi1_factor(NetBuilder& b, const Lin& x) {
    // S+ = relu(2x - 2) and S- = relu(-2x - 2) cut the ramps at |x| = 1.
    Lin up = x.scaled(2.0);
    up.bias -= 2.0;
    Lin down = x.scaled(-2.0);
    down.bias -= 2.0;
    const auto s_plus = b.relu(up);
    const auto s_minus = b.relu(down);
    const auto pos = b.relu(Lin(x).add(s_plus, -1.0));
    const auto neg = b.relu(x.scaled(-1.0).add(s_minus, -1.0));
    return Lin::of(pos).add(neg, -1.0);
}

Lin phi0_factor(NetBuilder& b, const Lin& x) {
    const auto a = b.relu(x);
    const auto c = b.relu(x.scaled(-1.0));
    Lin tent = Lin::constant(2.0);
    tent.add(a, -1.0).add(c, -1.0);
    const auto t = b.relu(tent);  // relu(2 - |x|)
    Lin r_pre = Lin::constant(1.0);
    const auto r = b.relu(r_pre.add(t, -1.0));  // relu(1 - t)
    Lin z_pre = Lin::constant(1.0);
    const auto z = b.relu(z_pre.add(r, -1.0));  // min(1, relu(2 - |x|))
    return Lin::of(z);
}

int levels_for(std::size_t d, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("product network: delta must lie in (0,1)");
    if (d < 2) return 1;
    // Each pairwise product errs by at most 4^-n; d-1 products.
    const double need = std::log(2.0 * static_cast<double>(d - 1) / delta) / std::log(4.0);
    return std::max(1, static_cast<int>(std::ceil(need)));
}

namespace {

// t^2 on [0,1] by the sawtooth series, returned as relu(f) so that two
// identical chains give bit-identical nodes.
NetBuilder::Node square_node(NetBuilder& b, const Lin& t_lin, int levels) {
    Lin f = t_lin;
    auto p = b.relu(t_lin);
    Lin q_pre = t_lin;
    q_pre.bias -= 0.5;
    auto q = b.relu(q_pre);
    double scale = 0.25;
    for (int s = 1; s <= levels; ++s) {
        // g_s = 2 p - 4 q
        f.add(p, -2.0 * scale).add(q, 4.0 * scale);
        if (s == levels) break;
        Lin g = Lin::of(p, 2.0).add(q, -4.0);
        Lin g_half = g;
        g_half.bias -= 0.5;
        p = b.relu(g);
        q = b.relu(g_half);
        scale *= 0.25;
    }
    return b.relu(f);
}

Lin pair_product(NetBuilder& b, const Lin& x, const Lin& y, int levels) {
    Lin sum = x.scaled(0.5);
    sum.add(y, 0.5);
    // All three squaring chains start in one layer, so their final nodes share
    // a layer and sit next to each other in any row that reads them.  A zero
    // factor then cancels exactly even after rows of several products merge.
    const int at = std::max(b.layer_of(x), b.layer_of(y)) + 1;
    const auto a_p = b.relu(sum, at);
    const auto a_n = b.relu(sum.scaled(-1.0), at);
    const auto b_p = b.relu(x.scaled(0.5), at);
    const auto b_n = b.relu(x.scaled(-0.5), at);
    const auto c_p = b.relu(y.scaled(0.5), at);
    const auto c_n = b.relu(y.scaled(-0.5), at);
    const auto fa = square_node(b, Lin::of(a_p).add(a_n, 1.0), levels);
    const auto fb = square_node(b, Lin::of(b_p).add(b_n, 1.0), levels);
    const auto fc = square_node(b, Lin::of(c_p).add(c_n, 1.0), levels);
    // xy = 2 ((x+y)/2)^2 - 2 (x/2)^2 - 2 (y/2)^2
    return Lin::of(fa, 2.0).add(fb, -2.0).add(fc, -2.0);
}

}  // namespace

Lin emit_product(NetBuilder& b, std::vector<Lin> factors, int levels) {
    if (factors.empty()) throw DomainError("emit_product: no factors");
    while (factors.size() > 1) {
        std::vector<Lin> next;
        next.reserve((factors.size() + 1) / 2);
        const bool root = factors.size() == 2;
        for (std::size_t i = 0; i + 1 < factors.size(); i += 2) {
            Lin p = pair_product(b, factors[i], factors[i + 1], levels);
            next.push_back(root ? p : signed_pair(b, p));
        }
        if (factors.size() % 2) next.push_back(factors.back());
        factors = std::move(next);
    }
    return factors.front();
}

ReluNetwork phi1_network() {
    NetBuilder b(1);
    const auto out = phi1_factor(b, Lin::of(b.input(0)));
    return b.build({out}, -1, "phi1");
}

ReluNetwork phi0_network() {
    NetBuilder b(1);
    const auto out = phi0_factor(b, Lin::of(b.input(0)));
    return b.build({out}, -1, "phi0");
}

ReluNetwork product_net(std::size_t d, double delta) {
    if (d < 2) throw DomainError("product_net: dimension must be at least 2");
    const int levels = levels_for(d, delta);
    NetBuilder b(d);
    std::vector<Lin> f;
    for (std::size_t j = 0; j < d; ++j) f.push_back(signed_pair(b, Lin::of(b.input(j))));
    const auto out = emit_product(b, std::move(f), levels);
    return b.build({out}, -1, "product d=" + std::to_string(d));
}

ReluNetwork truncated_product_net(std::size_t d, double delta, Gadget which) {
    if (d < 1) throw DomainError("truncated_product_net: dimension must be at least 1");
    const int levels = levels_for(d, delta);
    NetBuilder b(d);
    std::vector<Lin> f;
    for (std::size_t j = 0; j < d; ++j) {
        const Lin x = Lin::of(b.input(j));
        f.push_back(which == Gadget::Phi1 ? phi1_factor(b, x) : phi0_factor(b, x));
    }
    const auto out = emit_product(b, std::move(f), levels);
    return b.build({out}, -1, which == Gadget::Phi1 ? "phi1 product" : "phi0 product");
}

}  // namespace rc
