#include "relucoll/network.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "relucoll/errors.hpp"
#include "relucoll/kernels.hpp"

namespace rc {

std::size_t Layer::nonzeros() const {
    std::size_t n = 0;
    for (double v : val) n += (v != 0.0);
    for (double b : bias) n += (b != 0.0);
    return n;
}

Layer Layer::from_dense(std::uint32_t rows, std::uint32_t cols, const std::vector<double>& row_major,
                        const std::vector<double>& bias) {
    if (row_major.size() != static_cast<std::size_t>(rows) * cols || bias.size() != rows)
        throw DomainError("Layer::from_dense: shape mismatch");
    Layer l;
    l.rows = rows;
    l.cols = cols;
    l.bias = bias;
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t c = 0; c < cols; ++c) {
            const double v = row_major[static_cast<std::size_t>(r) * cols + c];
            if (v != 0.0) {
                l.col_idx.push_back(c);
                l.val.push_back(v);
            }
        }
        l.row_ptr.push_back(static_cast<std::uint32_t>(l.col_idx.size()));
    }
    return l;
}

std::vector<double> Layer::dense() const {
    std::vector<double> d(static_cast<std::size_t>(rows) * cols, 0.0);
    for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p)
            d[static_cast<std::size_t>(r) * cols + col_idx[p]] = val[p];
    return d;
}

ReluNetwork::ReluNetwork(std::size_t input_dim, std::vector<Layer> layers, std::string label)
    : input_dim_(input_dim), layers_(std::move(layers)), label_(std::move(label)) {
    validate();
    size_ = recount_size();
    unpadded_size_ = size_;
}

void ReluNetwork::validate() const {
    if (input_dim_ == 0) throw DomainError("ReluNetwork: input dimension must be positive");
    if (layers_.empty()) throw DomainError("ReluNetwork: at least the affine output layer is required");
    std::size_t cols = input_dim_;
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        const Layer& l = layers_[li];
        const std::string where = "layer " + std::to_string(li + 1);
        if (l.cols != cols) throw DomainError("ReluNetwork: " + where + " column count must equal input plus earlier widths");
        if (l.row_ptr.size() != static_cast<std::size_t>(l.rows) + 1 || l.bias.size() != l.rows)
            throw DomainError("ReluNetwork: " + where + " malformed row structure");
        if (l.col_idx.size() != l.val.size() || l.row_ptr.back() != l.col_idx.size())
            throw DomainError("ReluNetwork: " + where + " malformed entries");
        for (std::uint32_t r = 0; r < l.rows; ++r) {
            for (std::uint32_t p = l.row_ptr[r]; p < l.row_ptr[r + 1]; ++p) {
                if (l.col_idx[p] >= l.cols) throw DomainError("ReluNetwork: " + where + " column out of range");
                if (p > l.row_ptr[r] && l.col_idx[p] <= l.col_idx[p - 1])
                    throw DomainError("ReluNetwork: " + where + " columns must be strictly increasing");
            }
        }
        cols += l.rows;
    }
}

std::size_t ReluNetwork::recount_size() const {
    std::size_t w = 0;
    for (const auto& l : layers_) w += l.nonzeros();
    return w;
}

Mat eval_batch_with(const ReluNetwork& net, const Mat& X, const kernels::Dispatch& k) {
    if (X.cols != net.input_dim())
        throw DomainError("net_eval: input has " + std::to_string(X.cols) + " coordinates, network expects " +
                          std::to_string(net.input_dim()));
    const std::size_t batch = X.rows;
    Mat Y(batch, net.output_dim());
    if (batch == 0) return Y;
    std::size_t total = net.input_dim();
    for (const auto& l : net.layers()) total += l.rows;
    std::vector<double> act(total * batch);
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t i = 0; i < X.cols; ++i) act[i * batch + b] = X(b, i);
    std::size_t base = net.input_dim();
    const auto& layers = net.layers();
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const Layer& l = layers[li];
        const bool hidden = li + 1 < layers.size();
        for (std::uint32_t r = 0; r < l.rows; ++r) {
            const std::uint32_t p0 = l.row_ptr[r];
            k.row(l.col_idx.data() + p0, l.val.data() + p0, l.row_ptr[r + 1] - p0, l.bias[r], act.data(), batch,
                  act.data() + (base + r) * batch, hidden);
        }
        base += l.rows;
    }
    const std::size_t out0 = total - net.output_dim();
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t o = 0; o < net.output_dim(); ++o) Y(b, o) = act[(out0 + o) * batch + b];
    return Y;
}

Mat ReluNetwork::eval_batch(const Mat& X) const { return eval_batch_with(*this, X, kernels::active()); }

std::vector<double> ReluNetwork::eval(std::span<const double> x) const {
    Mat X(1, x.size());
    std::copy(x.begin(), x.end(), X.data.begin());
    Mat Y = eval_batch(X);
    return std::vector<double>(Y.data.begin(), Y.data.end());
}

std::vector<double> net_eval(const ReluNetwork& net, std::span<const double> x) { return net.eval(x); }

// ---------------------------------------------------------------------------

NetBuilder::NetBuilder(std::size_t input_dim) : input_dim_(input_dim), layer_(input_dim, 0), pre_(input_dim) {
    if (input_dim == 0) throw DomainError("NetBuilder: input dimension must be positive");
}

NetBuilder::Node NetBuilder::input(std::size_t i) const {
    if (i >= input_dim_) throw DomainError("NetBuilder: input index out of range");
    return static_cast<Node>(i);
}

int NetBuilder::layer_of(const Lin& l) const {
    int m = 0;
    for (const auto& [n, w] : l.terms) m = std::max(m, layer_[n]);
    return m;
}

NetBuilder::Node NetBuilder::relu(const Lin& pre, int at_layer) {
    const int need = layer_of(pre) + 1;
    int layer = at_layer < 0 ? need : at_layer;
    if (layer < need) throw DomainError("NetBuilder: neuron placed before one of its inputs");
    for (const auto& [n, w] : pre.terms)
        if (n >= layer_.size()) throw DomainError("NetBuilder: unknown node");
    layer_.push_back(layer);
    pre_.push_back(pre);
    return static_cast<Node>(layer_.size() - 1);
}

std::vector<NetBuilder::Lin> NetBuilder::import(const ReluNetwork& net, const std::vector<Lin>& inputs, int offset) {
    if (inputs.size() != net.input_dim()) throw DomainError("NetBuilder::import: input substitution size mismatch");
    for (const auto& in : inputs)
        if (layer_of(in) > offset) throw DomainError("NetBuilder::import: substituted input deeper than offset");
    std::vector<Lin> column_expr(inputs);  // expression for each column of net
    const auto& layers = net.layers();
    std::vector<Lin> outputs;
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const Layer& l = layers[li];
        const bool hidden = li + 1 < layers.size();
        std::vector<Lin> produced;
        produced.reserve(l.rows);
        for (std::uint32_t r = 0; r < l.rows; ++r) {
            Lin pre = Lin::constant(l.bias[r]);
            for (std::uint32_t p = l.row_ptr[r]; p < l.row_ptr[r + 1]; ++p) pre.add(column_expr[l.col_idx[p]], l.val[p]);
            if (hidden)
                produced.push_back(Lin::of(relu(pre, offset + static_cast<int>(li) + 1)));
            else
                outputs.push_back(std::move(pre));
        }
        for (auto& e : produced) column_expr.push_back(std::move(e));
    }
    return outputs;
}

ReluNetwork NetBuilder::build(const std::vector<Lin>& outputs, int out_layer, std::string label) const {
    int max_hidden = 0;
    for (std::size_t n = input_dim_; n < layer_.size(); ++n) max_hidden = std::max(max_hidden, layer_[n]);
    int deepest_ref = 0;
    for (const auto& o : outputs) deepest_ref = std::max(deepest_ref, layer_of(o));
    int L = std::max(max_hidden, deepest_ref) + 1;
    if (out_layer >= 0) {
        if (out_layer < L) throw DomainError("NetBuilder::build: requested output layer too shallow");
        L = out_layer;
    }
    // Column numbering: inputs, then layer 1 neurons in creation order, ...
    std::vector<std::vector<Node>> by_layer(static_cast<std::size_t>(L));
    for (std::size_t n = input_dim_; n < layer_.size(); ++n) by_layer[static_cast<std::size_t>(layer_[n])].push_back(static_cast<Node>(n));
    std::vector<std::uint32_t> column(layer_.size(), 0);
    for (std::size_t i = 0; i < input_dim_; ++i) column[i] = static_cast<std::uint32_t>(i);
    std::uint32_t next = static_cast<std::uint32_t>(input_dim_);
    for (int l = 1; l < L; ++l)
        for (Node n : by_layer[static_cast<std::size_t>(l)]) column[n] = next++;

    auto emit_row = [&](Layer& layer, const Lin& pre) {
        std::map<std::uint32_t, double> merged;
        for (const auto& [n, w] : pre.terms) merged[column[n]] += w;
        for (const auto& [c, w] : merged) {
            if (w == 0.0) continue;
            layer.col_idx.push_back(c);
            layer.val.push_back(w);
        }
        layer.bias.push_back(pre.bias);
        layer.row_ptr.push_back(static_cast<std::uint32_t>(layer.col_idx.size()));
        ++layer.rows;
    };

    std::vector<Layer> layers(static_cast<std::size_t>(L));
    std::uint32_t cols = static_cast<std::uint32_t>(input_dim_);
    for (int l = 1; l <= L; ++l) {
        Layer& layer = layers[static_cast<std::size_t>(l - 1)];
        layer.cols = cols;
        if (l < L)
            for (Node n : by_layer[static_cast<std::size_t>(l)]) emit_row(layer, pre_[n]);
        else
            for (const auto& o : outputs) emit_row(layer, o);
        cols += layer.rows;
    }
    return ReluNetwork(input_dim_, std::move(layers), std::move(label));
}

// ---------------------------------------------------------------------------

namespace {

std::vector<NetBuilder::Lin> identity_inputs(const NetBuilder& b) {
    std::vector<NetBuilder::Lin> in;
    for (std::size_t i = 0; i < b.input_dim(); ++i) in.push_back(NetBuilder::Lin::of(b.input(i)));
    return in;
}

ReluNetwork parallelize_impl(const std::vector<ReluNetwork>& nets, const std::vector<double>& coeffs, bool pad) {
    const std::size_t in_dim = nets.front().input_dim();
    const std::size_t out_dim = nets.front().output_dim();
    std::size_t Lmax = 0;
    for (const auto& n : nets) Lmax = std::max(Lmax, n.depth());
    NetBuilder b(in_dim);
    const auto inputs = identity_inputs(b);
    std::vector<NetBuilder::Lin> out(out_dim);
    for (std::size_t j = 0; j < nets.size(); ++j) {
        const auto outs = b.import(nets[j], inputs, 0);
        const int Lj = static_cast<int>(nets[j].depth());
        for (std::size_t o = 0; o < out_dim; ++o) {
            if (!pad || nets[j].depth() == Lmax) {
                out[o].add(outs[o], coeffs[j]);
                continue;
            }
            auto p = b.relu(outs[o], Lj);
            auto n = b.relu(outs[o].scaled(-1.0), Lj);
            for (int l = Lj + 1; l < static_cast<int>(Lmax); ++l) {
                p = b.relu(NetBuilder::Lin::of(p), l);
                n = b.relu(NetBuilder::Lin::of(n), l);
            }
            out[o].add(p, coeffs[j]);
            out[o].add(n, -coeffs[j]);
        }
    }
    return b.build(out, static_cast<int>(Lmax));
}

}  // namespace

ReluNetwork parallelize(const std::vector<ReluNetwork>& nets, const std::vector<double>& coeffs, Padding padding) {
    if (nets.empty()) throw DomainError("parallelize: empty network list");
    if (coeffs.size() != nets.size()) throw DomainError("parallelize: one coefficient per network required");
    for (const auto& n : nets) {
        if (n.input_dim() != nets.front().input_dim()) throw DomainError("parallelize: input dimensions differ");
        if (n.output_dim() != nets.front().output_dim()) throw DomainError("parallelize: output dimensions differ");
    }
    ReluNetwork raw = parallelize_impl(nets, coeffs, false);
    if (padding == Padding::None) return raw;
    ReluNetwork padded = parallelize_impl(nets, coeffs, true);
    padded.set_unpadded_size(raw.size());
    return padded;
}

ReluNetwork concatenate(const ReluNetwork& first, const ReluNetwork& second) {
    if (first.output_dim() != second.input_dim())
        throw DomainError("concatenate: output dimension of the first network must equal input dimension of the second");
    NetBuilder b(first.input_dim());
    const auto outs = b.import(first, identity_inputs(b), 0);
    const int L1 = static_cast<int>(first.depth());
    std::vector<NetBuilder::Lin> mid;
    for (const auto& o : outs) {
        const auto p = b.relu(o, L1);
        const auto n = b.relu(o.scaled(-1.0), L1);
        mid.push_back(NetBuilder::Lin::of(p).add(n, -1.0));
    }
    const auto final_out = b.import(second, mid, L1);
    return b.build(final_out, L1 + static_cast<int>(second.depth()));
}

ReluNetwork identity_network(std::size_t dim) {
    NetBuilder b(dim);
    std::vector<NetBuilder::Lin> out;
    for (std::size_t i = 0; i < dim; ++i) out.push_back(NetBuilder::Lin::of(b.input(i)));
    return b.build(out, 1, "identity");
}

}  // namespace rc
