#pragma once
// ReLU networks in which every layer reads the concatenation of the input and
// all earlier layer outputs.  Hidden layers apply max(t, 0); the last layer
// is affine.  Weights are stored sparsely per row (CSR, column-sorted).

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relucoll/matrix.hpp"

namespace rc {

struct Layer {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<std::uint32_t> row_ptr{0};
    std::vector<std::uint32_t> col_idx;
    std::vector<double> val;
    std::vector<double> bias;

    std::size_t nonzeros() const;  // nonzero weights plus nonzero biases
    static Layer from_dense(std::uint32_t rows, std::uint32_t cols, const std::vector<double>& row_major,
                            const std::vector<double>& bias);
    std::vector<double> dense() const;
};

class ReluNetwork {
public:
    ReluNetwork() = default;
    ReluNetwork(std::size_t input_dim, std::vector<Layer> layers, std::string label = {});

    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return layers_.empty() ? 0 : layers_.back().rows; }
    const std::vector<Layer>& layers() const { return layers_; }
    const std::string& label() const { return label_; }
    void set_label(std::string l) { label_ = std::move(l); }

    // W: nonzero weights and biases.  L: number of layers.
    std::size_t size() const { return size_; }
    std::size_t depth() const { return layers_.size(); }
    std::size_t recount_size() const;

    // Size of the same function under the skip-connection convention, i.e.
    // without identity-carry padding.  Equals size() unless padding was added.
    std::size_t unpadded_size() const { return unpadded_size_; }
    void set_unpadded_size(std::size_t w) { unpadded_size_ = w; }

    std::vector<double> eval(std::span<const double> x) const;
    // X: rows are points.  Returns rows of outputs.
    Mat eval_batch(const Mat& X) const;

private:
    void validate() const;

    std::size_t input_dim_ = 0;
    std::vector<Layer> layers_;
    std::string label_;
    std::size_t size_ = 0;
    std::size_t unpadded_size_ = 0;
};

// Forward pass with an explicit kernel choice (equivalence tests).
namespace kernels {
struct Dispatch;
}
Mat eval_batch_with(const ReluNetwork& net, const Mat& X, const kernels::Dispatch& k);

std::vector<double> net_eval(const ReluNetwork& net, std::span<const double> x);

// Graph-level construction helper.  Nodes 0..input_dim-1 are inputs (layer 0);
// every relu() creates a neuron in a layer strictly after all nodes it reads.
class NetBuilder {
public:
    using Node = std::uint32_t;

    struct Lin {
        std::vector<std::pair<Node, double>> terms;
        double bias = 0.0;

        static Lin of(Node n, double w = 1.0) { return Lin{{{n, w}}, 0.0}; }
        static Lin constant(double c) { return Lin{{}, c}; }
        Lin& add(Node n, double w) {
            terms.emplace_back(n, w);
            return *this;
        }
        Lin& add(const Lin& o, double scale) {
            for (const auto& [n, w] : o.terms) terms.emplace_back(n, w * scale);
            bias += o.bias * scale;
            return *this;
        }
        Lin scaled(double s) const {
            Lin r;
            r.add(*this, s);
            return r;
        }
    };

    explicit NetBuilder(std::size_t input_dim);

    std::size_t input_dim() const { return input_dim_; }
    Node input(std::size_t i) const;
    int layer_of(Node n) const { return layer_[n]; }
    int layer_of(const Lin& l) const;
    std::size_t neuron_count() const { return layer_.size() - input_dim_; }

    // at_layer < 0: place right after the deepest referenced node.
    Node relu(const Lin& pre, int at_layer = -1);

    // Copies a network's hidden neurons, replacing input i by inputs[i] and
    // shifting layer l to offset + l.  Returns the network's output layer as
    // affine expressions over builder nodes.
    std::vector<Lin> import(const class ReluNetwork& net, const std::vector<Lin>& inputs, int offset);

    // out_layer < 0: one past the deepest hidden layer used.
    ReluNetwork build(const std::vector<Lin>& outputs, int out_layer = -1, std::string label = {}) const;

private:
    std::size_t input_dim_;
    std::vector<int> layer_;
    std::vector<Lin> pre_;  // indexed by node id; empty for inputs
};

enum class Padding { None, IdentityCarry };

// sum_j coeffs[j] * nets[j](x).  With IdentityCarry, outputs of shallower
// networks are carried to the common depth through sigma(t) - sigma(-t) pairs
// and the carried cost is counted in size(); unpadded_size() reports the
// skip-connection count.
ReluNetwork parallelize(const std::vector<ReluNetwork>& nets, const std::vector<double>& coeffs,
                        Padding padding = Padding::IdentityCarry);

// second(first(x)); depth L1 + L2, size <= 2 W1 + 2 W2.
ReluNetwork concatenate(const ReluNetwork& first, const ReluNetwork& second);

ReluNetwork identity_network(std::size_t dim);

}  // namespace rc
