#include <doctest.h>

#include <cstring>
#include <vector>

#include "relucoll/kernels.hpp"
#include "relucoll/network.hpp"
#include "relucoll/product_net.hpp"
#include "relucoll/rng.hpp"
#include "support/properties.hpp"

using namespace rc;

namespace {

std::vector<const kernels::Dispatch*> variants() {
    std::vector<const kernels::Dispatch*> v{&kernels::scalar()};
    if (kernels::avx2()) v.push_back(kernels::avx2());
    if (kernels::neon()) v.push_back(kernels::neon());
    return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

Mat random_inputs(std::size_t n, std::size_t dims, std::uint64_t seed) {
    Mat X(n, dims);
    for (std::size_t i = 0; i < n; ++i) {
        SampleStream rs(seed, "kernel-inputs", i);
        for (std::size_t j = 0; j < dims; ++j) X(i, j) = 4.0 * rs.uniform() - 2.0;
    }
    return X;
}

}  // namespace

TEST_CASE("active kernel is a known variant") {
    const std::string name = kernels::active().name;
    CHECK((name == "scalar" || name == "avx2" || name == "neon"));
}

TEST_CASE("row kernels are bit-identical across variants") {
    // Batch sizes that exercise full vectors and every remainder length.
    for (std::size_t batch : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 13u, 64u, 67u}) {
        const std::size_t neurons = 9;
        std::vector<double> act(neurons * batch);
        SampleStream rs(5, "kernel-act", batch);
        for (auto& a : act) a = 2.0 * rs.uniform() - 1.0;
        const std::vector<std::uint32_t> cols{0, 2, 3, 5, 8};
        const std::vector<double> w{0.3, -1.7, 2.25, 1e-3, -0.5};
        for (bool relu : {false, true}) {
            std::vector<double> ref(batch);
            kernels::scalar().row(cols.data(), w.data(), cols.size(), 0.125, act.data(), batch, ref.data(), relu);
            for (const auto* k : variants()) {
                std::vector<double> out(batch, 99.0);
                k->row(cols.data(), w.data(), cols.size(), 0.125, act.data(), batch, out.data(), relu);
                CHECK_MESSAGE(same_bits(ref, out), k->name << " batch " << batch);
            }
            // Empty rows produce the bias alone.
            std::vector<double> out(batch);
            kernels::scalar().row(cols.data(), w.data(), 0, -0.5, act.data(), batch, out.data(), relu);
            for (double v : out) CHECK(v == (relu ? 0.0 : -0.5));
        }
    }
}

TEST_CASE("network forward pass is bit-identical across variants") {
    std::vector<ReluNetwork> nets{props::random_network(3, 4, 6, 2, 9), product_net(4, 1e-3),
                                  truncated_product_net(3, 1e-2, Gadget::Phi1)};
    for (const auto& net : nets) {
        const Mat X = random_inputs(37, net.input_dim(), 21);
        const Mat ref = eval_batch_with(net, X, kernels::scalar());
        for (const auto* k : variants()) {
            const Mat Y = eval_batch_with(net, X, *k);
            CHECK_MESSAGE(same_bits(ref.data, Y.data), k->name);
        }
        // The batch path agrees bitwise with single-point evaluation.
        const Mat Y = net.eval_batch(X);
        for (std::size_t i = 0; i < X.rows; ++i) {
            const auto y = net.eval(X.row(i));
            CHECK(same_bits(y, std::vector<double>(Y.row(i).begin(), Y.row(i).end())));
        }
    }
}
