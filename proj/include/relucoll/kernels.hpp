#pragma once
// Forward-pass row kernels.  Activations are stored neuron-major: neuron c
// occupies act[c*batch .. c*batch+batch).  Every variant accumulates a row's
// terms in stored column order with separate multiply and add, so all
// variants produce bit-identical results.

#include <cstddef>
#include <cstdint>

namespace rc::kernels {

using RowFn = void (*)(const std::uint32_t* cols, const double* w, std::size_t nnz, double bias, const double* act,
                       std::size_t batch, double* out, bool relu);

struct Dispatch {
    const char* name;
    RowFn row;
};

const Dispatch& scalar();
// nullptr when the CPU (or the build target) lacks the instruction set.
const Dispatch* avx2();
const Dispatch* neon();

// Chosen once: RELUCOLL_SIMD=scalar|avx2|neon forces a variant, otherwise the
// widest supported one is used.
const Dispatch& active();

}  // namespace rc::kernels
