#include "relucoll/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

#if defined(__x86_64__) || defined(_M_X64)
#define RC_HAVE_X86 1
#include <immintrin.h>
#else
#define RC_HAVE_X86 0
#endif

#if defined(__aarch64__)
#define RC_HAVE_NEON 1
#include <arm_neon.h>
#else
#define RC_HAVE_NEON 0
#endif

namespace rc::kernels {

namespace {

constexpr std::size_t kMaxBatch = 256;

void row_scalar(const std::uint32_t* cols, const double* w, std::size_t nnz, double bias, const double* act,
                std::size_t batch, double* out, bool relu) {
    double acc[kMaxBatch];
    for (std::size_t b0 = 0; b0 < batch; b0 += kMaxBatch) {
        const std::size_t nb = (batch - b0 < kMaxBatch) ? batch - b0 : kMaxBatch;
        for (std::size_t b = 0; b < nb; ++b) acc[b] = bias;
        for (std::size_t i = 0; i < nnz; ++i) {
            const double wi = w[i];
            const double* a = act + static_cast<std::size_t>(cols[i]) * batch + b0;
            for (std::size_t b = 0; b < nb; ++b) {
                const double prod = wi * a[b];
                acc[b] = acc[b] + prod;
            }
        }
        if (relu)
            for (std::size_t b = 0; b < nb; ++b) out[b0 + b] = acc[b] > 0.0 ? acc[b] : 0.0;
        else
            for (std::size_t b = 0; b < nb; ++b) out[b0 + b] = acc[b];
    }
}

#if RC_HAVE_X86
__attribute__((target("avx2"))) void row_avx2(const std::uint32_t* cols, const double* w, std::size_t nnz,
                                               double bias, const double* act, std::size_t batch, double* out,
                                               bool relu) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d vb = _mm256_set1_pd(bias);
    std::size_t b = 0;
    // 16 points per pass: four independent accumulators.
    for (; b + 16 <= batch; b += 16) {
        __m256d a0 = vb, a1 = vb, a2 = vb, a3 = vb;
        for (std::size_t i = 0; i < nnz; ++i) {
            const __m256d wi = _mm256_set1_pd(w[i]);
            const double* a = act + static_cast<std::size_t>(cols[i]) * batch + b;
            a0 = _mm256_add_pd(a0, _mm256_mul_pd(wi, _mm256_loadu_pd(a)));
            a1 = _mm256_add_pd(a1, _mm256_mul_pd(wi, _mm256_loadu_pd(a + 4)));
            a2 = _mm256_add_pd(a2, _mm256_mul_pd(wi, _mm256_loadu_pd(a + 8)));
            a3 = _mm256_add_pd(a3, _mm256_mul_pd(wi, _mm256_loadu_pd(a + 12)));
        }
        if (relu) {
            a0 = _mm256_max_pd(a0, zero);
            a1 = _mm256_max_pd(a1, zero);
            a2 = _mm256_max_pd(a2, zero);
            a3 = _mm256_max_pd(a3, zero);
        }
        _mm256_storeu_pd(out + b, a0);
        _mm256_storeu_pd(out + b + 4, a1);
        _mm256_storeu_pd(out + b + 8, a2);
        _mm256_storeu_pd(out + b + 12, a3);
    }
    for (; b + 4 <= batch; b += 4) {
        __m256d a0 = vb;
        for (std::size_t i = 0; i < nnz; ++i) {
            const __m256d wi = _mm256_set1_pd(w[i]);
            a0 = _mm256_add_pd(a0, _mm256_mul_pd(wi, _mm256_loadu_pd(act + static_cast<std::size_t>(cols[i]) * batch + b)));
        }
        if (relu) a0 = _mm256_max_pd(a0, zero);
        _mm256_storeu_pd(out + b, a0);
    }
    for (; b < batch; ++b) {
        double acc = bias;
        for (std::size_t i = 0; i < nnz; ++i) {
            const double prod = w[i] * act[static_cast<std::size_t>(cols[i]) * batch + b];
            acc = acc + prod;
        }
        out[b] = relu ? (acc > 0.0 ? acc : 0.0) : acc;
    }
}

bool cpu_has_avx2() {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
}
#endif

#if RC_HAVE_NEON
void row_neon(const std::uint32_t* cols, const double* w, std::size_t nnz, double bias, const double* act,
              std::size_t batch, double* out, bool relu) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t vb = vdupq_n_f64(bias);
    std::size_t b = 0;
    for (; b + 2 <= batch; b += 2) {
        float64x2_t a0 = vb;
        for (std::size_t i = 0; i < nnz; ++i) {
            const float64x2_t x = vld1q_f64(act + static_cast<std::size_t>(cols[i]) * batch + b);
            a0 = vaddq_f64(a0, vmulq_f64(vdupq_n_f64(w[i]), x));
        }
        if (relu) a0 = vmaxq_f64(a0, zero);
        vst1q_f64(out + b, a0);
    }
    for (; b < batch; ++b) {
        double acc = bias;
        for (std::size_t i = 0; i < nnz; ++i) {
            const double prod = w[i] * act[static_cast<std::size_t>(cols[i]) * batch + b];
            acc = acc + prod;
        }
        out[b] = relu ? (acc > 0.0 ? acc : 0.0) : acc;
    }
}
#endif

const Dispatch kScalar{"scalar", &row_scalar};
#if RC_HAVE_X86
const Dispatch kAvx2{"avx2", &row_avx2};
#endif
#if RC_HAVE_NEON
const Dispatch kNeon{"neon", &row_neon};
#endif

const Dispatch& choose() {
    const char* env = std::getenv("RELUCOLL_SIMD");
    const std::string want = env ? env : "auto";
    if (want == "scalar") return kScalar;
    if (want == "avx2" || want == "auto")
        if (const Dispatch* d = avx2()) return *d;
    if (want == "neon" || want == "auto")
        if (const Dispatch* d = neon()) return *d;
    return kScalar;
}

}  // namespace

const Dispatch& scalar() { return kScalar; }

const Dispatch* avx2() {
#if RC_HAVE_X86
    static const bool ok = cpu_has_avx2();
    return ok ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const Dispatch* neon() {
#if RC_HAVE_NEON
    return &kNeon;
#else
    return nullptr;
#endif
}

const Dispatch& active() {
    static const Dispatch& d = choose();
    return d;
}

}  // namespace rc::kernels
