#include "amp/kernels.hpp"

#if defined(AMP_HAVE_AVX2)

#include <immintrin.h>

// AVX2+FMA kernels. Same loop structure as the scalar reference (k
// ascending per output element); vector lanes cover the n axis for the
// broadcast forms and the k axis for the dot-product form.

namespace amp::kernels {
namespace {

inline float hsum8(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    __m128 s = _mm_add_ps(lo, hi);
    s = _mm_add_ps(s, _mm_movehl_ps(s, s));
    s = _mm_add_ss(s, _mm_shuffle_ps(s, s, 0x1));
    return _mm_cvtss_f32(s);
}

void gemm_nn_avx2(const float* a, int lda, const float* b, int ldb,
                  float* c, int ldc, int m, int k, int n, bool accumulate) {
    for (int i = 0; i < m; ++i) {
        float* crow = c + static_cast<std::size_t>(i) * ldc;
        if (!accumulate) {
            for (int j = 0; j < n; ++j) crow[j] = 0.0f;
        }
        const float* arow = a + static_cast<std::size_t>(i) * lda;
        for (int kk = 0; kk < k; ++kk) {
            const float av = arow[kk];
            const __m256 avv = _mm256_set1_ps(av);
            const float* brow = b + static_cast<std::size_t>(kk) * ldb;
            int j = 0;
            for (; j + 8 <= n; j += 8) {
                __m256 cv = _mm256_loadu_ps(crow + j);
                cv = _mm256_fmadd_ps(avv, _mm256_loadu_ps(brow + j), cv);
                _mm256_storeu_ps(crow + j, cv);
            }
            for (; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void gemm_nt_avx2(const float* a, int lda, const float* b, int ldb,
                  float* c, int ldc, int m, int k, int n, bool accumulate) {
    for (int i = 0; i < m; ++i) {
        const float* arow = a + static_cast<std::size_t>(i) * lda;
        float* crow = c + static_cast<std::size_t>(i) * ldc;
        for (int j = 0; j < n; ++j) {
            const float* brow = b + static_cast<std::size_t>(j) * ldb;
            __m256 accv = _mm256_setzero_ps();
            int kk = 0;
            for (; kk + 8 <= k; kk += 8) {
                accv = _mm256_fmadd_ps(_mm256_loadu_ps(arow + kk),
                                       _mm256_loadu_ps(brow + kk), accv);
            }
            float acc = hsum8(accv);
            for (; kk < k; ++kk) acc += arow[kk] * brow[kk];
            crow[j] = accumulate ? crow[j] + acc : acc;
        }
    }
}

void gemm_tn_avx2(const float* a, int lda, const float* b, int ldb,
                  float* c, int ldc, int m, int k, int n, bool accumulate) {
    for (int i = 0; i < m; ++i) {
        float* crow = c + static_cast<std::size_t>(i) * ldc;
        if (!accumulate) {
            for (int j = 0; j < n; ++j) crow[j] = 0.0f;
        }
        for (int kk = 0; kk < k; ++kk) {
            const float av = a[static_cast<std::size_t>(kk) * lda + i];
            const __m256 avv = _mm256_set1_ps(av);
            const float* brow = b + static_cast<std::size_t>(kk) * ldb;
            int j = 0;
            for (; j + 8 <= n; j += 8) {
                __m256 cv = _mm256_loadu_ps(crow + j);
                cv = _mm256_fmadd_ps(avv, _mm256_loadu_ps(brow + j), cv);
                _mm256_storeu_ps(crow + j, cv);
            }
            for (; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void add_avx2(const float* a, const float* b, float* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(out + i, _mm256_add_ps(_mm256_loadu_ps(a + i),
                                                _mm256_loadu_ps(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] + b[i];
}

void mul_avx2(const float* a, const float* b, float* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(a + i),
                                                _mm256_loadu_ps(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy_avx2(float alpha, const float* x, float* y, std::size_t n) {
    const __m256 av = _mm256_set1_ps(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 yv = _mm256_loadu_ps(y + i);
        yv = _mm256_fmadd_ps(av, _mm256_loadu_ps(x + i), yv);
        _mm256_storeu_ps(y + i, yv);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelSet& avx2_kernels() {
    static const KernelSet set{
        "avx2",      gemm_nn_avx2, gemm_nt_avx2, gemm_tn_avx2,
        add_avx2, mul_avx2, axpy_avx2,
    };
    return set;
}

}  // namespace amp::kernels

#endif  // AMP_HAVE_AVX2
