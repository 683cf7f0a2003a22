#include "amp/kernels.hpp"

// Scalar reference kernels. These define the semantics the SIMD variants
// are tested against: float32 accumulation, k ascending.

namespace amp::kernels {
namespace {

void gemm_nn_scalar(const float* a, int lda, const float* b, int ldb,
                    float* c, int ldc, int m, int k, int n, bool accumulate) {
    for (int i = 0; i < m; ++i) {
        float* crow = c + static_cast<std::size_t>(i) * ldc;
        if (!accumulate) {
            for (int j = 0; j < n; ++j) crow[j] = 0.0f;
        }
        const float* arow = a + static_cast<std::size_t>(i) * lda;
        for (int kk = 0; kk < k; ++kk) {
            const float av = arow[kk];
            const float* brow = b + static_cast<std::size_t>(kk) * ldb;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void gemm_nt_scalar(const float* a, int lda, const float* b, int ldb,
                    float* c, int ldc, int m, int k, int n, bool accumulate) {
    for (int i = 0; i < m; ++i) {
        const float* arow = a + static_cast<std::size_t>(i) * lda;
        float* crow = c + static_cast<std::size_t>(i) * ldc;
        for (int j = 0; j < n; ++j) {
            const float* brow = b + static_cast<std::size_t>(j) * ldb;
            float acc = 0.0f;
            for (int kk = 0; kk < k; ++kk) acc += arow[kk] * brow[kk];
            crow[j] = accumulate ? crow[j] + acc : acc;
        }
    }
}

void gemm_tn_scalar(const float* a, int lda, const float* b, int ldb,
                    float* c, int ldc, int m, int k, int n, bool accumulate) {
    for (int i = 0; i < m; ++i) {
        float* crow = c + static_cast<std::size_t>(i) * ldc;
        if (!accumulate) {
            for (int j = 0; j < n; ++j) crow[j] = 0.0f;
        }
        for (int kk = 0; kk < k; ++kk) {
            const float av = a[static_cast<std::size_t>(kk) * lda + i];
            const float* brow = b + static_cast<std::size_t>(kk) * ldb;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void add_scalar(const float* a, const float* b, float* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void mul_scalar(const float* a, const float* b, float* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy_scalar(float alpha, const float* x, float* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelSet& scalar_kernels() {
    static const KernelSet set{
        "scalar",        gemm_nn_scalar, gemm_nt_scalar, gemm_tn_scalar,
        add_scalar, mul_scalar, axpy_scalar,
    };
    return set;
}

}  // namespace amp::kernels
