#pragma once

#include <cstddef>
#include <string>
#include <vector>

// Dense float32 kernels underlying every matrix product in the toolkit.
//
// Two implementations ship: a scalar reference and an AVX2+FMA variant.
// The active one is picked once at startup from CPU capabilities (override
// with AMP_KERNELS=scalar|avx2); both compute each output element by
// accumulating over k in ascending order with float32 accumulators, so
// results are deterministic for a fixed build and machine.
//
// Matrices are row-major with explicit leading dimensions (elements per
// row), which lets callers address per-head column blocks without copies.

namespace amp::kernels {

using GemmFn = void (*)(const float* a, int lda, const float* b, int ldb,
                        float* c, int ldc, int m, int k, int n, bool accumulate);
using MapFn = void (*)(const float* a, const float* b, float* out, std::size_t n);
using AxpyFn = void (*)(float alpha, const float* x, float* y, std::size_t n);

struct KernelSet {
    const char* name;
    GemmFn gemm_nn;  // C[m x n] (+)= A[m x k] * B[k x n]
    GemmFn gemm_nt;  // C[m x n] (+)= A[m x k] * B[n x k]^T
    GemmFn gemm_tn;  // C[m x n] (+)= A[k x m]^T * B[k x n]
    MapFn add;       // out[i] = a[i] + b[i]
    MapFn mul;       // out[i] = a[i] * b[i]
    AxpyFn axpy;     // y[i] += alpha * x[i]
};

const KernelSet& scalar_kernels();
#if defined(AMP_HAVE_AVX2)
const KernelSet& avx2_kernels();
#endif

/// The kernel set in use for this process.
const KernelSet& active();

/// Backends compiled into this binary and usable on this CPU.
std::vector<std::string> available_backends();

/// Force a backend by name ("scalar", "avx2"); throws on unknown/unsupported.
void select(const std::string& name);

/// Worker threads for large gemms. Resolved once from AMP_THREADS (default:
/// hardware concurrency); per-row results do not depend on the count.
int thread_count();
void set_thread_count(int n);

// Dispatching entry points. These split rows across threads when the
// product is large enough; every output row is still produced by a single
// backend call, so values are identical for any thread count.
void gemm_nn(const float* a, int lda, const float* b, int ldb,
             float* c, int ldc, int m, int k, int n, bool accumulate = false);
void gemm_nt(const float* a, int lda, const float* b, int ldb,
             float* c, int ldc, int m, int k, int n, bool accumulate = false);
void gemm_tn(const float* a, int lda, const float* b, int ldb,
             float* c, int ldc, int m, int k, int n, bool accumulate = false);
void add(const float* a, const float* b, float* out, std::size_t n);
void mul(const float* a, const float* b, float* out, std::size_t n);
void axpy(float alpha, const float* x, float* y, std::size_t n);

}  // namespace amp::kernels
