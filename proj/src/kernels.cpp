#include "amp/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "amp/error.hpp"

namespace amp::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(AMP_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelSet* pick_default() {
#if defined(AMP_HAVE_AVX2)
    if (cpu_has_avx2()) return &avx2_kernels();
#endif
    return &scalar_kernels();
}

std::vector<const KernelSet*> usable_sets() {
    std::vector<const KernelSet*> out{&scalar_kernels()};
#if defined(AMP_HAVE_AVX2)
    if (cpu_has_avx2()) out.push_back(&avx2_kernels());
#endif
    return out;
}

const KernelSet* resolve_initial() {
    if (const char* env = std::getenv("AMP_KERNELS")) {
        for (const KernelSet* s : usable_sets()) {
            if (std::strcmp(s->name, env) == 0) return s;
        }
        throw ConfigError(std::string("unknown kernel backend in AMP_KERNELS: ") + env);
    }
    return pick_default();
}

int resolve_initial_threads() {
    if (const char* env = std::getenv("AMP_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
        throw ConfigError(std::string("AMP_THREADS must be a positive integer, got: ") + env);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Process-wide active state. Selection happens once at first use; tests
// may switch backends explicitly via select().
const KernelSet*& active_slot() {
    static const KernelSet* slot = resolve_initial();
    return slot;
}

int& threads_slot() {
    static int threads = resolve_initial_threads();
    return threads;
}

// Rows below this work estimate run single-threaded; spawning threads for
// tiny matmuls costs more than it saves.
constexpr long kMinFlopsPerThread = 64 * 1024;

template <typename Fn>
void parallel_rows(int m, long flops_per_row, Fn&& fn) {
    int threads = threads_slot();
    if (threads > m) threads = m;
    if (threads > 1 && flops_per_row > 0) {
        long per_thread = (static_cast<long>(m) * flops_per_row) / threads;
        if (per_thread < kMinFlopsPerThread) threads = 1;
    }
    if (threads <= 1) {
        fn(0, m);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    int base = m / threads, rem = m % threads, row = 0;
    for (int t = 0; t < threads; ++t) {
        int count = base + (t < rem ? 1 : 0);
        int begin = row;
        row += count;
        pool.emplace_back([&fn, begin, count] { fn(begin, begin + count); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

const KernelSet& active() { return *active_slot(); }

std::vector<std::string> available_backends() {
    std::vector<std::string> out;
    for (const KernelSet* s : usable_sets()) out.emplace_back(s->name);
    return out;
}

void select(const std::string& name) {
    for (const KernelSet* s : usable_sets()) {
        if (name == s->name) {
            active_slot() = s;
            return;
        }
    }
    throw ConfigError("unknown kernel backend: " + name);
}

int thread_count() { return threads_slot(); }

void set_thread_count(int n) {
    if (n < 1) throw ConfigError("thread count must be >= 1");
    threads_slot() = n;
}

// Dispatch wrappers. Work is split across rows of the output; every output
// element is still produced by exactly one backend call accumulating k in
// ascending order, so results do not depend on the thread count.

void gemm_nn(const float* a, int lda, const float* b, int ldb, float* c,
             int ldc, int m, int k, int n, bool accumulate) {
    const KernelSet& ks = active();
    parallel_rows(m, 2L * k * n, [&](int begin, int end) {
        ks.gemm_nn(a + static_cast<std::size_t>(begin) * lda, lda, b, ldb,
                   c + static_cast<std::size_t>(begin) * ldc, ldc,
                   end - begin, k, n, accumulate);
    });
}

void gemm_nt(const float* a, int lda, const float* b, int ldb, float* c,
             int ldc, int m, int k, int n, bool accumulate) {
    const KernelSet& ks = active();
    parallel_rows(m, 2L * k * n, [&](int begin, int end) {
        ks.gemm_nt(a + static_cast<std::size_t>(begin) * lda, lda, b, ldb,
                   c + static_cast<std::size_t>(begin) * ldc, ldc,
                   end - begin, k, n, accumulate);
    });
}

void gemm_tn(const float* a, int lda, const float* b, int ldb, float* c,
             int ldc, int m, int k, int n, bool accumulate) {
    // Output rows index the k-dim of A (columns), so row-splitting shifts
    // the A base pointer by column, not by row.
    const KernelSet& ks = active();
    parallel_rows(m, 2L * k * n, [&](int begin, int end) {
        ks.gemm_tn(a + begin, lda, b, ldb,
                   c + static_cast<std::size_t>(begin) * ldc, ldc,
                   end - begin, k, n, accumulate);
    });
}

void add(const float* a, const float* b, float* out, std::size_t n) {
    active().add(a, b, out, n);
}

void mul(const float* a, const float* b, float* out, std::size_t n) {
    active().mul(a, b, out, n);
}

void axpy(float alpha, const float* x, float* y, std::size_t n) {
    active().axpy(alpha, x, y, n);
}

}  // namespace amp::kernels
