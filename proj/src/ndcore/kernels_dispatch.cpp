#include <atomic>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "kernels_impl.hpp"
#include "opseq/error.hpp"
#include "opseq/ndcore/kernels.hpp"

namespace opseq::kernels {

namespace {

constexpr KernelTable kScalarTable{&scalar::dot, &scalar::axpy, &scalar::gemm};
#if defined(OPSEQ_WITH_AVX2)
constexpr KernelTable kAvx2Table{&avx2::dot, &avx2::axpy, &avx2::gemm};
#endif

bool cpu_has_avx2() {
#if defined(OPSEQ_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  const char* forced = std::getenv("OPSEQ_SIMD");
  if (forced && std::strcmp(forced, "scalar") == 0) return Backend::scalar;
  return best_backend();
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "unknown";
}

bool backend_supported(Backend backend) {
  if (backend == Backend::scalar) return true;
  static const bool avx2 = cpu_has_avx2();
  return avx2;
}

Backend best_backend() { return backend_supported(Backend::avx2) ? Backend::avx2 : Backend::scalar; }

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (!backend_supported(backend)) {
    throw ConfigError("kernel backend " + std::string(backend_name(backend)) + " is not supported on this CPU");
  }
  current().store(backend, std::memory_order_relaxed);
}

const KernelTable& table(Backend backend) {
#if defined(OPSEQ_WITH_AVX2)
  if (backend == Backend::avx2 && backend_supported(Backend::avx2)) return kAvx2Table;
#endif
  (void)backend;
  return kScalarTable;
}

const KernelTable& active() { return table(active_backend()); }

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
             std::size_t ldb, double* c, std::size_t ldc) {
  // Transpose the k x m operand once, then reuse the row-major kernel.
  std::vector<double> at(m * k);
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t i = 0; i < m; ++i) at[i * k + p] = a[p * lda + i];
  gemm(m, n, k, at.data(), k, b, ldb, c, ldc);
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
             std::size_t ldb, double* c, std::size_t ldc) {
  std::vector<double> bt(k * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t p = 0; p < k; ++p) bt[p * n + j] = b[j * ldb + p];
  gemm(m, n, k, a, lda, bt.data(), n, c, ldc);
}

}  // namespace opseq::kernels
