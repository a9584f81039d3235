#pragma once

#include <cstddef>
#include <string_view>

// Inner-loop kernels behind every matrix product and vector update. Each
// kernel has a portable scalar reference and, on x86-64, an AVX2/FMA variant
// chosen at runtime. Both variants are equivalence-tested against each other.
namespace opseq::kernels {

enum class Backend { scalar, avx2 };

std::string_view backend_name(Backend backend);

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // C[m x n] += A[m x k] * B[k x n]; all row-major with explicit leading strides.
  void (*gemm)(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
               const double* b, std::size_t ldb, double* c, std::size_t ldc);
};

bool backend_supported(Backend backend);
Backend best_backend();

// The process-wide active backend starts as best_backend() unless the
// OPSEQ_SIMD environment variable names "scalar".
Backend active_backend();
void set_backend(Backend backend);

const KernelTable& table(Backend backend);
const KernelTable& active();

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline void gemm(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
                 const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  active().gemm(m, n, k, a, lda, b, ldb, c, ldc);
}

// C += A^T * B where A is stored k x m.
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
             const double* b, std::size_t ldb, double* c, std::size_t ldc);
// C += A * B^T where B is stored n x k.
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
             const double* b, std::size_t ldb, double* c, std::size_t ldc);

// Scoped backend override, mostly for tests.
class BackendGuard {
 public:
  explicit BackendGuard(Backend backend) : previous_(active_backend()) { set_backend(backend); }
  ~BackendGuard() { set_backend(previous_); }
  BackendGuard(const BackendGuard&) = delete;
  BackendGuard& operator=(const BackendGuard&) = delete;

 private:
  Backend previous_;
};

}  // namespace opseq::kernels
