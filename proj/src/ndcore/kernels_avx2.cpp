#include <immintrin.h>

#include "kernels_impl.hpp"

namespace opseq::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

// Register tile of ROWS x 8 outputs accumulated over the full depth k.
template <int ROWS>
inline void tile_8(std::size_t k, const double* a, std::size_t lda, const double* b, std::size_t ldb, double* c,
                   std::size_t ldc) {
  __m256d acc0[ROWS], acc1[ROWS];
  for (int r = 0; r < ROWS; ++r) {
    acc0[r] = _mm256_loadu_pd(c + r * ldc);
    acc1[r] = _mm256_loadu_pd(c + r * ldc + 4);
  }
  for (std::size_t p = 0; p < k; ++p) {
    const __m256d b0 = _mm256_loadu_pd(b + p * ldb);
    const __m256d b1 = _mm256_loadu_pd(b + p * ldb + 4);
    for (int r = 0; r < ROWS; ++r) {
      const __m256d av = _mm256_broadcast_sd(a + r * lda + p);
      acc0[r] = _mm256_fmadd_pd(av, b0, acc0[r]);
      acc1[r] = _mm256_fmadd_pd(av, b1, acc1[r]);
    }
  }
  for (int r = 0; r < ROWS; ++r) {
    _mm256_storeu_pd(c + r * ldc, acc0[r]);
    _mm256_storeu_pd(c + r * ldc + 4, acc1[r]);
  }
}

template <int ROWS>
inline void tile_4(std::size_t k, const double* a, std::size_t lda, const double* b, std::size_t ldb, double* c,
                   std::size_t ldc) {
  __m256d acc[ROWS];
  for (int r = 0; r < ROWS; ++r) acc[r] = _mm256_loadu_pd(c + r * ldc);
  for (std::size_t p = 0; p < k; ++p) {
    const __m256d bv = _mm256_loadu_pd(b + p * ldb);
    for (int r = 0; r < ROWS; ++r) acc[r] = _mm256_fmadd_pd(_mm256_broadcast_sd(a + r * lda + p), bv, acc[r]);
  }
  for (int r = 0; r < ROWS; ++r) _mm256_storeu_pd(c + r * ldc, acc[r]);
}

template <int ROWS>
inline void tile_1(std::size_t k, const double* a, std::size_t lda, const double* b, std::size_t ldb, double* c,
                   std::size_t ldc) {
  double acc[ROWS];
  for (int r = 0; r < ROWS; ++r) acc[r] = c[r * ldc];
  for (std::size_t p = 0; p < k; ++p) {
    const double bv = b[p * ldb];
    for (int r = 0; r < ROWS; ++r) acc[r] += a[r * lda + p] * bv;
  }
  for (int r = 0; r < ROWS; ++r) c[r * ldc] = acc[r];
}

template <int ROWS>
void row_block(std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b, std::size_t ldb,
               double* c, std::size_t ldc) {
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) tile_8<ROWS>(k, a, lda, b + j, ldb, c + j, ldc);
  for (; j + 4 <= n; j += 4) tile_4<ROWS>(k, a, lda, b + j, ldb, c + j, ldc);
  for (; j < n; ++j) tile_1<ROWS>(k, a, lda, b + j, ldb, c + j, ldc);
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemm(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
          std::size_t ldb, double* c, std::size_t ldc) {
  // Column panels of B stay cache-resident while all row blocks sweep them.
  constexpr std::size_t kPanel = 64;
  for (std::size_t j0 = 0; j0 < n; j0 += kPanel) {
    const std::size_t nb = (n - j0 < kPanel) ? n - j0 : kPanel;
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) row_block<4>(nb, k, a + i * lda, lda, b + j0, ldb, c + i * ldc + j0, ldc);
    for (; i < m; ++i) row_block<1>(nb, k, a + i * lda, lda, b + j0, ldb, c + i * ldc + j0, ldc);
  }
}

}  // namespace opseq::kernels::avx2
