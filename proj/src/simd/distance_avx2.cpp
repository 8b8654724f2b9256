#include <stdexcept>

#include "driftlab/simd.hpp"

#if defined(DRIFTLAB_HAVE_AVX2)
#include <immintrin.h>
#endif

namespace driftlab::simd::detail {

#if defined(DRIFTLAB_HAVE_AVX2)

void distances_avx2(const double* x, int dim, const double* soa, std::size_t n, double* out,
                    bool squared) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (int k = 0; k < dim; ++k) {
      const __m256d c = _mm256_loadu_pd(soa + static_cast<std::size_t>(k) * n + i);
      const __m256d d = _mm256_sub_pd(c, _mm256_set1_pd(x[k]));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    _mm256_storeu_pd(out + i, squared ? acc : _mm256_sqrt_pd(acc));
  }
  distances_scalar(x, dim, soa, n, i, out, squared);
}

#else

void distances_avx2(const double*, int, const double*, std::size_t, double*, bool) {
  throw std::logic_error("AVX2 kernels were not compiled in");
}

#endif

}  // namespace driftlab::simd::detail
