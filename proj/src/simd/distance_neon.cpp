#include <stdexcept>

#include "driftlab/simd.hpp"

#if defined(DRIFTLAB_HAVE_NEON)
#include <arm_neon.h>
#endif

namespace driftlab::simd::detail {

#if defined(DRIFTLAB_HAVE_NEON)

void distances_neon(const double* x, int dim, const double* soa, std::size_t n, double* out,
                    bool squared) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (int k = 0; k < dim; ++k) {
      const float64x2_t c = vld1q_f64(soa + static_cast<std::size_t>(k) * n + i);
      const float64x2_t d = vsubq_f64(c, vdupq_n_f64(x[k]));
      acc = vaddq_f64(acc, vmulq_f64(d, d));
    }
    vst1q_f64(out + i, squared ? acc : vsqrtq_f64(acc));
  }
  distances_scalar(x, dim, soa, n, i, out, squared);
}

#else

void distances_neon(const double*, int, const double*, std::size_t, double*, bool) {
  throw std::logic_error("NEON kernels were not compiled in");
}

#endif

}  // namespace driftlab::simd::detail
