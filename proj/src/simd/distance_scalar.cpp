#include <cmath>
#include <stdexcept>

#include "driftlab/simd.hpp"

namespace driftlab::simd {

namespace detail {

void distances_scalar(const double* x, int dim, const double* soa, std::size_t n,
                      std::size_t begin, double* out, bool squared) {
  for (std::size_t i = begin; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double d = soa[static_cast<std::size_t>(k) * n + i] - x[k];
      acc = acc + d * d;
    }
    out[i] = squared ? acc : std::sqrt(acc);
  }
}

}  // namespace detail

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(DRIFTLAB_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(DRIFTLAB_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  static const Isa best = [] {
    if (isa_available(Isa::avx2)) return Isa::avx2;
    if (isa_available(Isa::neon)) return Isa::neon;
    return Isa::scalar;
  }();
  return best;
}

void distances(Isa isa, std::span<const double> x, std::span<const double> soa, std::size_t n,
               std::span<double> out, bool squared) {
  const int dim = static_cast<int>(x.size());
  if (soa.size() != n * x.size() || out.size() < n) {
    throw std::invalid_argument("simd::distances: buffer sizes do not match");
  }
  if (!isa_available(isa)) throw std::invalid_argument("simd::distances: instruction set unavailable");
  switch (isa) {
    case Isa::avx2:
      detail::distances_avx2(x.data(), dim, soa.data(), n, out.data(), squared);
      return;
    case Isa::neon:
      detail::distances_neon(x.data(), dim, soa.data(), n, out.data(), squared);
      return;
    case Isa::scalar:
      detail::distances_scalar(x.data(), dim, soa.data(), n, 0, out.data(), squared);
      return;
  }
}

}  // namespace driftlab::simd
