#pragma once

#include <cstddef>
#include <span>

// Data-parallel distance kernels. Each instruction-set variant produces
// bit-identical results to the scalar reference: lanes run over atoms, the sum
// over coordinates is accumulated in the same order, no fused multiply-add is
// used, and sqrt is correctly rounded everywhere.

namespace driftlab::simd {

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);
/// Compiled in and supported by the running CPU.
bool isa_available(Isa isa);
/// Best available variant, chosen once per process.
Isa active_isa();

/// out[i] = |x - atom_i| (or its square with `squared`). `soa` holds dim
/// contiguous blocks of n coordinates; x.size() is the dimension.
void distances(Isa isa, std::span<const double> x, std::span<const double> soa, std::size_t n,
               std::span<double> out, bool squared = false);

inline void distances(std::span<const double> x, std::span<const double> soa, std::size_t n,
                      std::span<double> out, bool squared = false) {
  distances(active_isa(), x, soa, n, out, squared);
}

namespace detail {
void distances_scalar(const double* x, int dim, const double* soa, std::size_t n,
                      std::size_t begin, double* out, bool squared);
void distances_avx2(const double* x, int dim, const double* soa, std::size_t n, double* out,
                    bool squared);
void distances_neon(const double* x, int dim, const double* soa, std::size_t n, double* out,
                    bool squared);
}  // namespace detail

}  // namespace driftlab::simd
