#pragma once

// Data-parallel inner loops shared by every module. Each kernel has a scalar
// reference implementation plus SIMD variants; the variant is picked once at
// startup from the CPU's capabilities and can be forced for testing.

#include <span>
#include <string_view>

namespace mrspec::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

/// True when the variant was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

Isa active_isa();

/// Forces a variant; throws std::invalid_argument if it is unavailable.
void set_isa(Isa isa);

/// out[j] = sum_m coeffs[m] * cos(2*pi*m*omegas[j])
void cosine_series(std::span<const double> coeffs, std::span<const double> omegas,
                   std::span<double> out);

/// out[h] = sum_j weights[j] * cos(2*pi*h*omegas[j]) for h = 0..out.size()-1
void cosine_transform(std::span<const double> weights, std::span<const double> omegas,
                      std::span<double> out);

/// out[j] = |sum_t x[t] * exp(-i*2*pi*freqs[j]*t)|^2
void dft_power(std::span<const double> x, std::span<const double> freqs,
               std::span<double> out);

double dot(std::span<const double> a, std::span<const double> b);

// Direct access to individual variants, used by the equivalence tests.
namespace scalar {
void cosine_series(std::span<const double>, std::span<const double>, std::span<double>);
void cosine_transform(std::span<const double>, std::span<const double>, std::span<double>);
void dft_power(std::span<const double>, std::span<const double>, std::span<double>);
double dot(std::span<const double>, std::span<const double>);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define MRSPEC_HAVE_AVX2_VARIANT 1
namespace avx2 {
void cosine_series(std::span<const double>, std::span<const double>, std::span<double>);
void cosine_transform(std::span<const double>, std::span<const double>, std::span<double>);
void dft_power(std::span<const double>, std::span<const double>, std::span<double>);
double dot(std::span<const double>, std::span<const double>);
}  // namespace avx2
#endif

#if defined(__aarch64__)
#define MRSPEC_HAVE_NEON_VARIANT 1
namespace neon {
void cosine_series(std::span<const double>, std::span<const double>, std::span<double>);
void cosine_transform(std::span<const double>, std::span<const double>, std::span<double>);
void dft_power(std::span<const double>, std::span<const double>, std::span<double>);
double dot(std::span<const double>, std::span<const double>);
}  // namespace neon
#endif

}  // namespace mrspec::kernels
