#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "mrspec/kernels.hpp"

namespace mrspec::kernels {

namespace {

struct Table {
  void (*cosine_series)(std::span<const double>, std::span<const double>, std::span<double>);
  void (*cosine_transform)(std::span<const double>, std::span<const double>, std::span<double>);
  void (*dft_power)(std::span<const double>, std::span<const double>, std::span<double>);
  double (*dot)(std::span<const double>, std::span<const double>);
};

constexpr Table kScalar{scalar::cosine_series, scalar::cosine_transform, scalar::dft_power,
                        scalar::dot};
#ifdef MRSPEC_HAVE_AVX2_VARIANT
constexpr Table kAvx2{avx2::cosine_series, avx2::cosine_transform, avx2::dft_power, avx2::dot};
#endif
#ifdef MRSPEC_HAVE_NEON_VARIANT
constexpr Table kNeon{neon::cosine_series, neon::cosine_transform, neon::dft_power, neon::dot};
#endif

const Table* table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return &kScalar;
    case Isa::Avx2:
#ifdef MRSPEC_HAVE_AVX2_VARIANT
      return &kAvx2;
#else
      return nullptr;
#endif
    case Isa::Neon:
#ifdef MRSPEC_HAVE_NEON_VARIANT
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

// MRSPEC_ISA=scalar|avx2|neon overrides detection.
Isa detect() {
  if (const char* env = std::getenv("MRSPEC_ISA")) {
    const std::string want(env);
    if (want == "scalar") return Isa::Scalar;
    if (want == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
    if (want == "neon" && isa_available(Isa::Neon)) return Isa::Neon;
  }
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> table{table_for(detect())};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#ifdef MRSPEC_HAVE_AVX2_VARIANT
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#ifdef MRSPEC_HAVE_NEON_VARIANT
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  const Table* t = current().load();
#ifdef MRSPEC_HAVE_AVX2_VARIANT
  if (t == &kAvx2) return Isa::Avx2;
#endif
#ifdef MRSPEC_HAVE_NEON_VARIANT
  if (t == &kNeon) return Isa::Neon;
#endif
  return Isa::Scalar;
}

void set_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("kernel variant '" + std::string(isa_name(isa)) +
                                "' is not available on this machine");
  }
  current().store(table_for(isa));
}

void cosine_series(std::span<const double> coeffs, std::span<const double> omegas,
                   std::span<double> out) {
  if (out.size() != omegas.size()) throw std::invalid_argument("cosine_series: output size mismatch");
  current().load()->cosine_series(coeffs, omegas, out);
}

void cosine_transform(std::span<const double> weights, std::span<const double> omegas,
                      std::span<double> out) {
  current().load()->cosine_transform(weights, omegas, out);
}

void dft_power(std::span<const double> x, std::span<const double> freqs,
               std::span<double> out) {
  if (out.size() != freqs.size()) throw std::invalid_argument("dft_power: output size mismatch");
  current().load()->dft_power(x, freqs, out);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  return current().load()->dot(a, b);
}

}  // namespace mrspec::kernels
