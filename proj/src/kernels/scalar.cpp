// Scalar reference kernels. The SIMD variants follow the same recurrences
// lane by lane, so results agree to rounding.

#include <cmath>
#include <numbers>
#include <vector>

#include "mrspec/kernels.hpp"

namespace mrspec::kernels::scalar {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void cosine_series(std::span<const double> coeffs, std::span<const double> omegas,
                   std::span<double> out) {
  for (std::size_t j = 0; j < omegas.size(); ++j) {
    const double cr = std::cos(kTwoPi * omegas[j]);
    const double sr = std::sin(kTwoPi * omegas[j]);
    double c = 1.0;
    double s = 0.0;
    double acc = 0.0;
    for (double a : coeffs) {
      acc += a * c;
      const double cn = c * cr - s * sr;
      s = s * cr + c * sr;
      c = cn;
    }
    out[j] = acc;
  }
}

void cosine_transform(std::span<const double> weights, std::span<const double> omegas,
                      std::span<double> out) {
  const std::size_t n = omegas.size();
  std::vector<double> cr(n), sr(n), c(n, 1.0), s(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    cr[j] = std::cos(kTwoPi * omegas[j]);
    sr[j] = std::sin(kTwoPi * omegas[j]);
  }
  for (double& o : out) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += weights[j] * c[j];
      const double cn = c[j] * cr[j] - s[j] * sr[j];
      s[j] = s[j] * cr[j] + c[j] * sr[j];
      c[j] = cn;
    }
    o = acc;
  }
}

void dft_power(std::span<const double> x, std::span<const double> freqs,
               std::span<double> out) {
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    const double cr = std::cos(kTwoPi * freqs[j]);
    const double sr = std::sin(kTwoPi * freqs[j]);
    double c = 1.0;
    double s = 0.0;
    double re = 0.0;
    double im = 0.0;
    for (double v : x) {
      re += v * c;
      im -= v * s;
      const double cn = c * cr - s * sr;
      s = s * cr + c * sr;
      c = cn;
    }
    out[j] = re * re + im * im;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace mrspec::kernels::scalar
