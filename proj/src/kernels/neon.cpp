// NEON kernels for aarch64, two double lanes per vector.

#include <arm_neon.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mrspec/kernels.hpp"

namespace mrspec::kernels::neon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kLanes = 2;

inline void load_rotation(std::span<const double> w, std::size_t j, float64x2_t& cr,
                          float64x2_t& sr) {
  double c[kLanes];
  double s[kLanes];
  for (std::size_t l = 0; l < kLanes; ++l) {
    const double a = (j + l < w.size()) ? kTwoPi * w[j + l] : 0.0;
    c[l] = std::cos(a);
    s[l] = std::sin(a);
  }
  cr = vld1q_f64(c);
  sr = vld1q_f64(s);
}

inline void rotate(float64x2_t& c, float64x2_t& s, float64x2_t cr, float64x2_t sr) {
  const float64x2_t cn = vfmsq_f64(vmulq_f64(c, cr), s, sr);
  s = vfmaq_f64(vmulq_f64(s, cr), c, sr);
  c = cn;
}

inline void store_partial(std::span<double> out, std::size_t j, float64x2_t v) {
  double tmp[kLanes];
  vst1q_f64(tmp, v);
  for (std::size_t l = 0; l < kLanes && j + l < out.size(); ++l) out[j + l] = tmp[l];
}

}  // namespace

void cosine_series(std::span<const double> coeffs, std::span<const double> omegas,
                   std::span<double> out) {
  for (std::size_t j = 0; j < omegas.size(); j += kLanes) {
    float64x2_t cr, sr;
    load_rotation(omegas, j, cr, sr);
    float64x2_t c = vdupq_n_f64(1.0);
    float64x2_t s = vdupq_n_f64(0.0);
    float64x2_t acc = vdupq_n_f64(0.0);
    for (double a : coeffs) {
      acc = vfmaq_n_f64(acc, c, a);
      rotate(c, s, cr, sr);
    }
    store_partial(out, j, acc);
  }
}

void cosine_transform(std::span<const double> weights, std::span<const double> omegas,
                      std::span<double> out) {
  const std::size_t n = omegas.size();
  const std::size_t padded = (n + kLanes - 1) / kLanes * kLanes;
  std::vector<double> cr(padded, 1.0), sr(padded, 0.0), c(padded, 1.0), s(padded, 0.0),
      w(padded, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    cr[j] = std::cos(kTwoPi * omegas[j]);
    sr[j] = std::sin(kTwoPi * omegas[j]);
    w[j] = weights[j];
  }
  for (double& o : out) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t j = 0; j < padded; j += kLanes) {
      float64x2_t cv = vld1q_f64(&c[j]);
      float64x2_t sv = vld1q_f64(&s[j]);
      acc = vfmaq_f64(acc, vld1q_f64(&w[j]), cv);
      rotate(cv, sv, vld1q_f64(&cr[j]), vld1q_f64(&sr[j]));
      vst1q_f64(&c[j], cv);
      vst1q_f64(&s[j], sv);
    }
    o = vaddvq_f64(acc);
  }
}

void dft_power(std::span<const double> x, std::span<const double> freqs,
               std::span<double> out) {
  for (std::size_t j = 0; j < freqs.size(); j += kLanes) {
    float64x2_t cr, sr;
    load_rotation(freqs, j, cr, sr);
    float64x2_t c = vdupq_n_f64(1.0);
    float64x2_t s = vdupq_n_f64(0.0);
    float64x2_t re = vdupq_n_f64(0.0);
    float64x2_t im = vdupq_n_f64(0.0);
    for (double v : x) {
      re = vfmaq_n_f64(re, c, v);
      im = vfmsq_n_f64(im, s, v);
      rotate(c, s, cr, sr);
    }
    store_partial(out, j, vfmaq_f64(vmulq_f64(im, im), re, re));
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) acc = vfmaq_f64(acc, vld1q_f64(&a[i]), vld1q_f64(&b[i]));
  double total = vaddvq_f64(acc);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

}  // namespace mrspec::kernels::neon
