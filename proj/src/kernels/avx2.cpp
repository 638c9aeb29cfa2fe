// AVX2+FMA kernels. Compiled with -mavx2 -mfma for this translation unit only;
// never called unless the dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mrspec/kernels.hpp"

namespace mrspec::kernels::avx2 {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kLanes = 4;

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

// Loads cos/sin of 2*pi*w for four lanes; the tail is padded with zero angle.
inline void load_rotation(std::span<const double> w, std::size_t j, __m256d& cr, __m256d& sr) {
  alignas(32) double c[kLanes];
  alignas(32) double s[kLanes];
  for (std::size_t l = 0; l < kLanes; ++l) {
    const double a = (j + l < w.size()) ? kTwoPi * w[j + l] : 0.0;
    c[l] = std::cos(a);
    s[l] = std::sin(a);
  }
  cr = _mm256_load_pd(c);
  sr = _mm256_load_pd(s);
}

inline void rotate(__m256d& c, __m256d& s, __m256d cr, __m256d sr) {
  const __m256d cn = _mm256_fmsub_pd(c, cr, _mm256_mul_pd(s, sr));
  s = _mm256_fmadd_pd(s, cr, _mm256_mul_pd(c, sr));
  c = cn;
}

inline void store_partial(std::span<double> out, std::size_t j, __m256d v) {
  alignas(32) double tmp[kLanes];
  _mm256_store_pd(tmp, v);
  for (std::size_t l = 0; l < kLanes && j + l < out.size(); ++l) out[j + l] = tmp[l];
}

}  // namespace

void cosine_series(std::span<const double> coeffs, std::span<const double> omegas,
                   std::span<double> out) {
  for (std::size_t j = 0; j < omegas.size(); j += kLanes) {
    __m256d cr, sr;
    load_rotation(omegas, j, cr, sr);
    __m256d c = _mm256_set1_pd(1.0);
    __m256d s = _mm256_setzero_pd();
    __m256d acc = _mm256_setzero_pd();
    for (double a : coeffs) {
      acc = _mm256_fmadd_pd(_mm256_set1_pd(a), c, acc);
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
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < padded; j += kLanes) {
      __m256d cv = _mm256_loadu_pd(&c[j]);
      __m256d sv = _mm256_loadu_pd(&s[j]);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(&w[j]), cv, acc);
      rotate(cv, sv, _mm256_loadu_pd(&cr[j]), _mm256_loadu_pd(&sr[j]));
      _mm256_storeu_pd(&c[j], cv);
      _mm256_storeu_pd(&s[j], sv);
    }
    o = hsum(acc);
  }
}

void dft_power(std::span<const double> x, std::span<const double> freqs,
               std::span<double> out) {
  for (std::size_t j = 0; j < freqs.size(); j += kLanes) {
    __m256d cr, sr;
    load_rotation(freqs, j, cr, sr);
    __m256d c = _mm256_set1_pd(1.0);
    __m256d s = _mm256_setzero_pd();
    __m256d re = _mm256_setzero_pd();
    __m256d im = _mm256_setzero_pd();
    for (double v : x) {
      const __m256d xv = _mm256_set1_pd(v);
      re = _mm256_fmadd_pd(xv, c, re);
      im = _mm256_fnmadd_pd(xv, s, im);
      rotate(c, s, cr, sr);
    }
    store_partial(out, j, _mm256_fmadd_pd(re, re, _mm256_mul_pd(im, im)));
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i]), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(&a[i + kLanes]), _mm256_loadu_pd(&b[i + kLanes]), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace mrspec::kernels::avx2
