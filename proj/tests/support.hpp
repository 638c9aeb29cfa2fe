#pragma once

// Shared oracles and random generators for the test suites. Everything here is
// computed independently of the library's quadrature and factorisation paths.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mrspec/process.hpp"

namespace support {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>()(rng_); }
  std::uint64_t bits() { return rng_(); }
  std::vector<double> normals(std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = normal();
    return v;
  }

 private:
  std::mt19937_64 rng_;
};

// Coefficients c of prod_k (1 - r_k z) = 1 + c_1 z + ... for the given inverse roots.
inline std::vector<double> expand_inverse_roots(const std::vector<std::complex<double>>& roots) {
  std::vector<std::complex<double>> poly{1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] -= r * poly[i];
    }
    poly = next;
  }
  std::vector<double> out;
  for (std::size_t i = 1; i < poly.size(); ++i) out.push_back(poly[i].real());
  return out;
}

// Random inverse roots strictly inside a disc of radius max_modulus, complex ones in conjugate pairs.
inline std::vector<std::complex<double>> random_inverse_roots(Gen& g, int order, double max_modulus) {
  std::vector<std::complex<double>> roots;
  while (static_cast<int>(roots.size()) < order) {
    const double r = g.uniform(0.05, max_modulus);
    if (order - static_cast<int>(roots.size()) >= 2 && g.uniform(0, 1) < 0.6) {
      const double a = g.uniform(0.0, std::numbers::pi);
      roots.push_back(std::polar(r, a));
      roots.push_back(std::polar(r, -a));
    } else {
      roots.push_back(g.uniform(0, 1) < 0.5 ? r : -r);
    }
  }
  return roots;
}

inline mrspec::SpectralModel random_ar(Gen& g, int order, double max_modulus = 0.85) {
  mrspec::SpectralModel m;
  for (double c : expand_inverse_roots(random_inverse_roots(g, order, max_modulus))) m.ar.push_back(-c);
  m.innovation_variance = g.uniform(0.2, 3.0);
  return m;
}

inline mrspec::SpectralModel random_arma(Gen& g) {
  mrspec::SpectralModel m = random_ar(g, g.integer(0, 3));
  m.ma = expand_inverse_roots(random_inverse_roots(g, g.integer(0, 2), 0.8));
  if (g.uniform(0, 1) < 0.3) {
    m.season_period = g.integer(2, 6);
    m.seasonal_ar = {g.uniform(-0.6, 0.6)};
    m.seasonal_ma = {g.uniform(-0.6, 0.6)};
  }
  return m;
}

// Direct complex evaluation of the rational spectrum, seasonal factors kept separate.
inline double rational_spectrum(const mrspec::SpectralModel& m, double omega) {
  const std::complex<double> z = std::polar(1.0, -2.0 * std::numbers::pi * omega);
  auto poly = [&](const std::vector<double>& c, double sign, int power) {
    std::complex<double> acc = 1.0, zp = 1.0;
    const std::complex<double> step = std::pow(z, power);
    for (double v : c) {
      zp *= step;
      acc += sign * v * zp;
    }
    return acc;
  };
  const auto ma = poly(m.ma, 1.0, 1) * poly(m.seasonal_ma, 1.0, m.season_period);
  const auto ar = poly(m.ar, -1.0, 1) * poly(m.seasonal_ar, -1.0, m.season_period);
  return m.innovation_variance * std::norm(ma) / std::norm(ar);
}

// Autocovariance of an AR(p) by solving the Yule-Walker equations exactly, then recursing.
inline std::vector<double> yule_walker_autocov(const std::vector<double>& phi, double sigma2, int max_lag) {
  const int p = static_cast<int>(phi.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p + 1, p + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p + 1);
  b[0] = sigma2;
  for (int h = 0; h <= p; ++h) {
    a(h, h) += 1.0;
    for (int k = 1; k <= p; ++k) a(h, std::abs(h - k)) -= phi[static_cast<std::size_t>(k - 1)];
  }
  const Eigen::VectorXd g = a.fullPivLu().solve(b);
  std::vector<double> out(static_cast<std::size_t>(std::max(max_lag, p)) + 1);
  for (int h = 0; h <= p; ++h) out[static_cast<std::size_t>(h)] = g[h];
  for (int h = p + 1; h <= max_lag; ++h) {
    double v = 0.0;
    for (int k = 1; k <= p; ++k) v += phi[static_cast<std::size_t>(k - 1)] * out[static_cast<std::size_t>(h - k)];
    out[static_cast<std::size_t>(h)] = v;
  }
  out.resize(static_cast<std::size_t>(max_lag) + 1);
  return out;
}

// Autocovariance of a causal ARMA via truncated psi weights of the expanded polynomials.
inline std::vector<double> psi_autocov(const std::vector<double>& ar, const std::vector<double>& ma,
                                       double sigma2, int max_lag, int terms = 4000) {
  std::vector<double> psi(static_cast<std::size_t>(terms), 0.0);
  for (int j = 0; j < terms; ++j) {
    double v = j == 0 ? 1.0 : (j <= static_cast<int>(ma.size()) ? ma[static_cast<std::size_t>(j - 1)] : 0.0);
    for (int k = 1; k <= static_cast<int>(ar.size()) && k <= j; ++k)
      v += ar[static_cast<std::size_t>(k - 1)] * psi[static_cast<std::size_t>(j - k)];
    psi[static_cast<std::size_t>(j)] = v;
  }
  std::vector<double> out(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (int h = 0; h <= max_lag; ++h)
    for (int j = 0; j + h < terms; ++j)
      out[static_cast<std::size_t>(h)] += psi[static_cast<std::size_t>(j)] * psi[static_cast<std::size_t>(j + h)];
  for (double& v : out) v *= sigma2;
  return out;
}

// Plain ARMA coefficients (phi, theta) of a seasonal model, expanded by hand.
inline std::pair<std::vector<double>, std::vector<double>> expand_seasonal(const mrspec::SpectralModel& m) {
  auto lag_poly = [](const std::vector<double>& c, double sign, int period) {
    std::vector<double> p(c.size() * static_cast<std::size_t>(period) + 1, 0.0);
    p[0] = 1.0;
    for (std::size_t i = 0; i < c.size(); ++i) p[(i + 1) * static_cast<std::size_t>(period)] = sign * c[i];
    return p;
  };
  auto mul = [](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
  };
  const auto ar = mul(lag_poly(m.ar, -1.0, 1), lag_poly(m.seasonal_ar, -1.0, m.season_period));
  const auto ma = mul(lag_poly(m.ma, 1.0, 1), lag_poly(m.seasonal_ma, 1.0, m.season_period));
  std::vector<double> phi, theta;
  for (std::size_t i = 1; i < ar.size(); ++i) phi.push_back(-ar[i]);
  for (std::size_t i = 1; i < ma.size(); ++i) theta.push_back(ma[i]);
  return {phi, theta};
}

// Dense multivariate normal log-density through an LU determinant and solve.
inline double mvn_logpdf(const Eigen::MatrixXd& cov, const Eigen::VectorXd& x) {
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(cov);
  const double logdet = std::log(std::abs(lu.determinant()));
  const double quad = x.dot(lu.solve(x));
  return -0.5 * (static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi) + logdet + quad);
}

// Plain trapezoid over [a, b] with many points; adequate for smooth periodic integrands.
template <typename F>
double trapezoid(F&& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double acc = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) acc += f(a + i * h);
  return acc * h;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double sample_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_variance(std::span<const double> v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace support
