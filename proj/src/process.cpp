#include "mrspec/process.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "mrspec/errors.hpp"
#include "mrspec/kernels.hpp"

namespace mrspec {

namespace {

std::vector<double> multiply(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// 1 + sign * sum c_i B^{i * period}
std::vector<double> factor(std::span<const double> c, double sign, int period) {
  std::vector<double> out(c.size() * period + 1, 0.0);
  out[0] = 1.0;
  for (std::size_t i = 0; i < c.size(); ++i) out[(i + 1) * period] = sign * c[i];
  return out;
}

// Coefficients of |A(e^{-i 2 pi w})|^2 as a cosine series in w.
std::vector<double> power_cosine_series(std::span<const double> a) {
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    double r = 0.0;
    for (std::size_t i = 0; i + k < a.size(); ++i) r += a[i] * a[i + k];
    out[k] = k == 0 ? r : 2.0 * r;
  }
  return out;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

bool roots_outside_unit_circle(std::span<const double> coeffs) {
  std::vector<double> a(coeffs.begin(), coeffs.end());
  while (a.size() > 1 && a.back() == 0.0) a.pop_back();
  if (a.empty() || a[0] != 1.0) throw std::invalid_argument("polynomial must start with 1");
  // Schur-Cohn step-down: every reflection coefficient must lie inside (-1, 1).
  for (std::size_t m = a.size() - 1; m >= 1; --m) {
    const double k = a[m];
    if (!(std::abs(k) < 1.0)) return false;
    const double denom = 1.0 - k * k;
    std::vector<double> next(m);
    next[0] = 1.0;
    for (std::size_t i = 1; i < m; ++i) next[i] = (a[i] - k * a[m - i]) / denom;
    a = std::move(next);
  }
  return true;
}

std::vector<double> ar_polynomial(const SpectralModel& model) {
  if (model.season_period < 1) throw ModelError("season period must be a positive integer");
  return multiply(factor(model.ar, -1.0, 1), factor(model.seasonal_ar, -1.0, model.season_period));
}

std::vector<double> ma_polynomial(const SpectralModel& model) {
  if (model.season_period < 1) throw ModelError("season period must be a positive integer");
  return multiply(factor(model.ma, 1.0, 1), factor(model.seasonal_ma, 1.0, model.season_period));
}

void validate(const SpectralModel& model) {
  if (!(model.innovation_variance > 0.0) || !std::isfinite(model.innovation_variance))
    throw ModelError("innovation variance must be positive");
  for (const auto* v : {&model.ar, &model.ma, &model.seasonal_ar, &model.seasonal_ma})
    if (!all_finite(*v)) throw ModelError("model coefficients must be finite");
  if (!roots_outside_unit_circle(ar_polynomial(model)))
    throw ModelError("AR polynomial has a root on or inside the unit circle (non-causal)");
  if (!roots_outside_unit_circle(ma_polynomial(model)))
    throw ModelError("MA polynomial has a root on or inside the unit circle (non-invertible)");
}

LogSpectrum::LogSpectrum(std::vector<double> coefficients)
    : coefficients_(std::move(coefficients)) {
  if (!all_finite(coefficients_)) throw std::invalid_argument("log-spectrum coefficients must be finite");
}

std::vector<double> LogSpectrum::log_values(std::span<const double> omegas) const {
  std::vector<double> out(omegas.size());
  kernels::cosine_series(coefficients_, omegas, out);
  return out;
}

std::vector<double> LogSpectrum::values(std::span<const double> omegas) const {
  auto out = log_values(omegas);
  for (double& v : out) v = std::exp(v);
  return out;
}

Eigen::VectorXd cosine_basis(double omega, std::size_t size) {
  Eigen::VectorXd psi(static_cast<Eigen::Index>(size));
  for (std::size_t m = 0; m < size; ++m)
    psi[static_cast<Eigen::Index>(m)] = std::cos(2.0 * std::numbers::pi * static_cast<double>(m) * omega);
  return psi;
}

Eigen::MatrixXd cosine_basis(std::span<const double> omegas, std::size_t size) {
  Eigen::MatrixXd psi(static_cast<Eigen::Index>(omegas.size()), static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < omegas.size(); ++i)
    psi.row(static_cast<Eigen::Index>(i)) = cosine_basis(omegas[i], size).transpose();
  return psi;
}

Spectrum Spectrum::flat(double level) {
  return Spectrum([level](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), level);
  });
}

std::vector<double> Spectrum::operator()(std::span<const double> omegas) const {
  std::vector<double> out(omegas.size());
  evaluate(omegas, out);
  return out;
}

double Spectrum::operator()(double omega) const {
  double out = 0.0;
  evaluate(std::span<const double>(&omega, 1), std::span<double>(&out, 1));
  return out;
}

Spectrum make_spectrum(const SpectralModel& model) {
  validate(model);
  auto num = power_cosine_series(ma_polynomial(model));
  auto den = power_cosine_series(ar_polynomial(model));
  const double s2 = model.innovation_variance;
  return Spectrum([num = std::move(num), den = std::move(den), s2](std::span<const double> omegas,
                                                                    std::span<double> out) {
    std::vector<double> d(omegas.size());
    kernels::cosine_series(num, omegas, out);
    kernels::cosine_series(den, omegas, d);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s2 * out[i] / d[i];
  });
}

Spectrum make_spectrum(const LogSpectrum& log_spectrum) {
  return Spectrum([coeffs = log_spectrum.coefficients()](std::span<const double> omegas,
                                                          std::span<double> out) {
    kernels::cosine_series(coeffs, omegas, out);
    for (double& v : out) v = std::exp(v);
  });
}

Ar2Coefficients ar2_from_omega(double omega0, double modulus) {
  if (!(omega0 > 0.0 && omega0 < 0.5))
    throw std::domain_error("omega0 must lie in the open interval (0, 1/2)");
  if (!(modulus > 0.0 && modulus < 1.0))
    throw std::domain_error("modulus must lie in the open interval (0, 1)");
  return {2.0 * modulus * std::cos(2.0 * std::numbers::pi * omega0), -modulus * modulus};
}

SpectralModel ar2_model(double omega0, double modulus, double innovation_variance) {
  const auto [phi1, phi2] = ar2_from_omega(omega0, modulus);
  SpectralModel model;
  model.ar = {phi1, phi2};
  model.innovation_variance = innovation_variance;
  return model;
}

std::vector<double> spectral_density(const SpectralModel& model, std::span<const double> omegas) {
  return make_spectrum(model)(omegas);
}

QuadratureRule simpson_rule(int panels) {
  if (panels < 2 || panels % 2 != 0)
    throw std::invalid_argument("Simpson rule needs an even number of panels >= 2");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(panels) + 1);
  rule.weights.resize(rule.nodes.size());
  const double h = 0.5 / panels;
  for (int i = 0; i <= panels; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = i * h;
    const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    rule.weights[static_cast<std::size_t>(i)] = w * h / 3.0;
  }
  return rule;
}

namespace {

int checked_panels(int quad_points) {
  if (quad_points < kMinQuadPoints)
    throw std::invalid_argument("quad_points must be at least " + std::to_string(kMinQuadPoints));
  // Simpson needs an even panel count.
  return quad_points + (quad_points % 2);
}

}  // namespace

double twice_half_integral(const Spectrum& f, int quad_points) {
  const auto rule = simpson_rule(checked_panels(quad_points));
  const auto values = f(rule.nodes);
  return 2.0 * kernels::dot(rule.weights, values);
}

int quad_points_for_lag(int max_lag, int minimum) {
  const long wanted = std::max<long>(minimum, 8L * (max_lag + 1));
  return static_cast<int>(wanted + (wanted % 2));
}

std::vector<double> autocovariance(const Spectrum& f, int max_lag, int quad_points) {
  if (max_lag < 0) throw std::invalid_argument("max_lag must be non-negative");
  const auto rule = simpson_rule(checked_panels(quad_points));
  auto weights = f(rule.nodes);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw NumericalError("spectral density is not positive at omega=" +
                           std::to_string(rule.nodes[i]));
    weights[i] *= 2.0 * rule.weights[i];
  }
  std::vector<double> gamma(static_cast<std::size_t>(max_lag) + 1);
  kernels::cosine_transform(weights, rule.nodes, gamma);
  return gamma;
}

std::vector<double> autocovariance(const SpectralModel& model, int max_lag, int quad_points) {
  return autocovariance(make_spectrum(model), max_lag, quad_points);
}

std::vector<double> autocovariance(const LogSpectrum& log_spectrum, int max_lag, int quad_points) {
  return autocovariance(make_spectrum(log_spectrum), max_lag, quad_points);
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& covariance, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(covariance);
  const double pivot = ldlt.vectorD().minCoeff();
  throw NumericalError(std::string(what) + " is not positive definite", pivot);
}

namespace {

Eigen::MatrixXd toeplitz_covariance(std::span<const double> autocov, std::span<const long> indices) {
  const auto n = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const auto lag = static_cast<std::size_t>(std::abs(indices[i] - indices[j]));
      if (lag >= autocov.size()) throw std::invalid_argument("autocovariance too short for index set");
      cov(i, j) = cov(j, i) = autocov[lag];
    }
  return cov;
}

std::vector<long> iota_indices(int n) {
  std::vector<long> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  return idx;
}

}  // namespace

std::vector<double> innovations_draw(std::span<const double> autocov, std::uint64_t seed) {
  // Durbin-Levinson recursion; the innovation form x_t = sum_j phi_tj x_{t-j} + sqrt(v_t) z_t
  // is the Cholesky factor of the Toeplitz matrix written out row by row.
  const std::size_t n = autocov.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> x(n), phi, prev;
  phi.reserve(n);
  prev.reserve(n);
  double v = autocov.empty() ? 0.0 : autocov[0];
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) {
      double num = autocov[t];
      for (std::size_t j = 1; j < t; ++j) num -= prev[j - 1] * autocov[t - j];
      const double k = num / v;
      phi.assign(t, 0.0);
      for (std::size_t j = 1; j < t; ++j) phi[j - 1] = prev[j - 1] - k * prev[t - j - 1];
      phi[t - 1] = k;
      v *= 1.0 - k * k;
      prev.swap(phi);
    }
    if (!(v > 0.0)) throw NumericalError("Toeplitz covariance is not positive definite", v);
    double mean = 0.0;
    for (std::size_t j = 1; j <= t; ++j) mean += prev[j - 1] * x[t - j];
    x[t] = mean + std::sqrt(v) * normal(rng);
  }
  return x;
}

GaussianSampler::GaussianSampler(std::span<const double> autocov, std::span<const long> indices)
    : factor_(cholesky_lower(toeplitz_covariance(autocov, indices), "Toeplitz covariance")) {}

std::vector<double> GaussianSampler::draw(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(factor_.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  const Eigen::VectorXd x = factor_.triangularView<Eigen::Lower>() * z;
  return {x.data(), x.data() + x.size()};
}

std::vector<double> simulate_at(const Spectrum& f, std::span<const long> indices,
                                std::uint64_t seed) {
  if (indices.empty()) return {};
  if (!std::is_sorted(indices.begin(), indices.end()) ||
      std::adjacent_find(indices.begin(), indices.end()) != indices.end() || indices.front() < 0)
    throw std::invalid_argument("indices must be sorted, distinct and non-negative");
  const auto span = static_cast<int>(indices.back() - indices.front());
  const auto gamma = autocovariance(f, span, quad_points_for_lag(span));
  const long step = indices.size() > 1 ? indices[1] - indices[0] : 1;
  bool regular = true;
  for (std::size_t i = 1; i < indices.size() && regular; ++i) regular = indices[i] - indices[i - 1] == step;
  if (!regular) return GaussianSampler(gamma, indices).draw(seed);
  std::vector<double> lagged(indices.size());
  for (std::size_t h = 0; h < lagged.size(); ++h) lagged[h] = gamma[h * static_cast<std::size_t>(step)];
  return innovations_draw(lagged, seed);
}

SampledSeries simulate(const Spectrum& f, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("simulation length must be at least 1");
  const auto idx = iota_indices(n);
  SampledSeries out;
  out.values = simulate_at(f, idx, seed);
  return out;
}

SampledSeries simulate(const SpectralModel& model, int n, std::uint64_t seed) {
  return simulate(make_spectrum(model), n, seed);
}

SampledSeries simulate(const LogSpectrum& log_spectrum, int n, std::uint64_t seed) {
  return simulate(make_spectrum(log_spectrum), n, seed);
}

SampledSeries subsample(const SampledSeries& series, int stride, int offset) {
  if (stride < 1) throw std::invalid_argument("stride must be at least 1");
  if (offset < 0 || offset >= stride)
    throw std::invalid_argument("offset must satisfy 0 <= offset < stride");
  if (series.stride != 1) throw std::invalid_argument("subsample expects a dense (stride 1) series");
  SampledSeries out;
  out.stride = stride;
  out.offset = series.offset + offset;
  out.base_step = series.base_step;
  for (std::size_t k = static_cast<std::size_t>(offset); k < series.values.size(); k += static_cast<std::size_t>(stride))
    out.values.push_back(series.values[k]);
  return out;
}

}  // namespace mrspec
