#pragma once

// Stationary process models, their spectra and autocovariances, and Gaussian
// path simulation.
//
// Spectral convention used throughout the library: f lives on [0, 1/2] in
// cycles per sampling step and the process variance is 2 * int_0^{1/2} f.
// White noise with variance s2 therefore has f == s2.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mrspec {

/// Seasonal ARMA model
///   (1 - sum ar_i B^i)(1 - sum sar_j B^{s j}) x_t = (1 + sum ma_i B^i)(1 + sum sma_j B^{s j}) e_t
struct SpectralModel {
  std::vector<double> ar;
  std::vector<double> ma;
  std::vector<double> seasonal_ar;
  std::vector<double> seasonal_ma;
  int season_period = 1;
  double innovation_variance = 1.0;
};

/// Throws ModelError unless the model is causal, invertible and has positive variance.
void validate(const SpectralModel& model);

/// Full AR polynomial coefficients a_0 = 1, a_1, ... with the seasonal factor expanded.
std::vector<double> ar_polynomial(const SpectralModel& model);
std::vector<double> ma_polynomial(const SpectralModel& model);

/// True when every root of 1 + c_1 z + ... + c_p z^p lies strictly outside the unit circle.
bool roots_outside_unit_circle(std::span<const double> coeffs);

/// log f(omega) = sum_m coefficients[m] * cos(2 pi m omega)
class LogSpectrum {
 public:
  LogSpectrum() = default;
  explicit LogSpectrum(std::vector<double> coefficients);

  std::size_t size() const { return coefficients_.size(); }
  const std::vector<double>& coefficients() const { return coefficients_; }

  std::vector<double> log_values(std::span<const double> omegas) const;
  std::vector<double> values(std::span<const double> omegas) const;

 private:
  std::vector<double> coefficients_;
};

/// Basis row psi(omega) = (1, cos(2 pi omega), ..., cos(2 pi (M-1) omega)).
Eigen::VectorXd cosine_basis(double omega, std::size_t size);
/// Rows are cosine_basis(omegas[i]).
Eigen::MatrixXd cosine_basis(std::span<const double> omegas, std::size_t size);

/// Type-erased spectral density evaluator. Evaluators built from models and
/// log-spectra are even and 1-periodic, so any real frequency is accepted.
class Spectrum {
 public:
  using Evaluator = std::function<void(std::span<const double>, std::span<double>)>;

  explicit Spectrum(Evaluator evaluator) : evaluator_(std::move(evaluator)) {}

  static Spectrum flat(double level);

  void evaluate(std::span<const double> omegas, std::span<double> out) const {
    evaluator_(omegas, out);
  }
  std::vector<double> operator()(std::span<const double> omegas) const;
  double operator()(double omega) const;

 private:
  Evaluator evaluator_;
};

Spectrum make_spectrum(const SpectralModel& model);
Spectrum make_spectrum(const LogSpectrum& log_spectrum);

struct Ar2Coefficients {
  double phi1;
  double phi2;
};

/// AR(2) with a complex root pair of the given modulus placed at frequency omega0.
Ar2Coefficients ar2_from_omega(double omega0, double modulus);
SpectralModel ar2_model(double omega0, double modulus, double innovation_variance = 1.0);

std::vector<double> spectral_density(const SpectralModel& model, std::span<const double> omegas);

/// Composite Simpson rule on [0, 1/2] with an even number of panels.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule simpson_rule(int panels);

/// 2 * int_0^{1/2} g
double twice_half_integral(const Spectrum& f, int quad_points);

constexpr int kMinQuadPoints = 256;

/// Panel count that keeps lags up to max_lag well resolved.
int quad_points_for_lag(int max_lag, int minimum = 4096);

/// gamma(h) = 2 int_0^{1/2} f(w) cos(2 pi w h) dw for h = 0..max_lag.
std::vector<double> autocovariance(const Spectrum& f, int max_lag, int quad_points);
std::vector<double> autocovariance(const SpectralModel& model, int max_lag, int quad_points);
std::vector<double> autocovariance(const LogSpectrum& log_spectrum, int max_lag, int quad_points);

/// Observations on a base time grid: value k sits at base index offset + k * stride.
struct SampledSeries {
  std::vector<double> values;
  int stride = 1;
  int offset = 0;
  double base_step = 1.0;

  std::size_t size() const { return values.size(); }
  long base_index(std::size_t k) const { return offset + static_cast<long>(k) * stride; }
};

/// Lower Cholesky factor; throws NumericalError naming the smallest pivot on failure.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& covariance, const char* what);

/// Draws zero-mean Gaussian vectors with covariance gamma(|i - j|) over a fixed index set.
class GaussianSampler {
 public:
  GaussianSampler(std::span<const double> autocov, std::span<const long> indices);
  std::vector<double> draw(std::uint64_t seed) const;
  std::size_t size() const { return static_cast<std::size_t>(factor_.rows()); }

 private:
  Eigen::MatrixXd factor_;
};

SampledSeries simulate(const Spectrum& f, int n, std::uint64_t seed);
SampledSeries simulate(const SpectralModel& model, int n, std::uint64_t seed);
SampledSeries simulate(const LogSpectrum& log_spectrum, int n, std::uint64_t seed);

/// Draws the process only at the given (sorted, distinct) base indices; same
/// distribution as simulating the full path and picking those entries.
/// Draws a zero-mean Gaussian vector with covariance Toeplitz(autocov) by the
/// innovations recursion; O(n^2) time, O(n) memory.
std::vector<double> innovations_draw(std::span<const double> autocov, std::uint64_t seed);

std::vector<double> simulate_at(const Spectrum& f, std::span<const long> indices,
                                std::uint64_t seed);

SampledSeries subsample(const SampledSeries& series, int stride, int offset);

}  // namespace mrspec
