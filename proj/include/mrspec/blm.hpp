#pragma once

// Bayes linear adjustment of log-spectrum basis coefficients by log-periodograms
// of series observed at different strides.
//
// The log-spectrum is log f(w) = sum_m beta_m psi_m(w) with the cosine basis
// psi_0 = 1, psi_m = cos(2 pi m w). A log-periodogram ordinate of a stride-delta
// series at coarse frequency nu is modelled as
//   D = log fold(exp(psi' beta), delta)(nu) - euler_gamma + eps,  Var(eps) = pi^2/6,
// with eps independent across ordinates. D is nonlinear in beta, so its prior
// moments are estimated by seeded Monte Carlo.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mrspec/process.hpp"

namespace mrspec {

constexpr double kEulerGamma = 0.57721566490153286;
constexpr double kLogPeriodogramVariance = 1.6449340668482264;  // pi^2 / 6

/// Second-order belief about the basis coefficients.
struct BeliefState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd variance;

  std::size_t size() const { return static_cast<std::size_t>(mean.size()); }
};

/// Symmetrizes the variance and clips tiny negative eigenvalues to zero.
/// Throws NumericalError if an eigenvalue is below -1e-8 * trace.
BeliefState make_belief(Eigen::VectorXd mean, Eigen::MatrixXd variance);

/// Diagonal smoothness prior: Var(beta_m) = scale / (1 + (m / cutoff)^(2 smoothness)).
struct PriorSpec {
  std::size_t basis_size = 32;
  double intercept_mean = 0.0;
  double scale = 1.0;
  double smoothness = 2.0;
  double cutoff = 4.0;
};

double prior_variance(const PriorSpec& spec, std::size_t m);
BeliefState prior_belief(const PriorSpec& spec);

/// Which ordinates a series contributes: stride and coarse Fourier frequencies.
struct DataLayout {
  std::string series_id;
  int stride = 1;
  std::vector<double> frequencies;
};

/// j / n for j = 1..floor((n-1)/2); zero and Nyquist are excluded.
std::vector<double> fourier_frequencies(std::size_t n);

DataLayout layout_for(std::string series_id, int stride, std::size_t length);

struct PeriodogramData {
  DataLayout layout;
  std::vector<double> log_periodogram;
};

/// Raw periodogram I = |sum_t (x_t - mean) e^{-i 2 pi nu t}|^2 / n at the
/// coarse Fourier frequencies, so that E[I] ~ f_delta; returns log I.
PeriodogramData log_periodogram(const SampledSeries& series, std::string series_id = "");

/// Prior moments of the stacked log-periodogram vector D.
struct ForecastMoments {
  struct Segment {
    std::string series_id;
    Eigen::Index start;
    Eigen::Index size;
  };
  Eigen::VectorXd expectation;  // E(D)
  Eigen::MatrixXd variance;     // Var(D)
  Eigen::MatrixXd covariance;   // Cov(beta, D), basis_size x dim(D)
  std::vector<Segment> segments;
};

constexpr int kMinMomentSamples = 500;

ForecastMoments forecast_moments(const BeliefState& prior, std::span<const DataLayout> layouts,
                                 int mc_samples, std::uint64_t seed);

/// Stacks observed log-periodograms in layout order.
Eigen::VectorXd stack_observations(std::span<const PeriodogramData> data);

BeliefState adjust(const BeliefState& prior, const ForecastMoments& moments,
                   const Eigen::VectorXd& observed);

struct SequentialAdjustment {
  BeliefState final_state;
  /// stages[k] is the belief after the first k+1 adjustments in `order`.
  std::vector<BeliefState> stages;
};

/// Adjusts by one segment at a time, carrying the joint belief over the
/// remaining data forward. `order` lists segment indices; empty means 0..n-1.
SequentialAdjustment sequential_adjust(const BeliefState& prior, const ForecastMoments& moments,
                                       std::span<const Eigen::VectorXd> observed,
                                       std::vector<std::size_t> order = {});

struct SpectrumSummary {
  std::vector<double> omegas;
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<double> lo50, hi50, lo90, hi90;
};

/// Pointwise log-space mean, sd and 50%/90% intervals; bounds and mean are
/// exponentiated when `exponentiate` is set (sd stays in log space).
SpectrumSummary spectrum_summary(const BeliefState& state, std::span<const double> grid,
                                 bool exponentiate = false);

/// curves[i][i] is state i's mean log-spectrum; curves[i][j] = mean_i - mean_j.
using CurveGrid = std::vector<std::vector<std::vector<double>>>;
CurveGrid difference_grid(std::span<const BeliefState> states, std::span<const double> grid);

/// Standard evaluation grid w_j = j / (2 (n - 1)), j = 0..n-1.
std::vector<double> standard_grid(std::size_t n = 128);

/// Mean log-spectrum of a belief on a grid.
std::vector<double> mean_log_spectrum(const BeliefState& state, std::span<const double> grid);

/// Caches the forecast moments for a fixed set of layouts.
class BayesLinearEstimator {
 public:
  BayesLinearEstimator(BeliefState prior, std::vector<DataLayout> layouts, int mc_samples,
                       std::uint64_t seed);

  const BeliefState& prior() const { return prior_; }
  const ForecastMoments& moments() const { return moments_; }
  const std::vector<DataLayout>& layouts() const { return layouts_; }

  /// Data must match the layouts in order (stride and length).
  BeliefState adjust(std::span<const PeriodogramData> data) const;
  SequentialAdjustment adjust_sequentially(std::span<const PeriodogramData> data) const;

 private:
  BeliefState prior_;
  std::vector<DataLayout> layouts_;
  ForecastMoments moments_;
};

}  // namespace mrspec
