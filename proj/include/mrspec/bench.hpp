#pragma once

// Monte Carlo scoring of log-spectrum estimators and the interpolation-based
// baselines they are compared against.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mrspec/blm.hpp"
#include "mrspec/likelihood.hpp"
#include "mrspec/process.hpp"

namespace mrspec {

/// Mean squared difference of two log-spectra sampled on the same grid.
double discrepancy(std::span<const double> true_log_spectrum,
                   std::span<const double> estimated_log_spectrum);

/// Log-spectrum with coefficients drawn from the smoothness prior.
LogSpectrum random_process(const PriorSpec& prior, std::uint64_t seed);

/// Deterministic per-replicate seed stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream);

struct BenchDesign {
  int delta1 = 1;
  int n1 = 16;
  int delta2 = 1;
  int n2 = 16;
  int replicates = 100;
  std::size_t n_omega = 128;
  std::uint64_t seed = 0;
  PriorSpec prior;
  int mc_samples = 2000;
  /// "blm" adjusts by both series; "prior" scores the unadjusted prior mean.
  std::string estimator = "blm";
};

struct BenchResult {
  double mean = 0.0;
  double stderr_mean = 0.0;
  int successes = 0;
  int failures = 0;
  /// Per-replicate scores in replicate order (NaN for failures).
  std::vector<double> scores;
};

void validate(const BenchDesign& design);

/// Base indices of D1 (every delta1-th of the first delta1*n1 steps) followed
/// without gap by D2.
std::pair<std::vector<long>, std::vector<long>> bench_indices(const BenchDesign& design);

BenchResult run_bench(const BenchDesign& design);

struct BenchTable {
  std::vector<std::pair<int, int>> rows;     // D1 (delta, N)
  std::vector<std::pair<int, int>> columns;  // D2 (delta, N)
  std::vector<std::vector<BenchResult>> cells;
};

/// Runs every (D1, D2) pair; `base` supplies replicates, seed, prior and grid.
BenchTable table_sweep(std::span<const std::pair<int, int>> rows,
                       std::span<const std::pair<int, int>> columns, const BenchDesign& base);

/// D1 rows by D2 columns; cells with no successful replicate read NA.
std::string table_csv(const BenchTable& table, bool standard_errors);

/// Natural cubic spline through the observations, evaluated at every base
/// index between the first and last (observed values reproduced exactly).
SampledSeries spline_fill(std::span<const Observation> observations);
SampledSeries spline_interpolate(const SampledSeries& series);

struct ArFit {
  std::vector<double> coefficients;
  double innovation_variance = 0.0;
  std::size_t order = 0;
};

/// Yule-Walker fit with order chosen by AIC = N log(var) + 2p, ties to the smaller order.
ArFit fit_ar_aic(std::span<const double> values, std::size_t max_order);

struct BaselineSpectra {
  std::vector<double> omegas;
  std::vector<double> ar_log_spectrum;
  std::vector<double> smoothed_log_periodogram;
  std::size_t ar_order = 0;
};

/// Yule-Walker/AIC AR spectrum and modified-Daniell smoothed periodogram on
/// the standard grid of n_omega points.
BaselineSpectra baseline_spectra(const SampledSeries& dense, std::size_t n_omega = 128);

/// Share of power (trapezoid on the grid) at frequencies below `cutoff`.
double power_fraction_below(std::span<const double> log_spectrum, std::span<const double> grid,
                            double cutoff);

/// Dense AR(2) series with a spectral peak above the coarse Nyquist frequency;
/// the leading `history_fraction` of it is kept only every `history_stride`
/// steps, the rest densely.
struct InterpolationScenario {
  double omega_peak = 0.35;
  double modulus = 0.9;
  int length = 384;
  double history_fraction = 5.0 / 6.0;
  int history_stride = 2;
  std::uint64_t seed = 0;
  PriorSpec prior;
  int mc_samples = 2000;
  std::size_t n_omega = 128;
};

struct InterpolationComparison {
  std::vector<double> omegas;
  std::vector<double> truth;           // log f
  std::vector<double> blm_raw;         // adjusted by the observed history and recent data
  std::vector<double> blm_interpolated;  // adjusted by the spline-filled series as if dense
  std::vector<double> ar_fit;
  std::vector<double> smoothed_periodogram;
  std::size_t ar_order = 0;
  BeliefState history_only;  // adjusted by the subsampled history alone
  BeliefState raw;
  std::vector<Observation> observed;
  SampledSeries interpolated;
  std::vector<double> full_path;
};

InterpolationComparison compare_interpolation(const InterpolationScenario& scenario);

}  // namespace mrspec
