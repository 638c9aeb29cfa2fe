#pragma once

// Exact Gaussian likelihood for irregularly (systematically) subsampled data,
// and Monte Carlo averaged likelihood surfaces over the AR(2) peak frequency.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mrspec/process.hpp"

namespace mrspec {

struct Observation {
  long index;  // position on the base time grid
  double value;
};

/// Factors the covariance of one index pattern once; evaluates many datasets.
class GaussianLikelihood {
 public:
  GaussianLikelihood(const Spectrum& f, std::span<const long> indices);
  GaussianLikelihood(const SpectralModel& model, std::span<const long> indices);

  double operator()(std::span<const double> values) const;
  std::size_t size() const { return static_cast<std::size_t>(factor_.rows()); }

 private:
  Eigen::MatrixXd factor_;
  double log_det_ = 0.0;
};

/// log N(x; 0, Sigma) with Sigma_jk = gamma(|idx_j - idx_k|). Throws
/// NumericalError (with the smallest pivot) if Sigma is not positive definite.
double exact_loglik(const SpectralModel& model, std::span<const Observation> observations);

struct LikelihoodSurface {
  std::vector<double> omegas;
  std::vector<double> loglik;
  /// false where evaluation failed; loglik holds -inf there.
  std::vector<bool> valid;
  /// Monte Carlo standard error of each aligned value (difference from the
  /// argmax point, across replicates). Empty for single-dataset surfaces.
  std::vector<double> stderr_aligned;
  bool aligned = false;
};

/// Subtracts the maximum over valid points; idempotent.
LikelihoodSurface align(LikelihoodSurface surface);

/// `size` equally spaced values on [1/(2 size), (size-1)/(2 size)].
std::vector<double> default_omega_grid(int size = 201);

LikelihoodSurface omega_surface(std::span<const Observation> data, std::span<const double> grid,
                                double modulus, double innovation_variance = 1.0);

struct ExperimentDesign {
  int n_low = 128;
  int n_high = 0;
  int delta_low = 2;
  int replicates = 500;
  double omega_true = 1.0 / 12.0;
  double modulus = 0.9;
  std::vector<double> grid = default_omega_grid();
  std::uint64_t seed = 0;
};

void validate(const ExperimentDesign& design);

/// Base indices of D_low (every delta_low-th point) then D_high (consecutive
/// points starting right after D_low's span, no gap).
std::vector<long> design_indices(const ExperimentDesign& design);

/// Replicate r's observations, drawn with seed (design.seed ^ r).
std::vector<Observation> simulate_design(const ExperimentDesign& design, int replicate);

/// Replicate-averaged surface, max-aligned.
LikelihoodSurface mc_average_surface(const ExperimentDesign& design);

}  // namespace mrspec
