#pragma once

// Communicating and propagating log-spectrum uncertainty: principal-component
// fans, Smolyak sparse Gauss-Hermite quadrature over leading component scores,
// and Kolmogorov's one-step prediction variance.

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mrspec/blm.hpp"
#include "mrspec/process.hpp"

namespace mrspec {

/// Eigen-decomposition of a belief's variance, eigenvalues descending.
struct PCDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // column k pairs with eigenvalues[k]
  BeliefState base;
};

PCDecomposition principal_components(const BeliefState& state);

/// Phi^{-1}(i/10), i = 1..9.
std::vector<double> decile_quantiles();

struct PcFan {
  std::size_t component = 0;
  double loading = 0.0;  // sqrt(lambda_k)
  std::vector<double> quantiles;
  std::vector<std::vector<double>> curves;  // curves[i][g], spectrum (not log) values
};

/// Nine spectra exp(psi'(mean + q_i sqrt(lambda_k) u_k)); k is zero-based.
PcFan pc_fan(const BeliefState& state, std::size_t component, std::span<const double> grid);

struct QuadratureGrid {
  int dimension = 0;
  int level = 0;
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard normal density (weights sum to one).
QuadratureGrid gauss_hermite(int points);

/// Smolyak combination of Gauss-Hermite rules, exact for total degree <= 2*level-1.
QuadratureGrid sparse_grid(int dimension, int level);

/// Expected value of a spectrum functional with uncertainty truncated to the
/// leading `dimension` principal components.
double propagate(const BeliefState& state, int dimension, int level,
                 const std::function<double(const LogSpectrum&)>& functional);

/// exp(2 int_0^{1/2} log f) by composite Simpson.
double kolmogorov_variance(const Spectrum& f, int quad_points);
double kolmogorov_variance(const LogSpectrum& log_spectrum, int quad_points);

}  // namespace mrspec
