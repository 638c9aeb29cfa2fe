#include "mrspec/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mrspec/errors.hpp"

namespace mrspec {

namespace {

Eigen::MatrixXd pattern_covariance(const Spectrum& f, std::span<const long> indices) {
  if (indices.empty()) throw std::invalid_argument("likelihood needs at least one observation");
  const auto [lo, hi] = std::minmax_element(indices.begin(), indices.end());
  if (*lo < 0) throw std::invalid_argument("observation indices must be non-negative");
  const int max_lag = static_cast<int>(*hi - *lo);
  const auto gamma = autocovariance(f, max_lag, quad_points_for_lag(max_lag));
  const auto n = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const auto lag = static_cast<std::size_t>(std::abs(indices[i] - indices[j]));
      if (lag == 0 && i != j) throw std::invalid_argument("observation indices must be distinct");
      cov(i, j) = cov(j, i) = gamma[lag];
    }
  return cov;
}

}  // namespace

GaussianLikelihood::GaussianLikelihood(const Spectrum& f, std::span<const long> indices)
    : factor_(cholesky_lower(pattern_covariance(f, indices), "observation covariance")) {
  log_det_ = 2.0 * factor_.diagonal().array().log().sum();
}

GaussianLikelihood::GaussianLikelihood(const SpectralModel& model, std::span<const long> indices)
    : GaussianLikelihood(make_spectrum(model), indices) {}

double GaussianLikelihood::operator()(std::span<const double> values) const {
  if (values.size() != size()) throw std::invalid_argument("dataset size does not match pattern");
  Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(values.data(), factor_.rows());
  factor_.triangularView<Eigen::Lower>().solveInPlace(z);
  const double n = static_cast<double>(values.size());
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + log_det_ + z.squaredNorm());
}

double exact_loglik(const SpectralModel& model, std::span<const Observation> observations) {
  std::vector<long> idx;
  std::vector<double> values;
  for (const auto& o : observations) {
    idx.push_back(o.index);
    values.push_back(o.value);
  }
  return GaussianLikelihood(model, idx)(values);
}

LikelihoodSurface align(LikelihoodSurface surface) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < surface.loglik.size(); ++i)
    if (surface.valid[i]) best = std::max(best, surface.loglik[i]);
  if (std::isfinite(best))
    for (std::size_t i = 0; i < surface.loglik.size(); ++i)
      if (surface.valid[i]) surface.loglik[i] -= best;
  surface.aligned = true;
  return surface;
}

std::vector<double> default_omega_grid(int size) {
  if (size < 1) throw std::invalid_argument("grid size must be positive");
  std::vector<double> grid(static_cast<std::size_t>(size));
  if (size == 1) {
    grid[0] = 0.25;
    return grid;
  }
  const double lo = 0.5 / size;
  const double hi = 0.5 * (size - 1) / size;
  for (int i = 0; i < size; ++i) grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (size - 1);
  return grid;
}

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("omega grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] < 0.5)) throw std::invalid_argument("grid values must lie in (0, 1/2)");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("grid must be strictly increasing");
  }
}

// Evaluates every dataset (all sharing one index pattern) at every grid point.
// result[g][r]; NaN marks a failed grid point.
std::vector<std::vector<double>> scan(std::span<const long> indices,
                                      const std::vector<std::vector<double>>& datasets,
                                      std::span<const double> grid, double modulus, double s2) {
  std::vector<std::vector<double>> out(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    try {
      const GaussianLikelihood lik(ar2_model(grid[g], modulus, s2), indices);
      for (const auto& values : datasets) out[g].push_back(lik(values));
    } catch (const NumericalError&) {
      out[g].assign(datasets.size(), std::numeric_limits<double>::quiet_NaN());
    } catch (const ModelError&) {
      out[g].assign(datasets.size(), std::numeric_limits<double>::quiet_NaN());
    }
  }
  return out;
}

}  // namespace

LikelihoodSurface omega_surface(std::span<const Observation> data, std::span<const double> grid,
                                double modulus, double innovation_variance) {
  check_grid(grid);
  if (data.empty()) throw std::invalid_argument("surface needs at least one observation");
  std::vector<long> idx;
  std::vector<double> values;
  for (const auto& o : data) {
    idx.push_back(o.index);
    values.push_back(o.value);
  }
  const auto table = scan(idx, {values}, grid, modulus, innovation_variance);
  LikelihoodSurface s;
  s.omegas.assign(grid.begin(), grid.end());
  for (const auto& row : table) {
    const bool ok = !std::isnan(row[0]);
    s.valid.push_back(ok);
    s.loglik.push_back(ok ? row[0] : -std::numeric_limits<double>::infinity());
  }
  return s;
}

void validate(const ExperimentDesign& d) {
  if (d.replicates < 1) throw std::invalid_argument("replicates must be at least 1");
  if (d.n_low < 0 || d.n_high < 0 || (d.n_low == 0 && d.n_high == 0))
    throw std::invalid_argument("n_low and n_high must be non-negative and not both zero");
  if (d.delta_low < 1) throw std::invalid_argument("delta_low must be at least 1");
  if (!(d.omega_true > 0.0 && d.omega_true < 0.5)) throw std::invalid_argument("omega_true must lie in (0, 1/2)");
  if (!(d.modulus > 0.0 && d.modulus < 1.0)) throw std::invalid_argument("modulus must lie in (0, 1)");
  check_grid(d.grid);
}

std::vector<long> design_indices(const ExperimentDesign& d) {
  std::vector<long> idx;
  for (int k = 0; k < d.n_low; ++k) idx.push_back(static_cast<long>(k) * d.delta_low);
  const long start = static_cast<long>(d.n_low) * d.delta_low;
  for (int k = 0; k < d.n_high; ++k) idx.push_back(start + k);
  return idx;
}

namespace {

std::vector<std::vector<double>> simulate_replicates(const ExperimentDesign& d,
                                                     std::span<const long> idx) {
  const int span = static_cast<int>(idx.back());
  const auto gamma = autocovariance(ar2_model(d.omega_true, d.modulus), span, quad_points_for_lag(span));
  const GaussianSampler sampler(gamma, idx);
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(d.replicates));
  for (int r = 0; r < d.replicates; ++r)
    out.push_back(sampler.draw(d.seed ^ static_cast<std::uint64_t>(r)));
  return out;
}

}  // namespace

std::vector<Observation> simulate_design(const ExperimentDesign& design, int replicate) {
  validate(design);
  const auto idx = design_indices(design);
  ExperimentDesign one = design;
  one.replicates = 1;
  one.seed = design.seed ^ static_cast<std::uint64_t>(replicate);
  const auto values = simulate_replicates(one, idx).front();
  std::vector<Observation> out;
  for (std::size_t i = 0; i < idx.size(); ++i) out.push_back({idx[i], values[i]});
  return out;
}

LikelihoodSurface mc_average_surface(const ExperimentDesign& design) {
  validate(design);
  const auto idx = design_indices(design);
  const auto datasets = simulate_replicates(design, idx);
  const auto table = scan(idx, datasets, design.grid, design.modulus, 1.0);

  LikelihoodSurface s;
  s.omegas = design.grid;
  // Fixed-order reduction over replicate index.
  for (const auto& row : table) {
    double sum = 0.0;
    int used = 0;
    for (double v : row)
      if (!std::isnan(v)) {
        sum += v;
        ++used;
      }
    s.valid.push_back(used > 0);
    s.loglik.push_back(used > 0 ? sum / used : -std::numeric_limits<double>::infinity());
  }
  s = align(std::move(s));

  std::size_t best = 0;
  for (std::size_t g = 0; g < s.loglik.size(); ++g)
    if (s.valid[g] && (!s.valid[best] || s.loglik[g] > s.loglik[best])) best = g;
  const auto reps = static_cast<double>(design.replicates);
  for (std::size_t g = 0; g < table.size(); ++g) {
    if (!s.valid[g] || !s.valid[best] || design.replicates < 2) {
      s.stderr_aligned.push_back(0.0);
      continue;
    }
    double mean = 0.0;
    for (int r = 0; r < design.replicates; ++r) mean += table[g][r] - table[best][r];
    mean /= reps;
    double ss = 0.0;
    for (int r = 0; r < design.replicates; ++r) {
      const double dev = table[g][r] - table[best][r] - mean;
      ss += dev * dev;
    }
    s.stderr_aligned.push_back(std::sqrt(ss / (reps - 1.0) / reps));
  }
  return s;
}

}  // namespace mrspec
