#include "mrspec/blm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "mrspec/aliasing.hpp"
#include "mrspec/errors.hpp"
#include "mrspec/kernels.hpp"

namespace mrspec {

BeliefState make_belief(Eigen::VectorXd mean, Eigen::MatrixXd variance) {
  if (variance.rows() != mean.size() || variance.cols() != mean.size())
    throw std::invalid_argument("belief mean and variance sizes disagree");
  if (!mean.allFinite() || !variance.allFinite())
    throw NumericalError("belief state has non-finite entries");
  Eigen::MatrixXd sym = 0.5 * (variance + variance.transpose());
  if (sym.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    const double trace = std::max(sym.trace(), 0.0);
    const double lowest = eig.eigenvalues().minCoeff();
    if (lowest < -1e-8 * trace)
      throw NumericalError("belief variance is not positive semi-definite", lowest);
    if (lowest < 0.0) {
      const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
      sym = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
      sym = 0.5 * (sym + sym.transpose()).eval();
    }
  }
  return {std::move(mean), std::move(sym)};
}

double prior_variance(const PriorSpec& spec, std::size_t m) {
  return spec.scale / (1.0 + std::pow(static_cast<double>(m) / spec.cutoff, 2.0 * spec.smoothness));
}

BeliefState prior_belief(const PriorSpec& spec) {
  if (spec.basis_size < 1) throw std::invalid_argument("basis size must be at least 1");
  if (!(spec.scale > 0.0) || !(spec.smoothness > 0.0) || !(spec.cutoff > 0.0))
    throw std::invalid_argument("prior scale, smoothness and cutoff must be positive");
  const auto m = static_cast<Eigen::Index>(spec.basis_size);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
  mean[0] = spec.intercept_mean;
  Eigen::VectorXd v(m);
  for (Eigen::Index i = 0; i < m; ++i) v[i] = prior_variance(spec, static_cast<std::size_t>(i));
  return make_belief(std::move(mean), v.asDiagonal());
}

std::vector<double> fourier_frequencies(std::size_t n) {
  std::vector<double> out;
  for (std::size_t j = 1; 2 * j < n; ++j) out.push_back(static_cast<double>(j) / static_cast<double>(n));
  return out;
}

DataLayout layout_for(std::string series_id, int stride, std::size_t length) {
  if (stride < 1) throw std::invalid_argument("stride must be at least 1");
  return {std::move(series_id), stride, fourier_frequencies(length)};
}

PeriodogramData log_periodogram(const SampledSeries& series, std::string series_id) {
  const std::size_t n = series.size();
  if (n < 8) throw std::invalid_argument("log-periodogram needs at least 8 observations");
  const double mean = std::accumulate(series.values.begin(), series.values.end(), 0.0) / n;
  std::vector<double> centred(series.values);
  for (double& v : centred) v -= mean;
  PeriodogramData out{layout_for(std::move(series_id), series.stride, n), {}};
  std::vector<double> power(out.layout.frequencies.size());
  kernels::dft_power(centred, out.layout.frequencies, power);
  for (double p : power) {
    const double ordinate = p / static_cast<double>(n);
    if (!(ordinate > 0.0)) throw NumericalError("periodogram ordinate is zero; series is degenerate");
    out.log_periodogram.push_back(std::log(ordinate));
  }
  return out;
}

namespace {

// Square root of a PSD matrix from its eigendecomposition (tolerates zero variance).
Eigen::MatrixXd psd_root(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& eig, double trace) {
  if (eig.eigenvalues().size() > 0 && eig.eigenvalues().minCoeff() < -1e-8 * std::max(trace, 0.0))
    throw NumericalError("prior variance is not positive semi-definite", eig.eigenvalues().minCoeff());
  return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

ForecastMoments forecast_moments(const BeliefState& prior, std::span<const DataLayout> layouts,
                                 int mc_samples, std::uint64_t seed) {
  if (mc_samples < kMinMomentSamples)
    throw std::invalid_argument("forecast_moments needs at least " + std::to_string(kMinMomentSamples) +
                                " Monte Carlo samples");
  ForecastMoments out;
  // Every ordinate's aliased branch frequencies, flattened.
  std::vector<double> branches;
  std::vector<int> branch_count;
  Eigen::Index dim = 0;
  for (const auto& layout : layouts) {
    if (layout.stride < 1) throw std::invalid_argument("stride must be at least 1");
    out.segments.push_back({layout.series_id, dim, static_cast<Eigen::Index>(layout.frequencies.size())});
    dim += static_cast<Eigen::Index>(layout.frequencies.size());
    for (double nu : layout.frequencies) {
      for (int k = 0; k < layout.stride; ++k)
        branches.push_back(reduce_frequency((nu + k) / layout.stride));
      branch_count.push_back(layout.stride);
    }
  }

  const auto m = static_cast<Eigen::Index>(prior.size());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(prior.variance);
  const Eigen::MatrixXd root = psd_root(eig, prior.variance.trace());
  // Reflection about omega = 1/4 flips the sign of odd cosine coefficients. When the prior
  // variance is invariant under it, draws are taken in reflected pairs z, Qz (Q orthogonal).
  Eigen::VectorXd flip(m);
  for (Eigen::Index i = 0; i < m; ++i) flip[i] = i % 2 == 0 ? 1.0 : -1.0;
  const Eigen::MatrixXd reflected = flip.asDiagonal() * prior.variance * flip.asDiagonal();
  const bool paired = (reflected - prior.variance).norm() <= 1e-12 * std::max(prior.variance.norm(), 1e-300);
  const Eigen::MatrixXd q = eig.eigenvectors().transpose() * flip.asDiagonal() * eig.eigenvectors();
  Eigen::MatrixXd zs(mc_samples, m);
  Eigen::MatrixXd mus(mc_samples, dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(m);
  std::vector<double> coeffs(static_cast<std::size_t>(m));
  std::vector<double> log_f(branches.size());
  for (int s = 0; s < mc_samples; ++s) {
    if (paired && s % 2 == 1)
      z = (q * z).eval();
    else
      for (Eigen::Index i = 0; i < m; ++i) z[i] = normal(rng);
    const Eigen::VectorXd beta = prior.mean + root * z;
    zs.row(s) = z.transpose();
    std::copy(beta.data(), beta.data() + m, coeffs.begin());
    kernels::cosine_series(coeffs, branches, log_f);
    std::size_t b = 0;
    for (Eigen::Index j = 0; j < dim; ++j) {
      const int count = branch_count[static_cast<std::size_t>(j)];
      double acc = 0.0;
      for (int k = 0; k < count; ++k) acc += std::exp(log_f[b++]);
      mus(s, j) = std::log(acc / count) - kEulerGamma;
    }
  }

  // Regression on the standard-normal draws z, whose covariance is known exactly:
  // mu = E + G z + r, so Cov(beta, mu) = root G' and Var(mu) = G G' + Var(r).
  const double denom = static_cast<double>(mc_samples - 1);
  const Eigen::RowVectorXd z_mean = zs.colwise().mean();
  const Eigen::RowVectorXd mu_mean = mus.colwise().mean();
  zs.rowwise() -= z_mean;
  mus.rowwise() -= mu_mean;
  const Eigen::MatrixXd szz = (zs.transpose() * zs) / denom;
  const Eigen::MatrixXd szm = (zs.transpose() * mus) / denom;
  const Eigen::LLT<Eigen::MatrixXd> zllt(szz);
  if (zllt.info() != Eigen::Success) throw NumericalError("Monte Carlo draws are degenerate");
  const Eigen::MatrixXd gain_t = zllt.solve(szm);  // G'
  Eigen::MatrixXd residual = (mus.transpose() * mus) / denom - szm.transpose() * gain_t;
  residual = (0.5 * (residual + residual.transpose())).eval();
  out.expectation = (mu_mean - z_mean * gain_t).transpose();
  out.variance = gain_t.transpose() * gain_t + residual;
  out.variance.diagonal().array() += kLogPeriodogramVariance;
  out.covariance = root * gain_t;
  return out;
}

Eigen::VectorXd stack_observations(std::span<const PeriodogramData> data) {
  Eigen::Index dim = 0;
  for (const auto& d : data) dim += static_cast<Eigen::Index>(d.log_periodogram.size());
  Eigen::VectorXd out(dim);
  Eigen::Index i = 0;
  for (const auto& d : data)
    for (double v : d.log_periodogram) out[i++] = v;
  return out;
}

namespace {

// Joint second-order belief over [beta; D] so that partial adjustments can be chained.
struct JointBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd variance;
};

JointBelief joint_from(const BeliefState& prior, const ForecastMoments& mo) {
  const Eigen::Index m = prior.mean.size();
  const Eigen::Index n = mo.expectation.size();
  JointBelief j;
  j.mean.resize(m + n);
  j.mean << prior.mean, mo.expectation;
  j.variance.resize(m + n, m + n);
  j.variance.topLeftCorner(m, m) = prior.variance;
  j.variance.topRightCorner(m, n) = mo.covariance;
  j.variance.bottomLeftCorner(n, m) = mo.covariance.transpose();
  j.variance.bottomRightCorner(n, n) = mo.variance;
  return j;
}

// Cholesky of Var(D); the ridge 1e-10 * trace / dim is added only when the plain factor
// fails or is ill-conditioned at that scale.
Eigen::LLT<Eigen::MatrixXd> factor_data_variance(Eigen::MatrixXd v, const std::function<std::string()>& label) {
  const Eigen::Index n = v.rows();
  const double ridge = n > 0 ? 1e-10 * v.trace() / static_cast<double>(n) : 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(v);
  if (llt.info() == Eigen::Success && n > 0) {
    const Eigen::VectorXd pivots = llt.matrixL().toDenseMatrix().diagonal();
    if (pivots.cwiseAbs2().minCoeff() > ridge) return llt;
  }
  v.diagonal().array() += ridge;
  llt.compute(v);
  if (llt.info() != Eigen::Success)
    throw NumericalError("Var(D) is singular after ridge for dataset '" + label() + "'");
  return llt;
}

void check_moments(const BeliefState& prior, const ForecastMoments& mo) {
  if (mo.covariance.rows() != prior.mean.size() || mo.covariance.cols() != mo.expectation.size() ||
      mo.variance.rows() != mo.expectation.size() || mo.variance.cols() != mo.expectation.size())
    throw std::invalid_argument("forecast moments do not match the prior");
}

std::string offending_segment(const ForecastMoments& mo) {
  for (const auto& seg : mo.segments) {
    Eigen::LLT<Eigen::MatrixXd> llt(mo.variance.block(seg.start, seg.start, seg.size, seg.size));
    if (llt.info() != Eigen::Success) return seg.series_id;
  }
  return "joint";
}

}  // namespace

BeliefState adjust(const BeliefState& prior, const ForecastMoments& mo, const Eigen::VectorXd& observed) {
  check_moments(prior, mo);
  if (observed.size() != mo.expectation.size())
    throw std::invalid_argument("observed vector does not match the forecast moments");
  const auto llt = factor_data_variance(mo.variance, [&mo] { return offending_segment(mo); });
  const Eigen::VectorXd innovation = llt.solve(observed - mo.expectation);
  const Eigen::MatrixXd gain_t = llt.solve(mo.covariance.transpose());  // Var(D)^-1 Cov(D, beta)
  Eigen::VectorXd mean = prior.mean + mo.covariance * innovation;
  Eigen::MatrixXd var = prior.variance - mo.covariance * gain_t;
  return make_belief(std::move(mean), std::move(var));
}

SequentialAdjustment sequential_adjust(const BeliefState& prior, const ForecastMoments& mo,
                                       std::span<const Eigen::VectorXd> observed,
                                       std::vector<std::size_t> order) {
  check_moments(prior, mo);
  if (observed.size() != mo.segments.size())
    throw std::invalid_argument("need one observed vector per dataset");
  if (order.empty()) {
    order.resize(mo.segments.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
  }
  const Eigen::Index m = prior.mean.size();
  JointBelief joint = joint_from(prior, mo);
  SequentialAdjustment out;
  for (std::size_t k : order) {
    if (k >= mo.segments.size()) throw std::invalid_argument("segment index out of range");
    const auto& seg = mo.segments[k];
    if (observed[k].size() != seg.size)
      throw std::invalid_argument("observed vector for '" + seg.series_id + "' has the wrong length");
    const Eigen::Index at = m + seg.start;
    const auto llt = factor_data_variance(joint.variance.block(at, at, seg.size, seg.size),
                                           [&seg] { return seg.series_id; });
    const Eigen::MatrixXd cross = joint.variance.middleCols(at, seg.size);  // Cov(Z, D_k)
    const Eigen::VectorXd innovation = llt.solve(observed[k] - joint.mean.segment(at, seg.size));
    joint.mean += cross * innovation;
    joint.variance -= cross * llt.solve(cross.transpose());
    joint.variance = (0.5 * (joint.variance + joint.variance.transpose())).eval();
    out.stages.push_back(make_belief(joint.mean.head(m), joint.variance.topLeftCorner(m, m)));
  }
  out.final_state = out.stages.empty() ? prior : out.stages.back();
  return out;
}

std::vector<double> standard_grid(std::size_t n) {
  if (n < 2) throw std::invalid_argument("standard grid needs at least 2 points");
  std::vector<double> grid(n);
  for (std::size_t j = 0; j < n; ++j) grid[j] = static_cast<double>(j) / (2.0 * static_cast<double>(n - 1));
  return grid;
}

std::vector<double> mean_log_spectrum(const BeliefState& state, std::span<const double> grid) {
  return LogSpectrum({state.mean.data(), state.mean.data() + state.mean.size()}).log_values(grid);
}

SpectrumSummary spectrum_summary(const BeliefState& state, std::span<const double> grid,
                                 bool exponentiate) {
  const boost::math::normal standard;
  const double z50 = boost::math::quantile(standard, 0.75);
  const double z90 = boost::math::quantile(standard, 0.95);
  const Eigen::MatrixXd psi = cosine_basis(grid, state.size());
  const Eigen::VectorXd mean = psi * state.mean;
  const Eigen::VectorXd var = (psi * state.variance).cwiseProduct(psi).rowwise().sum();
  SpectrumSummary s;
  s.omegas.assign(grid.begin(), grid.end());
  auto out = [exponentiate](double v) { return exponentiate ? std::exp(v) : v; };
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    const double sd = std::sqrt(std::max(var[i], 0.0));
    s.mean.push_back(out(mean[i]));
    s.sd.push_back(sd);
    s.lo50.push_back(out(mean[i] - z50 * sd));
    s.hi50.push_back(out(mean[i] + z50 * sd));
    s.lo90.push_back(out(mean[i] - z90 * sd));
    s.hi90.push_back(out(mean[i] + z90 * sd));
  }
  return s;
}

CurveGrid difference_grid(std::span<const BeliefState> states, std::span<const double> grid) {
  if (states.empty()) throw std::invalid_argument("difference grid needs at least one state");
  for (const auto& s : states)
    if (s.size() != states.front().size()) throw std::invalid_argument("belief states use different bases");
  std::vector<std::vector<double>> means;
  for (const auto& s : states) means.push_back(mean_log_spectrum(s, grid));
  CurveGrid out(states.size(), std::vector<std::vector<double>>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = 0; j < states.size(); ++j) {
      if (i == j) {
        out[i][j] = means[i];
        continue;
      }
      out[i][j].resize(grid.size());
      for (std::size_t g = 0; g < grid.size(); ++g) out[i][j][g] = means[i][g] - means[j][g];
    }
  return out;
}

BayesLinearEstimator::BayesLinearEstimator(BeliefState prior, std::vector<DataLayout> layouts,
                                           int mc_samples, std::uint64_t seed)
    : prior_(std::move(prior)),
      layouts_(std::move(layouts)),
      moments_(forecast_moments(prior_, layouts_, mc_samples, seed)) {}

namespace {

void check_layouts(std::span<const DataLayout> layouts, std::span<const PeriodogramData> data) {
  if (layouts.size() != data.size()) throw std::invalid_argument("dataset count does not match layouts");
  for (std::size_t i = 0; i < data.size(); ++i)
    if (data[i].layout.stride != layouts[i].stride ||
        data[i].layout.frequencies.size() != layouts[i].frequencies.size())
      throw std::invalid_argument("dataset '" + data[i].layout.series_id + "' does not match its layout");
}

}  // namespace

BeliefState BayesLinearEstimator::adjust(std::span<const PeriodogramData> data) const {
  check_layouts(layouts_, data);
  return mrspec::adjust(prior_, moments_, stack_observations(data));
}

SequentialAdjustment BayesLinearEstimator::adjust_sequentially(std::span<const PeriodogramData> data) const {
  check_layouts(layouts_, data);
  std::vector<Eigen::VectorXd> observed;
  for (const auto& d : data)
    observed.push_back(Eigen::Map<const Eigen::VectorXd>(d.log_periodogram.data(),
                                                         static_cast<Eigen::Index>(d.log_periodogram.size())));
  return sequential_adjust(prior_, moments_, observed);
}

}  // namespace mrspec
