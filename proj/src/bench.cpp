#include "mrspec/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mrspec/errors.hpp"
#include "mrspec/kernels.hpp"

namespace mrspec {

double discrepancy(std::span<const double> true_log, std::span<const double> est_log) {
  if (true_log.size() != est_log.size() || true_log.empty())
    throw std::invalid_argument("discrepancy: curves are not on the same grid");
  double acc = 0.0;
  for (std::size_t i = 0; i < true_log.size(); ++i) {
    const double d = true_log[i] - est_log[i];
    acc += d * d;
  }
  return acc / static_cast<double>(true_log.size());
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream) {
  // splitmix64 finalizer over a combined key
  std::uint64_t z = seed ^ (replicate * 0x9E3779B97F4A7C15ULL) ^ (stream * 0xD1B54A32D192ED03ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

LogSpectrum random_process(const PriorSpec& prior, std::uint64_t seed) {
  const auto belief = prior_belief(prior);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> beta(prior.basis_size);
  for (std::size_t m = 0; m < beta.size(); ++m) {
    const auto i = static_cast<Eigen::Index>(m);
    beta[m] = belief.mean[i] + std::sqrt(belief.variance(i, i)) * normal(rng);
  }
  return LogSpectrum(std::move(beta));
}

void validate(const BenchDesign& d) {
  if (d.delta1 < 1 || d.delta2 < 1) throw std::invalid_argument("bench strides must be at least 1");
  if (d.n1 < 8 || d.n2 < 8) throw std::invalid_argument("bench series need at least 8 observations");
  if (d.replicates < 1) throw std::invalid_argument("replicates must be at least 1");
  if (d.n_omega < 2) throw std::invalid_argument("n_omega must be at least 2");
  if (d.estimator != "blm" && d.estimator != "prior")
    throw std::invalid_argument("unknown estimator '" + d.estimator + "'");
}

std::pair<std::vector<long>, std::vector<long>> bench_indices(const BenchDesign& d) {
  std::vector<long> first, second;
  for (int k = 0; k < d.n1; ++k) first.push_back(static_cast<long>(k) * d.delta1);
  const long start = static_cast<long>(d.n1) * d.delta1;
  for (int k = 0; k < d.n2; ++k) second.push_back(start + static_cast<long>(k) * d.delta2);
  return {first, second};
}

BenchResult run_bench(const BenchDesign& d) {
  validate(d);
  const auto [first, second] = bench_indices(d);
  std::vector<long> all(first);
  all.insert(all.end(), second.begin(), second.end());
  const auto grid = standard_grid(d.n_omega);
  const auto prior = prior_belief(d.prior);

  std::vector<DataLayout> layouts{layout_for("D1", d.delta1, first.size()),
                                  layout_for("D2", d.delta2, second.size())};
  std::optional<BayesLinearEstimator> estimator;
  if (d.estimator == "blm")
    estimator.emplace(prior, layouts, d.mc_samples, derive_seed(d.seed, 0, 99));
  const auto prior_curve = mean_log_spectrum(prior, grid);

  BenchResult res;
  for (int r = 0; r < d.replicates; ++r) {
    const auto rep = static_cast<std::uint64_t>(r);
    try {
      const LogSpectrum truth = random_process(d.prior, derive_seed(d.seed, rep, 1));
      const auto values = simulate_at(make_spectrum(truth), all, derive_seed(d.seed, rep, 2));
      std::vector<double> estimate;
      if (estimator) {
        SampledSeries s1{{values.begin(), values.begin() + static_cast<long>(first.size())}, d.delta1, 0, 1.0};
        SampledSeries s2{{values.begin() + static_cast<long>(first.size()), values.end()}, d.delta2, 0, 1.0};
        const std::vector<PeriodogramData> data{log_periodogram(s1, "D1"), log_periodogram(s2, "D2")};
        estimate = mean_log_spectrum(estimator->adjust(data), grid);
      } else {
        estimate = prior_curve;
      }
      res.scores.push_back(discrepancy(truth.log_values(grid), estimate));
      ++res.successes;
    } catch (const NumericalError&) {
      res.scores.push_back(std::nan(""));
      ++res.failures;
    }
  }
  double sum = 0.0;
  for (double s : res.scores)
    if (!std::isnan(s)) sum += s;
  if (res.successes > 0) res.mean = sum / res.successes;
  if (res.successes > 1) {
    double ss = 0.0;
    for (double s : res.scores)
      if (!std::isnan(s)) ss += (s - res.mean) * (s - res.mean);
    res.stderr_mean = std::sqrt(ss / (res.successes - 1) / res.successes);
  }
  return res;
}

BenchTable table_sweep(std::span<const std::pair<int, int>> rows,
                       std::span<const std::pair<int, int>> columns, const BenchDesign& base) {
  if (rows.empty() || columns.empty()) throw std::invalid_argument("table sweep needs non-empty grids");
  BenchTable table;
  table.rows.assign(rows.begin(), rows.end());
  table.columns.assign(columns.begin(), columns.end());
  for (const auto& [d1, n1] : rows) {
    std::vector<BenchResult> line;
    for (const auto& [d2, n2] : columns) {
      BenchDesign cell = base;
      cell.delta1 = d1;
      cell.n1 = n1;
      cell.delta2 = d2;
      cell.n2 = n2;
      line.push_back(run_bench(cell));
    }
    table.cells.push_back(std::move(line));
  }
  return table;
}

namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string table_csv(const BenchTable& table, bool standard_errors) {
  std::ostringstream out;
  out << "d1_delta,d1_n";
  for (const auto& [d2, n2] : table.columns) out << ",d2_delta" << d2 << "_n" << n2;
  out << '\n';
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    out << table.rows[i].first << ',' << table.rows[i].second;
    for (const auto& cell : table.cells[i]) {
      out << ',';
      if (cell.successes == 0)
        out << "NA";
      else
        out << number(standard_errors ? cell.stderr_mean : cell.mean);
    }
    out << '\n';
  }
  return out.str();
}

SampledSeries spline_fill(std::span<const Observation> obs) {
  const std::size_t n = obs.size();
  if (n < 4) throw std::invalid_argument("spline interpolation needs at least 4 points");
  for (std::size_t i = 1; i < n; ++i)
    if (!(obs[i].index > obs[i - 1].index)) throw std::invalid_argument("spline knots must be strictly increasing");

  // Natural spline: second derivatives M with M_0 = M_{n-1} = 0 (tridiagonal solve).
  std::vector<double> h(n - 1), m(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = static_cast<double>(obs[i + 1].index - obs[i].index);
  const std::size_t k = n - 2;
  std::vector<double> diag(k), upper(k), rhs(k);
  for (std::size_t i = 0; i < k; ++i) {
    diag[i] = 2.0 * (h[i] + h[i + 1]);
    upper[i] = h[i + 1];
    rhs[i] = 6.0 * ((obs[i + 2].value - obs[i + 1].value) / h[i + 1] -
                    (obs[i + 1].value - obs[i].value) / h[i]);
  }
  for (std::size_t i = 1; i < k; ++i) {
    const double w = h[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (std::size_t i = k; i-- > 0;) m[i + 1] = (rhs[i] - (i + 1 < k ? upper[i] * m[i + 2] : 0.0)) / diag[i];

  SampledSeries out;
  out.offset = static_cast<int>(obs.front().index);
  std::size_t seg = 0;
  for (long t = obs.front().index; t <= obs.back().index; ++t) {
    while (seg + 2 < n && t > obs[seg + 1].index) ++seg;
    if (t == obs[seg].index) {
      out.values.push_back(obs[seg].value);
      continue;
    }
    if (t == obs[seg + 1].index) {
      out.values.push_back(obs[seg + 1].value);
      continue;
    }
    const double a = static_cast<double>(obs[seg + 1].index - t);
    const double b = static_cast<double>(t - obs[seg].index);
    const double hh = h[seg];
    out.values.push_back(m[seg] * a * a * a / (6.0 * hh) + m[seg + 1] * b * b * b / (6.0 * hh) +
                         (obs[seg].value / hh - m[seg] * hh / 6.0) * a +
                         (obs[seg + 1].value / hh - m[seg + 1] * hh / 6.0) * b);
  }
  return out;
}

SampledSeries spline_interpolate(const SampledSeries& series) {
  if (series.stride == 1) return series;
  std::vector<Observation> obs;
  for (std::size_t k = 0; k < series.size(); ++k) obs.push_back({series.base_index(k), series.values[k]});
  auto out = spline_fill(obs);
  out.base_step = series.base_step;
  return out;
}

namespace {

std::vector<double> sample_autocovariance(std::span<const double> x, std::size_t max_lag) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  std::vector<double> c(max_lag + 1, 0.0);
  for (std::size_t h = 0; h <= max_lag; ++h) {
    double acc = 0.0;
    for (std::size_t t = 0; t + h < x.size(); ++t) acc += (x[t] - mean) * (x[t + h] - mean);
    c[h] = acc / n;
  }
  return c;
}

}  // namespace

ArFit fit_ar_aic(std::span<const double> values, std::size_t max_order) {
  if (values.size() < 2) throw std::invalid_argument("AR fit needs at least 2 observations");
  const auto c = sample_autocovariance(values, max_order);
  if (!(c[0] > 0.0)) throw std::invalid_argument("AR fit: series is constant");
  const double n = static_cast<double>(values.size());

  // Levinson-Durbin, keeping the best AIC seen so far.
  std::vector<double> phi;
  double v = c[0];
  ArFit best{{}, v, 0};
  double best_aic = n * std::log(v);
  for (std::size_t p = 1; p <= max_order; ++p) {
    double acc = c[p];
    for (std::size_t j = 1; j < p; ++j) acc -= phi[j - 1] * c[p - j];
    const double k = acc / v;
    std::vector<double> next(p);
    for (std::size_t j = 1; j < p; ++j) next[j - 1] = phi[j - 1] - k * phi[p - j - 1];
    next[p - 1] = k;
    phi = std::move(next);
    v *= (1.0 - k * k);
    if (!(v > 0.0)) break;
    const double aic = n * std::log(v) + 2.0 * static_cast<double>(p);
    if (aic < best_aic) {
      best_aic = aic;
      best = {phi, v, p};
    }
  }
  return best;
}

BaselineSpectra baseline_spectra(const SampledSeries& dense, std::size_t n_omega) {
  const std::size_t n = dense.size();
  if (dense.stride != 1) throw std::invalid_argument("baseline spectra need a dense series");
  if (n < 32) throw std::invalid_argument("baseline spectra need at least 32 observations");
  const auto& x = dense.values;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == mean; }))
    throw std::invalid_argument("baseline spectra: series is constant");

  BaselineSpectra out;
  out.omegas = standard_grid(n_omega);

  const ArFit fit = fit_ar_aic(x, std::min<std::size_t>(20, n / 4));
  out.ar_order = fit.order;
  SpectralModel ar;
  ar.ar = fit.coefficients;
  ar.innovation_variance = fit.innovation_variance;
  // Yule-Walker estimates are always causal, so the general evaluator applies.
  for (double f : spectral_density(ar, out.omegas)) out.ar_log_spectrum.push_back(std::log(f));

  // Raw periodogram at j/n, j = 0..n-1; the zero-frequency ordinate (killed by
  // centring) is replaced by the average of its neighbours.
  std::vector<double> centred(x);
  for (double& v : centred) v -= mean;
  std::vector<double> freqs(n);
  for (std::size_t j = 0; j < n; ++j) freqs[j] = static_cast<double>(j) / static_cast<double>(n);
  std::vector<double> pgram(n);
  kernels::dft_power(centred, freqs, pgram);
  for (double& p : pgram) p /= static_cast<double>(n);
  pgram[0] = 0.5 * (pgram[1] + pgram[n - 1]);

  // Modified Daniell kernel, span ceil(sqrt(n)) forced odd, applied circularly.
  auto span = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  if (span % 2 == 0) ++span;
  const std::size_t half = span / 2;
  std::vector<double> smooth(n / 2 + 1, 0.0);
  for (std::size_t j = 0; j < smooth.size(); ++j) {
    if (half == 0) {
      smooth[j] = pgram[j];
      continue;
    }
    double acc = 0.0;
    for (long o = -static_cast<long>(half); o <= static_cast<long>(half); ++o) {
      const double w = (static_cast<std::size_t>(std::abs(o)) == half ? 0.25 : 0.5) / static_cast<double>(half);
      const long idx = ((static_cast<long>(j) + o) % static_cast<long>(n) + static_cast<long>(n)) % static_cast<long>(n);
      acc += w * pgram[static_cast<std::size_t>(idx)];
    }
    smooth[j] = acc;
  }
  // Linear interpolation from the Fourier frequencies onto the grid.
  for (double w : out.omegas) {
    const double pos = w * static_cast<double>(n);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    double value;
    if (lo + 1 >= smooth.size()) {
      value = smooth.back();
    } else {
      const double t = pos - static_cast<double>(lo);
      value = (1.0 - t) * smooth[lo] + t * smooth[lo + 1];
    }
    out.smoothed_log_periodogram.push_back(std::log(value));
  }
  return out;
}

double power_fraction_below(std::span<const double> log_spectrum, std::span<const double> grid,
                            double cutoff) {
  if (log_spectrum.size() != grid.size() || grid.size() < 2)
    throw std::invalid_argument("power fraction: curve and grid disagree");
  double below = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double piece = 0.5 * (std::exp(log_spectrum[i]) + std::exp(log_spectrum[i + 1])) * (grid[i + 1] - grid[i]);
    total += piece;
    if (grid[i + 1] <= cutoff) {
      below += piece;
    } else if (grid[i] < cutoff) {
      below += piece * (cutoff - grid[i]) / (grid[i + 1] - grid[i]);
    }
  }
  return below / total;
}

InterpolationComparison compare_interpolation(const InterpolationScenario& sc) {
  if (sc.length < 32) throw std::invalid_argument("scenario length must be at least 32");
  if (sc.history_stride < 1) throw std::invalid_argument("history stride must be at least 1");
  if (!(sc.history_fraction > 0.0 && sc.history_fraction < 1.0))
    throw std::invalid_argument("history fraction must lie in (0, 1)");
  const int history = static_cast<int>(std::lround(sc.length * sc.history_fraction));
  const int history_count = (history + sc.history_stride - 1) / sc.history_stride;
  const int recent_count = sc.length - history;
  if (history_count < 8 || recent_count < 8)
    throw std::invalid_argument("scenario leaves fewer than 8 observations in a segment");

  const SpectralModel model = ar2_model(sc.omega_peak, sc.modulus);
  InterpolationComparison out;
  out.full_path = simulate(model, sc.length, derive_seed(sc.seed, 0, 1)).values;

  SampledSeries hist{{}, sc.history_stride, 0, 1.0};
  SampledSeries recent{{}, 1, history, 1.0};
  for (int t = 0; t < history; t += sc.history_stride) {
    hist.values.push_back(out.full_path[static_cast<std::size_t>(t)]);
    out.observed.push_back({t, out.full_path[static_cast<std::size_t>(t)]});
  }
  for (int t = history; t < sc.length; ++t) {
    recent.values.push_back(out.full_path[static_cast<std::size_t>(t)]);
    out.observed.push_back({t, out.full_path[static_cast<std::size_t>(t)]});
  }
  out.interpolated = spline_fill(out.observed);

  out.omegas = standard_grid(sc.n_omega);
  for (double f : spectral_density(model, out.omegas)) out.truth.push_back(std::log(f));

  const auto prior = prior_belief(sc.prior);
  const std::vector<PeriodogramData> raw_data{log_periodogram(hist, "history"), log_periodogram(recent, "recent")};
  const BayesLinearEstimator raw(prior, {raw_data[0].layout, raw_data[1].layout}, sc.mc_samples,
                                 derive_seed(sc.seed, 0, 2));
  out.raw = raw.adjust(raw_data);
  out.blm_raw = mean_log_spectrum(out.raw, out.omegas);

  const BayesLinearEstimator hist_only(prior, {raw_data[0].layout}, sc.mc_samples, derive_seed(sc.seed, 0, 3));
  out.history_only = hist_only.adjust(std::span(raw_data).first(1));

  const std::vector<PeriodogramData> interp_data{log_periodogram(out.interpolated, "interpolated")};
  const BayesLinearEstimator interp(prior, {interp_data[0].layout}, sc.mc_samples, derive_seed(sc.seed, 0, 4));
  out.blm_interpolated = mean_log_spectrum(interp.adjust(interp_data), out.omegas);

  const auto baselines = baseline_spectra(out.interpolated, sc.n_omega);
  out.ar_fit = baselines.ar_log_spectrum;
  out.smoothed_periodogram = baselines.smoothed_log_periodogram;
  out.ar_order = baselines.ar_order;
  return out;
}

}  // namespace mrspec
