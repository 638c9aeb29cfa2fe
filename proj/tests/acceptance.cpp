// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mrspec/aliasing.hpp"
#include "mrspec/bench.hpp"
#include "mrspec/blm.hpp"
#include "mrspec/cli.hpp"
#include "mrspec/io.hpp"
#include "mrspec/likelihood.hpp"
#include "mrspec/uncertainty.hpp"
#include "support.hpp"

using namespace mrspec;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double combined(double a, double b) { return std::sqrt(a * a + b * b); }

// 1. Even-index likelihood symmetry about a quarter.
Verdict symmetry_of_likelihood() {
  support::Gen g(1001);
  double worst = 0.0;
  for (int set = 0; set < 20; ++set) {
    std::vector<Observation> obs;
    long idx = 2L * g.integer(0, 5);
    for (int k = 0, n = g.integer(2, 60); k < n; ++k) {
      obs.push_back({idx, g.normal()});
      idx += 2L * g.integer(1, 3);
    }
    for (int k = 0; k < 50; ++k) {
      const double w = 0.005 + 0.49 * (k + 0.5) / 50.0;
      const double a = exact_loglik(ar2_model(w, 0.9), obs);
      const double b = exact_loglik(ar2_model(0.5 - w, 0.9), obs);
      worst = std::max(worst, std::abs(a - b));
    }
  }
  return {worst < 1e-8, fmt("max |l(w) - l(1/2-w)| = %.3g over 20 datasets x 50 w (tol 1e-8)", worst)};
}

struct Window {
  double value;
  double stderr_value;
};

Window extreme_in(const LikelihoodSurface& s, double lo, double hi, bool want_max) {
  Window best{want_max ? -INFINITY : INFINITY, 0.0};
  for (std::size_t g = 0; g < s.omegas.size(); ++g) {
    if (s.omegas[g] < lo || s.omegas[g] > hi || !s.valid[g]) continue;
    if (want_max ? s.loglik[g] > best.value : s.loglik[g] < best.value) best = {s.loglik[g], s.stderr_aligned[g]};
  }
  return best;
}

// 2. Spurious-mode suppression as dense points are added.
Verdict mode_suppression() {
  std::vector<Window> heights;
  std::string trace;
  for (int n_high = 0; n_high <= 20; n_high += 4) {
    ExperimentDesign d;
    d.n_low = 128;
    d.n_high = n_high;
    d.replicates = 200;
    d.seed = 2002;
    heights.push_back(extreme_in(mc_average_surface(d), 0.39, 0.44, true));
    trace += fmt(" %d:%.2f(%.2f)", n_high, heights.back().value, heights.back().stderr_value);
  }
  bool strict = true;
  for (std::size_t k = 1; k < heights.size(); ++k) strict = strict && heights[k].value < heights[k - 1].value;
  const double gap = heights.front().value - heights.back().value;
  const double se = combined(heights.front().stderr_value, heights.back().stderr_value);
  return {strict && gap >= 2.0 * se,
          fmt("spurious-mode height by N_high [value(se)]:%s; strictly decreasing=%s; drop %.2f vs 2se %.2f",
              trace.c_str(), strict ? "yes" : "no", gap, 2.0 * se)};
}

// 3. Valley deepening with the length of the coarse record.
Verdict mode_sharpening() {
  std::vector<Window> depths;
  std::string trace;
  for (int n_low : {60, 140, 260}) {
    ExperimentDesign d;
    d.n_low = n_low;
    d.n_high = 20;
    d.replicates = 200;
    d.seed = 3003;
    const auto s = mc_average_surface(d);
    const auto floor = extreme_in(s, 0.2, 0.3, false);
    depths.push_back({-floor.value, floor.stderr_value});
    trace += fmt(" %d:%.2f(%.2f)", n_low, depths.back().value, depths.back().stderr_value);
  }
  bool ok = true;
  for (std::size_t k = 1; k < depths.size(); ++k)
    ok = ok && depths[k].value >= depths[k - 1].value - 2.0 * combined(depths[k].stderr_value, depths[k - 1].stderr_value);
  return {ok, fmt("valley depth by N_low [value(se)]:%s; non-decreasing within 2se=%s", trace.c_str(), ok ? "yes" : "no")};
}

// 4. Discrepancy on hand-computed cases.
Verdict discrepancy_oracle() {
  const std::vector<double> f{0.3, -1.2, 0.0, 2.5, 0.7};
  std::vector<double> shifted(f);
  const double c = -0.37;
  for (double& v : shifted) v += c;
  const std::vector<double> a{1.0, -2.0, 0.0}, zero(3, 0.0);
  const double e0 = std::abs(discrepancy(f, f));
  const double e1 = std::abs(discrepancy(f, shifted) - c * c);
  const double e2 = std::abs(discrepancy(a, zero) - 5.0 / 3.0);
  const double worst = std::max({e0, e1, e2});
  return {worst < 1e-12, fmt("errors: identical %.1g, constant shift %.1g, (1,-2,0) vs 0 %.1g (tol 1e-12)", e0, e1, e2)};
}

// 5. Bench trends on a 12-cell subgrid.
Verdict bench_trends() {
  BenchDesign base;
  base.replicates = 100;
  base.seed = 5005;
  const std::vector<std::pair<int, int>> rows{{1, 16}, {1, 128}};
  std::vector<std::pair<int, int>> cols;
  for (int delta : {1, 6})
    for (int n : {16, 64, 128}) cols.emplace_back(delta, n);
  const auto t = table_sweep(rows, cols, base);
  auto cell = [&](std::size_t r, int delta, int n) -> const BenchResult& {
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (cols[c] == std::pair{delta, n}) return t.cells[r][c];
    throw std::logic_error("missing cell");
  };
  bool n_trend = true, delta_trend = true;
  std::string table;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    table += fmt(" [D1=(%d,%d)", rows[r].first, rows[r].second);
    for (std::size_t c = 0; c < cols.size(); ++c)
      table += fmt(" %d|%d:%.3f(%.3f)", cols[c].first, cols[c].second, t.cells[r][c].mean, t.cells[r][c].stderr_mean);
    table += "]";
    for (int delta : {1, 6}) {
      const int ns[] = {16, 64, 128};
      for (int k = 1; k < 3; ++k) {
        const auto& prev = cell(r, delta, ns[k - 1]);
        const auto& next = cell(r, delta, ns[k]);
        n_trend = n_trend && next.mean <= prev.mean + 2.0 * combined(prev.stderr_mean, next.stderr_mean);
      }
    }
    for (int n : {16, 64, 128}) {
      const auto& fine = cell(r, 1, n);
      const auto& coarse = cell(r, 6, n);
      delta_trend = delta_trend && coarse.mean >= fine.mean - 2.0 * combined(fine.stderr_mean, coarse.stderr_mean);
    }
  }
  const double small = cell(0, 1, 16).mean, large = cell(1, 1, 128).mean;
  const bool ratio = large * 1.5 <= small;
  return {n_trend && delta_trend && ratio,
          fmt("decreasing in N2=%s, increasing in delta2=%s, (1,16|1,16)/(1,128|1,128) = %.3f/%.3f = %.2f (need >= 1.5);",
              n_trend ? "yes" : "no", delta_trend ? "yes" : "no", small, large, small / large) +
              table};
}

// 6. Interpolation bias of the baselines versus the honest raw-data adjustment.
Verdict interpolation_bias() {
  int biased = 0, honest = 0, truth_high = 0;
  for (int s = 0; s < 50; ++s) {
    InterpolationScenario sc;
    sc.seed = static_cast<std::uint64_t>(s);
    const auto r = compare_interpolation(sc);
    if (power_fraction_below(r.ar_fit, r.omegas, 0.25) > 0.5 &&
        power_fraction_below(r.smoothed_periodogram, r.omegas, 0.25) > 0.5)
      ++biased;
    if (power_fraction_below(r.truth, r.omegas, 0.25) < 0.5) ++truth_high;
    const double w0 = sc.omega_peak;
    const auto at = spectrum_summary(r.history_only, std::vector<double>{w0, 0.5 - w0});
    if (std::abs(at.mean[0] - at.mean[1]) < 2.0 * std::max(at.sd[0], at.sd[1])) ++honest;
  }
  return {biased >= 45 && honest == 50,
          fmt("both baselines >50%% power below 0.25 in %d/50 seeds (need >= 45); truth above 0.25 in %d/50; "
              "stride-2 history bands honest at 0.35/0.15 in %d/50",
              biased, truth_high, honest)};
}

// 7. Kolmogorov prediction variance.
Verdict kolmogorov() {
  SpectralModel flat;
  flat.innovation_variance = 2.7;
  const double e_flat = std::abs(kolmogorov_variance(make_spectrum(flat), 4096) - 2.7);
  double worst = 0.0;
  for (double phi : {0.3, 0.6, 0.9}) {
    SpectralModel ar1;
    ar1.ar = {phi};
    worst = std::max(worst, std::abs(kolmogorov_variance(make_spectrum(ar1), 4096) - 1.0));
  }
  const double e_ar2 = std::abs(kolmogorov_variance(make_spectrum(ar2_model(1.0 / 12.0, 0.9)), 4096) - 1.0);
  return {e_flat < 1e-12 && worst < 1e-6 && e_ar2 < 1e-6,
          fmt("flat error %.2g; AR(1) worst error %.2g; AR(2) error %.2g (tol 1e-6)", e_flat, worst, e_ar2)};
}

double normal_moment(int k) {
  if (k % 2) return 0.0;
  double m = 1.0;
  for (int j = k - 1; j > 0; j -= 2) m *= j;
  return m;
}

// 8. Sparse-grid exactness and propagation.
Verdict quadrature() {
  const auto g = sparse_grid(4, 3);
  double wsum = 0.0;
  for (double w : g.weights) wsum += w;
  double worst = 0.0;
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; a + b <= 5; ++b)
      for (int c = 0; a + b + c <= 5; ++c)
        for (int d = 0; a + b + c + d <= 5; ++d) {
          double acc = 0.0;
          for (std::size_t i = 0; i < g.weights.size(); ++i) {
            const auto& x = g.nodes[i];
            acc += g.weights[i] * std::pow(x[0], a) * std::pow(x[1], b) * std::pow(x[2], c) * std::pow(x[3], d);
          }
          const double exact = normal_moment(a) * normal_moment(b) * normal_moment(c) * normal_moment(d);
          worst = std::max(worst, std::abs(acc - exact));
        }

  const auto path = simulate(ar2_model(1.0 / 12.0, 0.9), 128, 13);
  const auto data = log_periodogram(path, "x");
  const BayesLinearEstimator est(prior_belief(PriorSpec{}), {data.layout}, 2000, 14);
  const auto state = est.adjust(std::vector<PeriodogramData>{data});
  auto h = [](const LogSpectrum& l) { return kolmogorov_variance(l, 256); };
  const double quad = propagate(state, 4, 3, h);
  const auto pc = principal_components(state);
  std::mt19937_64 rng(808);
  std::normal_distribution<double> normal;
  double acc = 0.0;
  const int samples = 100000;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd beta = state.mean;
    for (int k = 0; k < 4; ++k) beta += std::sqrt(pc.eigenvalues[k]) * normal(rng) * pc.eigenvectors.col(k);
    acc += h(LogSpectrum({beta.data(), beta.data() + beta.size()}));
  }
  const double rel = std::abs(quad / (acc / samples) - 1.0);
  return {worst < 1e-9 && std::abs(wsum - 1.0) < 1e-12 && rel < 0.01,
          fmt("%zu nodes; worst monomial error (degree<=5) %.2g; weight sum error %.2g; propagate vs 1e5 MC rel diff %.2g (tol 0.01)",
              g.weights.size(), worst, std::abs(wsum - 1.0), rel)};
}

Eigen::MatrixXd random_psd(support::Gen& g, Eigen::Index n) {
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = g.normal();
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

// 9. Bayes linear identities.
Verdict bayes_linear() {
  support::Gen g(9009);
  double worst = 0.0;
  bool monotone = true;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index m = g.integer(1, 6), n1 = g.integer(1, 7), n2 = g.integer(1, 7), n = m + n1 + n2;
    const Eigen::MatrixXd joint = random_psd(g, n);
    Eigen::VectorXd mean(n), d(n1 + n2);
    for (Eigen::Index i = 0; i < n; ++i) mean[i] = g.normal();
    for (Eigen::Index i = 0; i < n1 + n2; ++i) d[i] = 2.0 * g.normal();
    const auto prior = make_belief(mean.head(m), joint.topLeftCorner(m, m));
    ForecastMoments mo;
    mo.expectation = mean.tail(n1 + n2);
    mo.variance = joint.bottomRightCorner(n1 + n2, n1 + n2);
    mo.covariance = joint.topRightCorner(m, n1 + n2);
    mo.segments = {{"first", 0, n1}, {"second", n1, n2}};
    const auto all = adjust(prior, mo, d);
    const std::vector<Eigen::VectorXd> parts{d.head(n1), d.tail(n2)};
    const auto seq = sequential_adjust(prior, mo, parts);
    worst = std::max({worst, rel_diff(seq.final_state.mean, all.mean), rel_diff(seq.final_state.variance, all.variance)});
    double previous = prior.variance.trace();
    for (const auto& s : seq.stages) {
      monotone = monotone && s.variance.trace() <= previous * (1 + 1e-12);
      previous = s.variance.trace();
    }
  }
  double conj = 0.0;
  for (double w : {0.1, 1.0, 3.7})
    for (double d : {-2.0, 0.5, 4.0}) {
      const BeliefState prior{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
      ForecastMoments mo;
      mo.expectation = Eigen::VectorXd::Zero(1);
      mo.variance = Eigen::MatrixXd::Constant(1, 1, 1.0 + w);
      mo.covariance = Eigen::MatrixXd::Identity(1, 1);
      mo.segments = {{"scalar", 0, 1}};
      const auto post = adjust(prior, mo, Eigen::VectorXd::Constant(1, d));
      conj = std::max({conj, std::abs(post.mean[0] - d / (1.0 + w)), std::abs(post.variance(0, 0) - w / (1.0 + w))});
    }
  return {worst < 1e-8 && monotone && conj < 1e-12,
          fmt("sequential vs joint worst rel diff %.2g (tol 1e-8); trace monotone=%s; conjugate error %.2g (tol 1e-12)",
              worst, monotone ? "yes" : "no", conj)};
}

// 10. Log-periodogram noise moments under simulated white noise.
Verdict periodogram_moments() {
  const SpectralModel wn;
  double sum = 0.0, sum2 = 0.0;
  std::size_t count = 0;
  for (int r = 0; r < 10000; ++r)
    for (double l : log_periodogram(simulate(wn, 64, derive_seed(1010, r, 0))).log_periodogram) {
      sum += l;
      sum2 += l * l;
      ++count;
    }
  const double mean = sum / count;
  const double var = sum2 / count - mean * mean;
  const double gamma = std::numbers::egamma, target = std::numbers::pi * std::numbers::pi / 6.0;
  return {std::abs(mean + gamma) < 0.02 && std::abs(var - target) < 0.05,
          fmt("mean %.4f (target %.4f +- 0.02), variance %.4f (target %.4f +- 0.05), %zu ordinates", mean, -gamma, var,
              target, count)};
}

// 11. Stride-2 uncertainty bands are symmetric about a quarter.
Verdict band_symmetry() {
  const auto grid = standard_grid(128);
  double worst = 0.0;
  for (std::uint64_t seed : {11, 12, 13, 14, 15}) {
    const auto path = simulate(ar2_model(1.0 / 12.0, 0.9), 256, seed);
    const auto data = log_periodogram(subsample(path, 2, 0), "coarse");
    const BayesLinearEstimator est(prior_belief(PriorSpec{}), {data.layout}, 2000, seed + 100);
    const auto s = spectrum_summary(est.adjust(std::vector<PeriodogramData>{data}), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const std::size_t j = grid.size() - 1 - i;
      worst = std::max(worst, std::abs(s.sd[i] - s.sd[j]) / std::max(s.sd[i], s.sd[j]));
    }
  }
  return {worst <= 0.05, fmt("worst relative |s(w) - s(1/2-w)| = %.2g over 5 datasets (tol 0.05)", worst)};
}

// 12. Every CLI command is deterministic.
int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"mrspec"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Verdict cli_determinism() {
  const auto root = fs::temp_directory_path() / "mrspec_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  io::write_series(root / "x.csv", simulate(ar2_model(0.2, 0.8), 96, 4));
  io::write_series(root / "coarse.csv", subsample(simulate(ar2_model(0.2, 0.8), 128, 5), 2, 0));
  const io::json model = io::to_json(ar2_model(1.0 / 12.0, 0.9));
  const std::map<std::string, io::json> configs{
      {"simulate", {{"model", model}, {"n", 200}, {"seed", 1}}},
      {"spectrum", {{"model", model}, {"n_omega", 64}}},
      {"loglik-surface", {{"n_low", 32}, {"n_high_sweep", {0, 8}}, {"replicates", 4}, {"grid_size", 41}, {"seed", 2}}},
      {"estimate", {{"series", {{{"csv", "x.csv"}}, {{"csv", "coarse.csv"}}}}, {"mc_samples", 800}, {"seed", 3}}},
      {"bench", {{"d1", {{1, 16}}}, {"d2", {{1, 16}, {3, 16}}}, {"replicates", 4}, {"mc_samples", 500}, {"seed", 4}}},
      {"compare-interp", {{"seed", 5}, {"mc_samples", 500}}},
      {"quadrature", {{"dim", 4}, {"level", 3}}},
      {"kolmogorov", {{"model", model}, {"quad_points", 1024}}},
  };
  std::vector<std::string> failures;
  std::size_t compared = 0;
  auto run_twice = [&](const std::string& command, const io::json& config) {
    const auto cfg = root / (command + ".json");
    io::write_text(cfg, config.dump(2));
    for (const char* tag : {"a", "b"})
      if (cli({command, "--config", cfg.string(), "--out", (root / command / tag).string()}) != 0) {
        failures.push_back(command + " (exit code)");
        return;
      }
    bool any = false;
    for (const auto& entry : fs::directory_iterator(root / command / "a")) {
      if (entry.path().extension() != ".csv") continue;
      any = true;
      ++compared;
      if (io::read_text(entry.path()) != io::read_text(root / command / "b" / entry.path().filename()))
        failures.push_back(command + "/" + entry.path().filename().string());
    }
    if (!any) failures.push_back(command + " (no csv)");
  };
  for (const auto& [command, config] : configs) run_twice(command, config);
  run_twice("pc-fan", {{"belief", "estimate/a/belief.json"}, {"n_omega", 32}});
  run_twice("diff-grid", {{"beliefs", {"estimate/a/belief.json", "estimate/b/belief.json"}}, {"n_omega", 32}});
  std::string list;
  for (const auto& f : failures) list += " " + f;
  return {failures.empty(), fmt("10 commands, %zu CSV files compared byte-for-byte; mismatches:%s", compared,
                                failures.empty() ? " none" : list.c_str())};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "stride-2 likelihood symmetry", 10, symmetry_of_likelihood},
      {2, "spurious mode suppression", 600, mode_suppression},
      {3, "mode sharpening", 600, mode_sharpening},
      {4, "discrepancy oracle", 1, discrepancy_oracle},
      {5, "bench trends", 1800, bench_trends},
      {6, "interpolation bias", 600, interpolation_bias},
      {7, "Kolmogorov variance", 1, kolmogorov},
      {8, "sparse-grid quadrature", 60, quadrature},
      {9, "Bayes linear identities", 60, bayes_linear},
      {10, "log-periodogram moments", 600, periodogram_moments},
      {11, "symmetric bands", 60, band_symmetry},
      {12, "CLI determinism", 600, cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool pass = v.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s criterion %d (%s): %s [%.1f s, budget %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), seconds, c.budget_seconds, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
