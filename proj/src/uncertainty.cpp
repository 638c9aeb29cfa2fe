#include "mrspec/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "mrspec/errors.hpp"
#include "mrspec/kernels.hpp"

namespace mrspec {

PCDecomposition principal_components(const BeliefState& state) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(state.variance);
  const Eigen::Index m = state.variance.rows();
  PCDecomposition pc{Eigen::VectorXd(m), Eigen::MatrixXd(m, m), state};
  for (Eigen::Index k = 0; k < m; ++k) {
    // SelfAdjointEigenSolver sorts ascending.
    const Eigen::Index src = m - 1 - k;
    pc.eigenvalues[k] = std::max(eig.eigenvalues()[src], 0.0);
    Eigen::VectorXd u = eig.eigenvectors().col(src);
    Eigen::Index big = 0;
    u.cwiseAbs().maxCoeff(&big);
    if (u[big] < 0.0) u = -u;
    pc.eigenvectors.col(k) = u;
  }
  return pc;
}

std::vector<double> decile_quantiles() {
  const boost::math::normal standard;
  std::vector<double> q;
  for (int i = 1; i <= 9; ++i) q.push_back(i == 5 ? 0.0 : boost::math::quantile(standard, i / 10.0));
  return q;
}

PcFan pc_fan(const BeliefState& state, std::size_t component, std::span<const double> grid) {
  const auto pc = principal_components(state);
  if (component >= state.size()) throw std::invalid_argument("principal component index out of range");
  const auto k = static_cast<Eigen::Index>(component);
  const double lambda = pc.eigenvalues[k];
  if (lambda < 1e-14 * pc.eigenvalues[0]) throw NumericalError("component numerically null");
  PcFan fan;
  fan.component = component;
  fan.loading = std::sqrt(lambda);
  fan.quantiles = decile_quantiles();
  for (double q : fan.quantiles) {
    const Eigen::VectorXd beta = state.mean + q * fan.loading * pc.eigenvectors.col(k);
    fan.curves.push_back(LogSpectrum({beta.data(), beta.data() + beta.size()}).values(grid));
  }
  return fan;
}

QuadratureGrid gauss_hermite(int points) {
  if (points < 1) throw std::invalid_argument("Gauss-Hermite rule needs at least one point");
  // Golub-Welsch on the probabilists' Hermite recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
  for (int k = 1; k < points; ++k) jacobi(k - 1, k) = jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  std::vector<double> x(static_cast<std::size_t>(points)), w(x.size());
  for (int i = 0; i < points; ++i) {
    x[static_cast<std::size_t>(i)] = eig.eigenvalues()[i];
    const double v = eig.eigenvectors()(0, i);
    w[static_cast<std::size_t>(i)] = v * v;
  }
  // Enforce exact mirror symmetry and unit mass.
  for (int i = 0; i < points / 2; ++i) {
    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(points - 1 - i);
    const double node = 0.5 * (x[b] - x[a]);
    const double weight = 0.5 * (w[a] + w[b]);
    x[a] = -node;
    x[b] = node;
    w[a] = w[b] = weight;
  }
  if (points % 2 == 1) x[static_cast<std::size_t>(points / 2)] = 0.0;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  QuadratureGrid g{1, points, {}, {}};
  for (std::size_t i = 0; i < x.size(); ++i) {
    g.nodes.push_back({x[i]});
    g.weights.push_back(w[i] / total);
  }
  return g;
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Calls visit(levels) for every multi-index with entries >= 1 and the given sum.
template <typename Visit>
void compositions(int dimension, int total, std::vector<int>& current, Visit&& visit) {
  const int slot = static_cast<int>(current.size());
  if (slot == dimension - 1) {
    current.push_back(total);
    visit(current);
    current.pop_back();
    return;
  }
  for (int v = 1; v <= total - (dimension - slot - 1); ++v) {
    current.push_back(v);
    compositions(dimension, total - v, current, visit);
    current.pop_back();
  }
}

}  // namespace

QuadratureGrid sparse_grid(int dimension, int level) {
  if (dimension < 1 || dimension > 10 || level < 1 || level > 5)
    throw std::invalid_argument("sparse grid supports 1 <= d <= 10 and 1 <= level <= 5 (got d=" +
                                std::to_string(dimension) + ", level=" + std::to_string(level) + ")");
  std::vector<QuadratureGrid> rules;
  for (int p = 1; p <= level; ++p) rules.push_back(gauss_hermite(p));

  // Node coordinates are rounded to 1e-12 for merging duplicates across tensor products.
  std::map<std::vector<long long>, std::pair<std::vector<double>, double>> merged;
  const int q = dimension + level - 1;
  for (int total = std::max(dimension, q - dimension + 1); total <= q; ++total) {
    const double coeff = ((q - total) % 2 == 0 ? 1.0 : -1.0) * binomial(dimension - 1, q - total);
    std::vector<int> current;
    compositions(dimension, total, current, [&](const std::vector<int>& levels) {
      std::vector<std::size_t> pos(levels.size(), 0);
      while (true) {
        std::vector<double> node(levels.size());
        std::vector<long long> key(levels.size());
        double weight = coeff;
        for (std::size_t k = 0; k < levels.size(); ++k) {
          const auto& rule = rules[static_cast<std::size_t>(levels[k] - 1)];
          node[k] = rule.nodes[pos[k]][0];
          weight *= rule.weights[pos[k]];
          key[k] = std::llround(node[k] * 1e12);
        }
        auto [it, inserted] = merged.try_emplace(key, node, 0.0);
        it->second.second += weight;
        std::size_t k = 0;
        for (; k < levels.size(); ++k) {
          if (++pos[k] < static_cast<std::size_t>(levels[k])) break;
          pos[k] = 0;
        }
        if (k == levels.size()) break;
      }
    });
  }
  QuadratureGrid g{dimension, level, {}, {}};
  for (auto& [key, entry] : merged) {
    if (entry.second == 0.0) continue;
    g.nodes.push_back(std::move(entry.first));
    g.weights.push_back(entry.second);
  }
  return g;
}

double propagate(const BeliefState& state, int dimension, int level,
                 const std::function<double(const LogSpectrum&)>& functional) {
  if (dimension < 1 || static_cast<std::size_t>(dimension) > state.size())
    throw std::invalid_argument("propagation dimension must lie in 1..basis size");
  const auto pc = principal_components(state);
  const auto grid = sparse_grid(dimension, level);
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    Eigen::VectorXd beta = state.mean;
    for (int k = 0; k < dimension; ++k)
      beta += std::sqrt(pc.eigenvalues[k]) * grid.nodes[i][static_cast<std::size_t>(k)] * pc.eigenvectors.col(k);
    double value;
    try {
      value = functional(LogSpectrum({beta.data(), beta.data() + beta.size()}));
    } catch (const std::exception& e) {
      throw NumericalError("functional failed at quadrature node " + std::to_string(i) + ": " + e.what());
    }
    if (!std::isfinite(value))
      throw NumericalError("functional is not finite at quadrature node " + std::to_string(i));
    acc += grid.weights[i] * value;
  }
  return acc;
}

double kolmogorov_variance(const Spectrum& f, int quad_points) {
  if (quad_points < kMinQuadPoints)
    throw std::invalid_argument("quad_points must be at least " + std::to_string(kMinQuadPoints));
  const auto rule = simpson_rule(quad_points + quad_points % 2);
  const auto values = f(rule.nodes);
  // Integrate log(f / f(0)) so a flat spectrum comes back exactly.
  const double anchor = values.front();
  std::vector<double> rel(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    rel[i] = std::log(values[i] / anchor);
    if (!std::isfinite(rel[i]) || !(values[i] > 0.0))
      throw NumericalError("log spectrum is not finite at omega=" + std::to_string(rule.nodes[i]));
  }
  return anchor * std::exp(2.0 * kernels::dot(rule.weights, rel));
}

double kolmogorov_variance(const LogSpectrum& log_spectrum, int quad_points) {
  return kolmogorov_variance(make_spectrum(log_spectrum), quad_points);
}

}  // namespace mrspec
