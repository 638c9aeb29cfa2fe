#include "mrspec/aliasing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mrspec {

namespace {

void check_delta(int delta) {
  if (delta < 1) throw std::invalid_argument("stride delta must be at least 1");
}

void check_band(std::span<const double> nus) {
  for (double nu : nus)
    if (!(nu >= 0.0 && nu <= 0.5)) throw std::invalid_argument("frequencies must lie in [0, 1/2]");
}

}  // namespace

double reduce_frequency(double omega) {
  double r = omega - std::floor(omega);
  if (r > 0.5) r = 1.0 - r;
  return r;
}

Spectrum folded(const Spectrum& f, int delta) {
  check_delta(delta);
  return Spectrum([f, delta](std::span<const double> nus, std::span<double> out) {
    const auto d = static_cast<std::size_t>(delta);
    std::vector<double> branches(nus.size() * d);
    for (std::size_t i = 0; i < nus.size(); ++i)
      for (std::size_t k = 0; k < d; ++k)
        branches[i * d + k] = reduce_frequency((nus[i] + static_cast<double>(k)) / delta);
    const auto values = f(branches);
    for (std::size_t i = 0; i < nus.size(); ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += values[i * d + k];
      out[i] = acc / delta;
    }
  });
}

std::vector<double> fold(const Spectrum& f, int delta, std::span<const double> nus) {
  check_band(nus);
  return folded(f, delta)(nus);
}

std::vector<double> aliased_partners(double omega, int delta) {
  check_delta(delta);
  if (!(omega >= 0.0 && omega <= 0.5)) throw std::invalid_argument("omega must lie in [0, 1/2]");
  const double nu = reduce_frequency(delta * omega);
  std::vector<double> out;
  for (int k = 0; k < delta; ++k) out.push_back(reduce_frequency((nu + k) / delta));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
            out.end());
  return out;
}

}  // namespace mrspec
