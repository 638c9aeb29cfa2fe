#pragma once

// Spectra of subsampled processes. Keeping every delta-th value of a process
// with spectrum f gives a process (in coarse-rate units) with spectrum
//   f_delta(nu) = (1/delta) * sum_{k=0}^{delta-1} f_ext((nu + k) / delta),
// where f_ext is the even 1-periodic extension of f. Its autocovariance at
// lag h is the source's autocovariance at lag delta * h.

#include <span>
#include <vector>

#include "mrspec/process.hpp"

namespace mrspec {

/// Maps any real frequency onto [0, 1/2] using evenness and unit period.
double reduce_frequency(double omega);

/// Folded spectrum as an evaluator; delta == 1 returns an equivalent of f.
Spectrum folded(const Spectrum& f, int delta);

std::vector<double> fold(const Spectrum& f, int delta, std::span<const double> nus);

/// Source frequencies in [0, 1/2] that stride-delta sampling cannot tell apart
/// from omega. Sorted ascending, duplicates within 1e-12 removed.
std::vector<double> aliased_partners(double omega, int delta);

}  // namespace mrspec
