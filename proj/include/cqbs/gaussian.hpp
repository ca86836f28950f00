#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "cqbs/fock.hpp"
#include "cqbs/interferometer.hpp"
#include "cqbs/sampler.hpp"

namespace cqbs::gaussian {

struct TwoModeSqueezeOp {
  int lower_mode = 0;
  double r = 0.0;
  double phase = 0.0;
};

// Initial-state recipe: two-mode squeezers on adjacent pairs act on vacuum
// first, then per-mode displacements.  The ordering is a convention; the two
// operations do not commute, so the recipe can flip it.
struct GaussianPrep {
  std::vector<std::complex<double>> displacements;
  std::vector<TwoModeSqueezeOp> squeezes;
  bool displace_first = false;
};

// Number-basis displacement amplitudes <n|D(alpha)|m> in closed form
// (associated Laguerre); column zero is the coherent ladder
// alpha^n e^{-|alpha|^2/2}/sqrt(n!).  Unitary only in the infinite limit, so
// truncation shows up as lost norm rather than wrong amplitudes.
Eigen::MatrixXcd displacement_matrix(std::complex<double> alpha, int dim);

// Vacuum -> squeezers -> displacements on a per-mode-cutoff basis.  Throws
// when the cutoff cannot hold a squeeze ladder or when more than 1e-6 of
// norm is lost; the surviving sub-1e-6 deficit is renormalized away.
fock::State prepare_gaussian(const GaussianPrep& prep, fock::BasisPtr basis);

// Sum over n of (-1)^n P(mode holds n photons).
double parity_expectation(const fock::State& state, int mode);

// Expected total photon number across all modes.
double mean_photon_number(const fock::State& state);

// prepare -> element-by-element state evolution at the given cutoff ->
// photon-number distribution -> readout.  Readout failures (swap
// post-selected bunching, exhausted or unlucky counter probes) drop the
// pattern and the remainder is renormalized; the counter is the default
// since these inputs populate n >= 2.  photon_count is -1: totals mix.
sampler::OutputDistribution gaussian_pipeline(
    const GaussianPrep& prep, const interferometer::ElementList& elements,
    const sampler::ReadoutModel& readout = sampler::QndCounter{}, int cutoff = 8);

}  // namespace cqbs::gaussian
