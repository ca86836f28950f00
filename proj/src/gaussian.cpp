#include "cqbs/gaussian.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include "cqbs/dynamics.hpp"
#include "cqbs/errors.hpp"

namespace cqbs::gaussian {

namespace {

using cd = std::complex<double>;

// associated Laguerre L_k^{(beta)}(x) by the ascending three-term recurrence
double laguerre(int k, int beta, double x) {
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + beta - x;
  for (int j = 1; j < k; ++j) {
    double next = ((2.0 * j + 1.0 + beta - x) * cur - (j + beta) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

void validate_prep(const GaussianPrep& prep, const fock::Basis& basis) {
  if (basis.truncation() != fock::Truncation::PerModeCutoff)
    throw ValidationError("gaussian preparation needs a per-mode cutoff basis");
  if (int(prep.displacements.size()) != basis.modes())
    throw ValidationError("one displacement amplitude per mode is required");
  for (const cd& alpha : prep.displacements)
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
      throw ValidationError("displacement amplitudes must be finite");
  const int cutoff = basis.truncation_value();
  for (const TwoModeSqueezeOp& op : prep.squeezes) {
    if (op.lower_mode < 0 || op.lower_mode + 1 >= basis.modes())
      throw ValidationError("squeeze pair outside the mode range");
    if (!std::isfinite(op.r) || op.r < 0.0)
      throw ValidationError("squeeze parameter must be finite and nonnegative");
    if (!std::isfinite(op.phase)) throw ValidationError("squeeze phase must be finite");
    double tail = std::pow(std::tanh(op.r), 2.0 * (cutoff + 1));
    if (tail > 1e-6)
      throw ValidationError("cutoff too small to hold the squeezed pair ladder");
  }
}

void check_counter(const sampler::QndCounter& counter) {
  if (!(counter.eta > 0.0) || counter.eta > 1.0)
    throw ValidationError("counter efficiency must lie in (0, 1]");
  if (counter.repetitions < 1)
    throw ValidationError("counter repetitions must be at least 1");
  if (counter.max_n_probe < 0)
    throw ValidationError("counter probe ceiling must be nonnegative");
}

}  // namespace

Eigen::MatrixXcd displacement_matrix(cd alpha, int dim) {
  if (dim < 1) throw ValidationError("displacement matrix needs a positive dimension");
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
    throw ValidationError("displacement amplitude must be finite");
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(dim, dim);
  const double x = std::norm(alpha);
  const double envelope = std::exp(-0.5 * x);
  for (int m = 0; m < dim; ++m) {
    for (int n = 0; n < dim; ++n) {
      int lo = std::min(n, m), hi = std::max(n, m);
      // sqrt(lo!/hi!) alpha^(n-m) (or conjugate branch) built factor by factor
      cd step = n >= m ? alpha : -std::conj(alpha);
      cd prefactor = envelope;
      for (int j = lo + 1; j <= hi; ++j) prefactor *= step / std::sqrt(double(j));
      d(n, m) = prefactor * laguerre(lo, hi - lo, x);
    }
  }
  return d;
}

fock::State prepare_gaussian(const GaussianPrep& prep, fock::BasisPtr basis) {
  if (!basis) throw ValidationError("null basis");
  validate_prep(prep, *basis);

  fock::State state = fock::State::vacuum(basis);
  auto squeeze = [&] {
    for (const TwoModeSqueezeOp& op : prep.squeezes) {
      if (op.r == 0.0) continue;
      state = dynamics::evolve(dynamics::TwoModeSqueeze{op.lower_mode, 1.0, op.phase},
                               state, op.r)
                  .state;
    }
  };
  auto displace = [&] {
    const int dim = basis->truncation_value() + 1;
    for (int m = 0; m < basis->modes(); ++m) {
      if (prep.displacements[std::size_t(m)] == cd(0.0, 0.0)) continue;
      state = dynamics::apply_local_unitary(
          state, {{dynamics::Site::Kind::Mode, m}},
          displacement_matrix(prep.displacements[std::size_t(m)], dim));
    }
  };
  if (prep.displace_first) {
    displace();
    squeeze();
  } else {
    squeeze();
    displace();
  }

  double norm = state.norm();
  if (std::abs(norm - 1.0) > 1e-6)
    throw ValidationError("cutoff too small: preparation lost more than 1e-6 of norm");
  return fock::State(basis, state.amplitudes() / norm);
}

double parity_expectation(const fock::State& state, int mode) {
  const fock::Basis& basis = state.basis();
  if (mode < 0 || mode >= basis.modes())
    throw ValidationError("parity mode index outside the basis");
  double parity = 0.0;
  for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
    int n = basis.label_at(idx).counts[std::size_t(mode)];
    double p = std::norm(state.amplitudes()(Eigen::Index(idx)));
    parity += (n % 2 == 0) ? p : -p;
  }
  return parity;
}

double mean_photon_number(const fock::State& state) {
  const fock::Basis& basis = state.basis();
  double mean = 0.0;
  for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
    const fock::BasisLabel label = basis.label_at(idx);
    int total = 0;
    for (int n : label.counts) total += n;
    mean += total * std::norm(state.amplitudes()(Eigen::Index(idx)));
  }
  return mean;
}

sampler::OutputDistribution gaussian_pipeline(const GaussianPrep& prep,
                                              const interferometer::ElementList& elements,
                                              const sampler::ReadoutModel& readout,
                                              int cutoff) {
  if (cutoff < 1) throw ValidationError("cutoff must be at least 1");
  const int modes = int(prep.displacements.size());
  if (modes < 1) throw ValidationError("at least one mode is required");
  auto basis = std::make_shared<const fock::Basis>(fock::Basis::per_mode_cutoff(modes, cutoff));
  fock::State state = prepare_gaussian(prep, basis);

  for (const interferometer::Element& element : elements) {
    dynamics::EvolutionResult step = std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, interferometer::BeamSplitter>) {
            double sign = e.angle < 0.0 ? -1.0 : 1.0;
            return dynamics::evolve(dynamics::BeamSplitterRwa{e.lower_mode, sign}, state,
                                    std::abs(e.angle));
          } else {
            double sign = e.phase < 0.0 ? -1.0 : 1.0;
            return dynamics::evolve(dynamics::PhaseRotation{e.mode, sign}, state,
                                    std::abs(e.phase));
          }
        },
        element);
    if (step.truncation_leakage > 1e-4)
      throw ValidationError("truncation leakage above 1e-4 during interferometer evolution");
    state = std::move(step.state);
  }

  std::map<fock::Occupation, double> raw;
  for (std::size_t idx = 0; idx < basis->dimension(); ++idx) {
    double p = std::norm(state.amplitudes()(Eigen::Index(idx)));
    if (p > 0.0) raw[basis->label_at(idx).counts] += p;
  }

  sampler::OutputDistribution out;
  out.mode_count = modes;
  out.photon_count = -1;
  double kept = 0.0;
  if (const auto* swap = std::get_if<sampler::SwapPhotodetector>(&readout)) {
    for (const auto& [pattern, p] : raw) {
      bool bunched = false;
      for (int n : pattern) bunched = bunched || n > 1;
      if (bunched && swap->post_select_bunching) continue;
      fock::Occupation reported = pattern;
      for (int& n : reported) n = n > 0 ? 1 : 0;
      out.entries[reported] += p;
      kept += p;
    }
  } else {
    const auto& counter = std::get<sampler::QndCounter>(readout);
    check_counter(counter);
    double miss = std::pow(1.0 - counter.eta, counter.repetitions);
    for (const auto& [pattern, p] : raw) {
      bool countable = true;
      for (int n : pattern) countable = countable && n <= counter.max_n_probe;
      if (!countable) continue;
      // every mode's probe ladder must land on its true count
      double weight = p * std::pow(1.0 - miss, modes);
      out.entries[pattern] += weight;
      kept += weight;
    }
  }
  if (kept <= 0.0)
    throw ValidationError("readout rejected the entire output distribution");
  for (auto& [pattern, p] : out.entries) p /= kept;
  return out;
}

}  // namespace cqbs::gaussian
