#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "cqbs/fock.hpp"

namespace cqbs::dynamics {

// ---- Hamiltonian specifications (rates in rad/s, flux in Phi_0 units) ----

// w a†a + (W/2) sz + g (s+ a + s- a†)
struct JaynesCummings {
  int qubit = 0;
  int mode = 0;
  double mode_freq = 0.0;   // w
  double qubit_freq = 0.0;  // W
  double coupling = 0.0;    // g
};

// (w - chi sz) a†a + (1/2)(W - chi) sz, the detuned limit of the model above;
// chi = g^2/Delta.  g_over_delta records the expansion ratio the chi value
// came from so downstream error budgets can see it.
struct Dispersive {
  int qubit = 0;
  int mode = 0;
  double mode_freq = 0.0;
  double qubit_freq = 0.0;
  double chi = 0.0;
  double g_over_delta = 0.0;
};

// g (a†_i a_j + a†_j a_i) on the adjacent pair (lower_mode, lower_mode+1)
struct BeamSplitterRwa {
  int lower_mode = 0;
  double coupling = 0.0;
};

// rate * a†a on one mode
struct PhaseRotation {
  int mode = 0;
  double rate = 0.0;
};

// Coupler flux waveform Phi(t)/Phi_0 = dc + ac cos(frequency t)
struct FluxDrive {
  double dc = 0.0;
  double ac = 0.0;
  double frequency = 0.0;
};

// Lab-frame quadrature coupling on an adjacent pair:
//   freq_a a†a + freq_b b†b + g(t) (a + a†)(b + b†)
// with g(t) = coupling_scale * cos(2 pi Phi(t)/Phi_0).
struct QuadratureCoupling {
  int lower_mode = 0;
  double freq_a = 0.0;
  double freq_b = 0.0;
  double coupling_scale = 0.0;
  FluxDrive drive;
};

// rate (e^{i phase} a†_i b†_j + h.c.), the rotating-frame limit of a coupler
// flux-modulated at the pair sum frequency
struct TwoModeSqueeze {
  int lower_mode = 0;
  double rate = 0.0;
  double phase = 0.0;
};

using HamiltonianSpec = std::variant<JaynesCummings, Dispersive, BeamSplitterRwa,
                                     PhaseRotation, QuadratureCoupling, TwoModeSqueeze>;

// Dense matrix on the full basis, evaluated at time t for driven specs.
// Guarded: refuses bases above 4096 states (use evolve, which works locally).
Eigen::MatrixXcd build_hamiltonian(const HamiltonianSpec& spec, const fock::Basis& basis,
                                   double t = 0.0);

// ---- evolution ----

struct EvolutionResult {
  fock::State state;
  // population sitting at the per-mode cutoff of any involved mode after the
  // evolution; zero on FixedTotal bases
  double truncation_leakage = 0.0;
  long steps = 1;
};

struct EvolveOptions {
  double step_tolerance = 1e-8;  // Richardson halving acceptance, driven specs
  long max_steps = 1 << 22;
};

// Time-independent specs evolve by exact spectral exponentiation (local on
// PerModeCutoff bases, dense on FixedTotal sectors).  A driven
// QuadratureCoupling steps with the unitary midpoint rule; the step count
// doubles until two consecutive resolutions agree to step_tolerance.
EvolutionResult evolve(const HamiltonianSpec& spec, const fock::State& state,
                       double duration, const EvolveOptions& options = {});

// ---- local operator plumbing (shared with the gaussian module) ----

struct Site {
  enum class Kind { Mode, Qubit };
  Kind kind = Kind::Mode;
  int index = 0;
};

// exp(-i H t) for Hermitian H via eigendecomposition
Eigen::MatrixXcd hermitian_propagator(const Eigen::MatrixXcd& hamiltonian, double t);

// Applies a unitary acting on one or two subsystems, indexed in natural order
// (photon number ascending / qubit ground-then-excited, row = site0 * d1 + site1).
fock::State apply_local_unitary(const fock::State& state, const std::vector<Site>& sites,
                                const Eigen::MatrixXcd& local_unitary);

double cutoff_population(const fock::State& state, const std::vector<int>& modes);

// ---- named analyses ----

struct JcLoadResult {
  EvolutionResult evolution;  // state at the located optimum
  double optimal_time = 0.0;
  double transfer_probability = 0.0;
};

// Swap of one excitation between qubit and resonator under the full model.
// Scans then refines the transfer maximum; starting from the ground state the
// optimum is trivially t = 0 with nothing to transfer.
JcLoadResult jc_load(double coupling, double mode_freq, double detuning = 0.0,
                     bool start_excited = true, int cutoff = 2);

// Runs the full detuned model for `duration` with the qubit excited versus
// ground and returns the absolute (wrap-safe) deviation of the accumulated
// conditional photon phase from the 2 (g^2/Delta) t the dispersive model
// predicts.  Requires |coupling/detuning| < 0.2.
double dispersive_phase_check(double coupling, double detuning, double duration,
                              double mode_freq = 1.0);

struct RwaCheckResult {
  double fidelity = 0.0;
  double leakage = 0.0;
};

// Full lab-frame quadrature coupling at fixed flux for a beam-splitter angle
// theta, transformed to the rotating frame and compared against the
// rotating-wave model.  Zero coupling is the identity with fidelity one.
// Throws when cutoff leakage exceeds 1e-6.
RwaCheckResult rwa_beam_splitter_check(double coupling, double mode_freq, double theta,
                                       int cutoff = 6);

struct SqueezeEffective {
  fock::State state;
  double p00 = 0.0, p11 = 0.0;
  double p00_analytic = 0.0, p11_analytic = 0.0;
};

// Two-mode squeezing under the effective pair Hamiltonian, r = rate * time.
// Requires tanh(r)^(2(cutoff+1)) <= 1e-8 so the truncated pair ladder holds
// the whole state.
SqueezeEffective squeeze_effective(double r, int cutoff);

struct SqueezeFullRun {
  double coupling_ratio = 0.0;  // coupler scale over resonator frequency
  double err_p00 = 0.0, err_p11 = 0.0;
  long steps = 0;
};

// Full flux-modulated run: coupler biased at Phi_0/4 and modulated at the
// pair sum frequency with depth z (radians of flux swing); the first-harmonic
// weight J1(z) sets the effective squeeze rate.  Runs a whole number of drive
// cycles so the final state is sampled stroboscopically.
SqueezeFullRun squeeze_full_drive(double r, double modulation_depth, int cycles,
                                  int cutoff, const EvolveOptions& options = {});

struct SqueezingReport {
  SqueezeEffective effective;
  std::vector<SqueezeFullRun> runs;  // cycle count doubling per run
};

// r = g_bs * duration; effective evolution plus full-model runs at coupling
// ratios falling by 2x per entry.
SqueezingReport flux_modulated_squeezing(double g_bs, double duration, int cutoff,
                                         int base_cycles = 8, int run_count = 3);

}  // namespace cqbs::dynamics
