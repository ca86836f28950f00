#pragma once

#include "cqbs/constants.hpp"

namespace cqbs::device {

// Table of hardware figures of merit.  Couplings and decay rates that are
// quoted "per 2π" are stored as angular frequencies (rad/s).  The dispersive
// pulls chi_ps and xi_0 are quoted without the 2π; how they convert to a rate
// is a convention switch, so the quoted numbers are stored as-is and the
// rate accessors below apply the active convention.
enum class PhaseConvention { plain, angular };

struct DeviceParams {
  double g_s = constants::two_pi * 150e6;   // qubit-storage coupling
  double g_bs = constants::two_pi * 30e6;   // coupler strength scale
  double chi_ps = 20e6;                     // dispersive pull, quoted figure
  double xi_0 = 30e6;                       // readout shift, quoted figure
  PhaseConvention convention = PhaseConvention::plain;
  double kappa_s = constants::two_pi * 1e3;   // storage decay
  double kappa_m = constants::two_pi * 20e6;  // measurement-resonator decay
  double omega_s = constants::two_pi * 4e9;   // storage frequency
  double omega_m = constants::two_pi * 7e9;   // measurement frequency
  double omega_max = constants::two_pi * 13e9;  // top of the qubit tuning range
  double eta_readout = 0.90;
  double f_prep = 0.9992;  // single-qubit gate fidelity
  double f_fock = 0.999;   // Fock preparation/measurement fidelity

  // Quoted figure resolved to a rate in rad/s under the active convention:
  // plain uses the number directly, angular multiplies by 2π.
  double chi_ps_rate() const;
  double xi0_rate() const;

  // Throws ValidationError unless every rate and frequency is strictly
  // positive and the fidelities lie in (0, 1].
  void validate() const;
};

double rate_under(double quoted, PhaseConvention convention);

// Circuit geometry feeding the closed-form frequency and coupling formulas.
struct DeviceGeometry {
  double c_s = 0.374e-15;  // storage coupling capacitance (F)
  double c_m = 2.0e-15;    // measurement coupling capacitance (F)
  double c_j = 70e-15;     // qubit capacitance (F)
  double length = 5e-3;    // resonator length (m)
  double c_per_len = 1.6e-10;  // capacitance per unit length (F/m)
  double e_j = 2.4e-23;    // single-junction Josephson energy (J)
  double phi_0 = constants::flux_quantum;

  static DeviceGeometry typical();

  // Charging energy e²/(2 C_J) in joules.
  double charging_energy() const;

  void validate() const;
};

enum class Resonator { storage, measurement };

// SQUID-tuned qubit frequency Ω = sqrt(8 · 2E_J|cos(2πΦ/Φ_0)| · E_C)/ħ.
// The magnitude of the cosine is used, so the zero sits at odd quarter
// quanta; flux there is rejected as out of band.
double qubit_frequency(const DeviceGeometry& geometry, double phi_ext);

// Inverse on the principal branch Φ ∈ [0, Φ_0/4): the flux parking the qubit
// at `target`, which must lie in (0, Ω(Φ=0)].
double flux_for_qubit_frequency(const DeviceGeometry& geometry, double target);

// Flux-tuned coupler strength g_bs·cos(2πΦ_c/Φ_0) and its inverse on the
// principal branch Φ_c ∈ [0, Φ_0/2] covering g ∈ [−g_bs, g_bs].
double coupler_strength(double g_bs, double phi_c, double phi_0 = constants::flux_quantum);
double flux_for_strength(double g_bs, double target,
                         double phi_0 = constants::flux_quantum);

// Capacitive-divider coupling C/(C+C_J)·sqrt(ω/(c·L)) for the selected
// resonator, with ω drawn from the params table.
double qubit_resonator_coupling(const DeviceGeometry& geometry, const DeviceParams& params,
                                Resonator which);

// Inverse of the above: the coupling capacitance that realizes a target
// coupling.  Throws when the target exceeds the geometric bound sqrt(ω/(cL)).
double capacitance_for_coupling(const DeviceGeometry& geometry, const DeviceParams& params,
                                Resonator which, double target);

}  // namespace cqbs::device
