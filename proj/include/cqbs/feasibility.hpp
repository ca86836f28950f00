// Scalability arithmetic: how many sequential mesh elements fit inside the
// storage lifetime, and what survival probability a full-depth experiment
// would see.  Element times are computed under both phase-rate conventions
// and printed side by side; the headline operation count comes from the
// rounded design figures (150 us lifetime, 0.3 us per element) because the
// computed times land well away from that budget under either convention.
#pragma once

#include <string>

#include "cqbs/device.hpp"

namespace cqbs::feasibility {

// Rounded design-point budget the headline counts are quoted from.
inline constexpr double nominal_lifetime = 150e-6;
inline constexpr double nominal_element_time = 0.3e-6;

// Timing track for one phase-rate convention.  max_sequential_ops is
// floor(t_lifetime / t_element) against the computed lifetime.
struct ConventionBudget {
  device::PhaseConvention convention = device::PhaseConvention::plain;
  double t_bs = 0.0;       // pi / g_bs, seconds
  double t_ps = 0.0;       // pi / phi under this convention, seconds
  double t_element = 0.0;  // t_bs + t_ps
  long max_sequential_ops = 0;
};

struct FeasibilityReport {
  double t_lifetime = 0.0;  // 1 / kappa_s, seconds
  ConventionBudget plain;
  ConventionBudget angular;

  // Headline track from the rounded design figures; convention independent.
  // max_sequential_ops = floor(nominal_lifetime / nominal_element_time),
  // max_modes = max_sequential_ops / depth coefficient,
  // max_photons = floor(sqrt(max_modes)).
  long max_sequential_ops = 0;
  long max_modes = 0;
  long max_photons = 0;

  // Success probability for N = max_photons photons across the full budget
  // t_total = max_sequential_ops * nominal_element_time, reported factor by
  // factor: state preparation, photon survival, readout.
  double prep_factor = 0.0;     // (F_prep * F_fock)^N
  double survival_factor = 0.0;  // exp(-N * kappa_s * t_total)
  double readout_factor = 0.0;   // eta_readout^N
  double success_probability = 0.0;
};

// Duration of one mesh element (50/50 splitter plus a maximal pi phase)
// under the selected convention for the quoted phase rate.
double element_time(const device::DeviceParams& params,
                    device::PhaseConvention convention);

// depth_coefficient is the layers-per-mode ratio of the compiled mesh; the
// default 1 assumes one layer per mode.  A measured estimate from
// pulse::schedule_depth_estimate divided by the mode count can override it.
FeasibilityReport budget(const device::DeviceParams& params,
                         double depth_coefficient = 1.0);

// Labeled text table of the report, including the side-by-side convention
// tracks and the gap between computed and nominal element times.
std::string describe(const FeasibilityReport& report);

}  // namespace cqbs::feasibility
