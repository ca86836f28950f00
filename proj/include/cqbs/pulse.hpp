#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "cqbs/device.hpp"
#include "cqbs/interferometer.hpp"

namespace cqbs::pulse {

// Hardware instructions.  Flux values are in units of Phi_0 and durations in
// nanoseconds, matching the serialized record format exactly so schedules
// reload byte-identically.

// Coupler between storage modes (lower_mode, lower_mode+1) switched on.
struct CouplerOn {
  int lower_mode = 0;
  double flux = 0.0;
  double duration = 0.0;
};

// Qubit parked at the dispersive point of its storage mode, imprinting a
// photon-number phase at rate twice the dispersive pull.
struct QubitDetune {
  int qubit = 0;
  double flux = 0.0;
  double duration = 0.0;
};

// Resonant single-qubit rotation; instantaneous at the schedule timescale.
struct QubitDrive {
  int qubit = 0;
  double rotation = 0.0;
};

using Instruction = std::variant<CouplerOn, QubitDetune, QubitDrive>;

struct PulseSchedule {
  // each layer holds hardware-disjoint instructions executed simultaneously
  std::vector<std::vector<Instruction>> layers;
  // sum over layers of the layer's longest instruction, in seconds
  double total_duration = 0.0;
};

// Lowers a canonicalized element list onto the hardware.  Beam splitters run
// at full coupling (flux 0) for angle/g_bs; phase shifters detune the mode's
// qubit to where the pull matches chi_ps and hold for phase/(2 chi_ps).
// Hardware-disjoint instructions pack greedily into shared layers without
// ever reordering two instructions that touch common hardware.
PulseSchedule compile(const interferometer::ElementList& elements,
                      const device::DeviceParams& params,
                      const device::DeviceGeometry& geometry = device::DeviceGeometry::typical());

// Throws ValidationError when any layer contains two instructions sharing a
// resonator, qubit, or coupler, or any instruction is malformed.
void validate_schedule(const PulseSchedule& schedule);

// One-photon unitary realized by the schedule, built by state-vector
// evolution of the effective Hamiltonians on the single-excitation sector
// (not by multiplying element matrices).
Eigen::MatrixXcd schedule_unitary(const PulseSchedule& schedule, int modes,
                                  const device::DeviceParams& params);

// Flattens layers back to an element order compatible with the original
// list's dependency structure; drives have no photon-sector action and are
// dropped.
interferometer::ElementList schedule_to_elements(const PulseSchedule& schedule,
                                                 const device::DeviceParams& params);

// Layer count of a compiled Haar-typical decomposition on `modes` modes.
int schedule_depth_estimate(int modes, std::uint64_t seed = 2026);

// Tab-separated records (layer, kind, targets, flux in Phi_0, duration in
// ns) under '#' header lines; drive records carry the rotation angle in the
// flux column.  parse accepts exactly what serialize emits.
std::string serialize_schedule(const PulseSchedule& schedule);
PulseSchedule parse_schedule(const std::string& text);

}  // namespace cqbs::pulse
