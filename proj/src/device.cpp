#include "cqbs/device.hpp"

#include <cmath>
#include <string>

#include "cqbs/errors.hpp"

namespace cqbs::device {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw ValidationError(std::string(name) + " must be strictly positive");
}

void require_unit_interval(double value, const char* name) {
  if (!(value > 0.0) || value > 1.0)
    throw ValidationError(std::string(name) + " must lie in (0, 1]");
}

}  // namespace

double rate_under(double quoted, PhaseConvention convention) {
  return convention == PhaseConvention::angular ? constants::two_pi * quoted : quoted;
}

double DeviceParams::chi_ps_rate() const { return rate_under(chi_ps, convention); }

double DeviceParams::xi0_rate() const { return rate_under(xi_0, convention); }

void DeviceParams::validate() const {
  require_positive(g_s, "g_s");
  require_positive(g_bs, "g_bs");
  require_positive(chi_ps, "chi_ps");
  require_positive(xi_0, "xi_0");
  require_positive(kappa_s, "kappa_s");
  require_positive(kappa_m, "kappa_m");
  require_positive(omega_s, "omega_s");
  require_positive(omega_m, "omega_m");
  require_positive(omega_max, "omega_max");
  require_unit_interval(eta_readout, "eta_readout");
  require_unit_interval(f_prep, "f_prep");
  require_unit_interval(f_fock, "f_fock");
}

DeviceGeometry DeviceGeometry::typical() { return {}; }

double DeviceGeometry::charging_energy() const {
  return constants::elementary_charge * constants::elementary_charge / (2.0 * c_j);
}

void DeviceGeometry::validate() const {
  require_positive(c_s, "c_s");
  require_positive(c_m, "c_m");
  require_positive(c_j, "c_j");
  require_positive(length, "length");
  require_positive(c_per_len, "c_per_len");
  require_positive(e_j, "e_j");
  require_positive(phi_0, "phi_0");
}

double qubit_frequency(const DeviceGeometry& geometry, double phi_ext) {
  geometry.validate();
  if (!std::isfinite(phi_ext)) throw ValidationError("phi_ext must be finite");
  double modulation = std::cos(constants::two_pi * phi_ext / geometry.phi_0);
  // the SQUID inductive energy scales with |cos|; its sign is absorbed into
  // the junction phase and does not enter the plasma frequency
  if (std::abs(modulation) < 1e-9)
    throw ValidationError(
        "flux out of band: Josephson energy vanishes at odd quarter flux quanta");
  double e_j_eff = 2.0 * geometry.e_j * std::abs(modulation);
  return std::sqrt(8.0 * e_j_eff * geometry.charging_energy()) / constants::hbar;
}

double flux_for_qubit_frequency(const DeviceGeometry& geometry, double target) {
  double top = qubit_frequency(geometry, 0.0);
  if (!(target > 0.0) || !std::isfinite(target))
    throw ValidationError("target qubit frequency must be strictly positive");
  if (target > top)
    throw ValidationError("target qubit frequency exceeds the zero-flux maximum");
  // Ω scales as the square root of |cos|, so the branch solves cleanly
  double ratio = target / top;
  return geometry.phi_0 * std::acos(ratio * ratio) / constants::two_pi;
}

double coupler_strength(double g_bs, double phi_c, double phi_0) {
  if (!std::isfinite(g_bs) || !std::isfinite(phi_c))
    throw ValidationError("coupler arguments must be finite");
  if (!(phi_0 > 0.0)) throw ValidationError("phi_0 must be strictly positive");
  return g_bs * std::cos(constants::two_pi * phi_c / phi_0);
}

double flux_for_strength(double g_bs, double target, double phi_0) {
  if (!(g_bs > 0.0)) throw ValidationError("g_bs must be strictly positive");
  if (!(phi_0 > 0.0)) throw ValidationError("phi_0 must be strictly positive");
  if (!std::isfinite(target) || std::abs(target) > g_bs)
    throw ValidationError("requested coupling exceeds the coupler strength scale");
  return phi_0 * std::acos(target / g_bs) / constants::two_pi;
}

namespace {

double geometric_bound(const DeviceGeometry& geometry, double omega) {
  return std::sqrt(omega / (geometry.c_per_len * geometry.length));
}

double pick_omega(const DeviceParams& params, Resonator which) {
  return which == Resonator::storage ? params.omega_s : params.omega_m;
}

double pick_capacitance(const DeviceGeometry& geometry, Resonator which) {
  return which == Resonator::storage ? geometry.c_s : geometry.c_m;
}

}  // namespace

double qubit_resonator_coupling(const DeviceGeometry& geometry, const DeviceParams& params,
                                Resonator which) {
  geometry.validate();
  params.validate();
  double cap = pick_capacitance(geometry, which);
  return cap / (cap + geometry.c_j) * geometric_bound(geometry, pick_omega(params, which));
}

double capacitance_for_coupling(const DeviceGeometry& geometry, const DeviceParams& params,
                                Resonator which, double target) {
  geometry.validate();
  params.validate();
  if (!(target > 0.0) || !std::isfinite(target))
    throw ValidationError("target coupling must be strictly positive");
  double fraction = target / geometric_bound(geometry, pick_omega(params, which));
  if (fraction >= 1.0)
    throw ValidationError("target coupling exceeds the geometric bound sqrt(omega/(cL))");
  return fraction * geometry.c_j / (1.0 - fraction);
}

}  // namespace cqbs::device
