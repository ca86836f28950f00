#include "cqbs/feasibility.hpp"

#include <cmath>
#include <cstdio>

#include "cqbs/constants.hpp"
#include "cqbs/errors.hpp"

namespace cqbs::feasibility {

namespace {

ConventionBudget convention_budget(const device::DeviceParams& params,
                                   device::PhaseConvention convention,
                                   double t_lifetime) {
  ConventionBudget track;
  track.convention = convention;
  track.t_bs = constants::pi / params.g_bs;
  track.t_ps = constants::pi / device::rate_under(params.chi_ps, convention);
  track.t_element = track.t_bs + track.t_ps;
  track.max_sequential_ops = long(std::floor(t_lifetime / track.t_element));
  return track;
}

const char* convention_name(device::PhaseConvention convention) {
  return convention == device::PhaseConvention::plain ? "plain" : "angular";
}

}  // namespace

double element_time(const device::DeviceParams& params,
                    device::PhaseConvention convention) {
  params.validate();
  return constants::pi / params.g_bs +
         constants::pi / device::rate_under(params.chi_ps, convention);
}

FeasibilityReport budget(const device::DeviceParams& params,
                         double depth_coefficient) {
  params.validate();
  if (!(depth_coefficient > 0.0) || !std::isfinite(depth_coefficient))
    throw ValidationError("depth coefficient must be positive and finite");

  FeasibilityReport report;
  report.t_lifetime = 1.0 / params.kappa_s;
  report.plain =
      convention_budget(params, device::PhaseConvention::plain, report.t_lifetime);
  report.angular =
      convention_budget(params, device::PhaseConvention::angular, report.t_lifetime);

  report.max_sequential_ops =
      long(std::floor(nominal_lifetime / nominal_element_time));
  report.max_modes =
      long(std::floor(double(report.max_sequential_ops) / depth_coefficient));
  report.max_photons = long(std::floor(std::sqrt(double(report.max_modes))));

  double n = double(report.max_photons);
  double t_total = double(report.max_sequential_ops) * nominal_element_time;
  report.prep_factor = std::pow(params.f_prep * params.f_fock, n);
  report.survival_factor = std::exp(-n * params.kappa_s * t_total);
  report.readout_factor = std::pow(params.eta_readout, n);
  report.success_probability =
      report.prep_factor * report.survival_factor * report.readout_factor;
  return report;
}

std::string describe(const FeasibilityReport& report) {
  char line[192];
  std::string out;
  auto emit = [&](const char* fmt, auto... args) {
    std::snprintf(line, sizeof(line), fmt, args...);
    out += line;
  };

  emit("storage lifetime 1/kappa_s      %.4f us\n", report.t_lifetime * 1e6);
  emit("nominal budget                  %.1f us lifetime, %.2f us per element\n",
       nominal_lifetime * 1e6, nominal_element_time * 1e6);
  emit("%-12s %-12s %-12s %-12s %s\n", "convention", "t_bs (us)", "t_ps (us)",
       "t_elem (us)", "ops");
  for (const ConventionBudget* track : {&report.plain, &report.angular}) {
    emit("%-12s %-12.5f %-12.5f %-12.5f %ld\n", convention_name(track->convention),
         track->t_bs * 1e6, track->t_ps * 1e6, track->t_element * 1e6,
         track->max_sequential_ops);
    emit("  computed element time is %.2fx the nominal %.2f us\n",
         track->t_element / nominal_element_time, nominal_element_time * 1e6);
  }
  emit("max sequential ops (nominal)    %ld\n", report.max_sequential_ops);
  emit("max modes                       %ld\n", report.max_modes);
  emit("max photons floor(sqrt(modes))  %ld\n", report.max_photons);
  emit("preparation factor              %.6g\n", report.prep_factor);
  emit("survival factor                 %.6g\n", report.survival_factor);
  emit("readout factor                  %.6g\n", report.readout_factor);
  emit("success probability             %.6g\n", report.success_probability);
  return out;
}

}  // namespace cqbs::feasibility
