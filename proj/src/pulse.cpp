#include "cqbs/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <sstream>
#include <utility>

#include "cqbs/constants.hpp"
#include "cqbs/dynamics.hpp"
#include "cqbs/errors.hpp"
#include "cqbs/fock.hpp"

namespace cqbs::pulse {

namespace {

enum class Res { resonator, qubit, coupler };
using Key = std::pair<Res, int>;

std::vector<Key> footprint(const Instruction& ins) {
  return std::visit(
      [](const auto& s) -> std::vector<Key> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CouplerOn>) {
          return {{Res::resonator, s.lower_mode},
                  {Res::resonator, s.lower_mode + 1},
                  {Res::coupler, s.lower_mode}};
        } else {
          // a detuned or driven qubit also claims its storage mode
          return {{Res::qubit, s.qubit}, {Res::resonator, s.qubit}};
        }
      },
      ins);
}

double duration_ns(const Instruction& ins) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, QubitDrive>)
          return 0.0;
        else
          return s.duration;
      },
      ins);
}

void check_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw ValidationError(std::string(what) + " must be finite");
}

void validate_instruction(const Instruction& ins) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CouplerOn>) {
          if (s.lower_mode < 0)
            throw ValidationError("coupler instruction references a negative mode");
          check_finite(s.flux, "coupler flux");
          check_finite(s.duration, "coupler duration");
          if (s.duration < 0.0) throw ValidationError("negative instruction duration");
        } else if constexpr (std::is_same_v<T, QubitDetune>) {
          if (s.qubit < 0)
            throw ValidationError("detune instruction references a negative qubit");
          check_finite(s.flux, "detune flux");
          check_finite(s.duration, "detune duration");
          if (s.duration < 0.0) throw ValidationError("negative instruction duration");
        } else {
          if (s.qubit < 0)
            throw ValidationError("drive instruction references a negative qubit");
          check_finite(s.rotation, "drive rotation");
        }
      },
      ins);
}

double layer_sum_seconds(const std::vector<std::vector<Instruction>>& layers) {
  double total = 0.0;
  for (const auto& layer : layers) {
    double longest = 0.0;
    for (const auto& ins : layer) longest = std::max(longest, duration_ns(ins));
    total += longest;
  }
  return total * 1e-9;
}

// Flux (in Phi_0) parking the qubit where its pull on the storage mode
// equals chi_ps: detuning Delta = g_s^2 / chi_ps above the mode.
double detune_flux_phi0(const device::DeviceParams& params,
                        const device::DeviceGeometry& geometry) {
  double chi = params.chi_ps_rate();
  double target = params.omega_s + params.g_s * params.g_s / chi;
  return device::flux_for_qubit_frequency(geometry, target) / geometry.phi_0;
}

}  // namespace

PulseSchedule compile(const interferometer::ElementList& elements,
                      const device::DeviceParams& params,
                      const device::DeviceGeometry& geometry) {
  params.validate();
  geometry.validate();
  interferometer::ElementList canonical = interferometer::canonicalize(elements);
  const double chi = params.chi_ps_rate();
  const double ps_flux = detune_flux_phi0(params, geometry);

  PulseSchedule out;
  std::map<Key, int> last_layer;
  for (const interferometer::Element& element : canonical) {
    Instruction ins = std::visit(
        [&](const auto& e) -> Instruction {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, interferometer::BeamSplitter>) {
            if (e.lower_mode < 0)
              throw ValidationError("beam splitter references a negative mode");
            return CouplerOn{e.lower_mode, 0.0, 1e9 * e.angle / params.g_bs};
          } else {
            if (e.mode < 0) throw ValidationError("phase shifter references a negative mode");
            return QubitDetune{e.mode, ps_flux, 1e9 * e.phase / (2.0 * chi)};
          }
        },
        element);
    validate_instruction(ins);

    int layer = 0;
    for (const Key& key : footprint(ins)) {
      auto it = last_layer.find(key);
      if (it != last_layer.end()) layer = std::max(layer, it->second + 1);
    }
    if (layer == int(out.layers.size())) out.layers.emplace_back();
    out.layers[std::size_t(layer)].push_back(ins);
    for (const Key& key : footprint(ins)) last_layer[key] = layer;
  }
  out.total_duration = layer_sum_seconds(out.layers);
  return out;
}

void validate_schedule(const PulseSchedule& schedule) {
  for (const auto& layer : schedule.layers) {
    std::map<Key, int> seen;
    for (const auto& ins : layer) {
      validate_instruction(ins);
      for (const Key& key : footprint(ins)) {
        if (!seen.emplace(key, 1).second)
          throw ValidationError("layer contains two instructions on shared hardware");
      }
    }
  }
}

Eigen::MatrixXcd schedule_unitary(const PulseSchedule& schedule, int modes,
                                  const device::DeviceParams& params) {
  if (modes < 1) throw ValidationError("modes must be at least 1");
  params.validate();
  validate_schedule(schedule);
  const double chi = params.chi_ps_rate();

  auto basis = std::make_shared<const fock::Basis>(fock::Basis::fixed_total(modes, 1));
  Eigen::MatrixXcd u(modes, modes);
  for (int j = 0; j < modes; ++j) {
    std::vector<int> counts(std::size_t(modes), 0);
    counts[std::size_t(j)] = 1;
    fock::State state = fock::State::basis_state(basis, {counts, 0u});
    for (const auto& layer : schedule.layers) {
      for (const auto& ins : layer) {
        if (const auto* c = std::get_if<CouplerOn>(&ins)) {
          if (c->lower_mode + 1 >= modes)
            throw ValidationError("coupler instruction outside the mode range");
          double g = params.g_bs * std::cos(constants::two_pi * c->flux);
          state = dynamics::evolve(dynamics::BeamSplitterRwa{c->lower_mode, g}, state,
                                   c->duration * 1e-9)
                      .state;
        } else if (const auto* d = std::get_if<QubitDetune>(&ins)) {
          if (d->qubit >= modes)
            throw ValidationError("detune instruction outside the mode range");
          state = dynamics::evolve(dynamics::PhaseRotation{d->qubit, 2.0 * chi}, state,
                                   d->duration * 1e-9)
                      .state;
        }
        // drives act on parked qubits and leave the photon sector alone
      }
    }
    // the one-photon sector orders labels so basis index k is mode k
    u.col(j) = state.amplitudes();
  }
  return u;
}

interferometer::ElementList schedule_to_elements(const PulseSchedule& schedule,
                                                 const device::DeviceParams& params) {
  params.validate();
  validate_schedule(schedule);
  const double chi = params.chi_ps_rate();
  interferometer::ElementList out;
  for (const auto& layer : schedule.layers) {
    for (const auto& ins : layer) {
      if (const auto* c = std::get_if<CouplerOn>(&ins)) {
        double g = params.g_bs * std::cos(constants::two_pi * c->flux);
        out.push_back(interferometer::BeamSplitter{c->lower_mode, g * c->duration * 1e-9});
      } else if (const auto* d = std::get_if<QubitDetune>(&ins)) {
        out.push_back(interferometer::PhaseShifter{d->qubit, 2.0 * chi * d->duration * 1e-9});
      }
    }
  }
  return out;
}

int schedule_depth_estimate(int modes, std::uint64_t seed) {
  if (modes < 1) throw ValidationError("modes must be at least 1");
  Eigen::MatrixXcd u = interferometer::haar_random(modes, seed);
  PulseSchedule schedule = compile(interferometer::reck_decompose(u), device::DeviceParams{});
  return int(schedule.layers.size());
}

std::string serialize_schedule(const PulseSchedule& schedule) {
  validate_schedule(schedule);
  std::string out = "# pulse-schedule v1\n# layer\tkind\ttargets\tflux_phi0\tduration_ns\n";
  char buf[160];
  for (std::size_t layer = 0; layer < schedule.layers.size(); ++layer) {
    for (const auto& ins : schedule.layers[layer]) {
      if (const auto* c = std::get_if<CouplerOn>(&ins)) {
        std::snprintf(buf, sizeof buf, "%zu\tcoupler\t%d,%d\t%.17g\t%.17g\n", layer,
                      c->lower_mode, c->lower_mode + 1, c->flux, c->duration);
      } else if (const auto* d = std::get_if<QubitDetune>(&ins)) {
        std::snprintf(buf, sizeof buf, "%zu\tdetune\t%d\t%.17g\t%.17g\n", layer, d->qubit,
                      d->flux, d->duration);
      } else {
        const auto& r = std::get<QubitDrive>(ins);
        std::snprintf(buf, sizeof buf, "%zu\tdrive\t%d\t%.17g\t0\n", layer, r.qubit,
                      r.rotation);
      }
      out += buf;
    }
  }
  return out;
}

PulseSchedule parse_schedule(const std::string& text) {
  PulseSchedule out;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string layer_s, kind, targets, flux_s, dur_s;
    if (!std::getline(fields, layer_s, '\t') || !std::getline(fields, kind, '\t') ||
        !std::getline(fields, targets, '\t') || !std::getline(fields, flux_s, '\t') ||
        !std::getline(fields, dur_s))
      throw ValidationError("schedule line " + std::to_string(line_no) +
                            ": expected 5 tab-separated fields");
    std::size_t layer;
    double flux, dur;
    try {
      layer = std::stoul(layer_s);
      flux = std::stod(flux_s);
      dur = std::stod(dur_s);
    } catch (const std::exception&) {
      throw ValidationError("schedule line " + std::to_string(line_no) +
                            ": malformed numeric field");
    }
    if (layer > out.layers.size())
      throw ValidationError("schedule line " + std::to_string(line_no) +
                            ": layer indices must be contiguous");
    if (layer == out.layers.size()) out.layers.emplace_back();

    Instruction ins;
    if (kind == "coupler") {
      int a = 0, b = 0;
      if (std::sscanf(targets.c_str(), "%d,%d", &a, &b) != 2 || b != a + 1)
        throw ValidationError("schedule line " + std::to_string(line_no) +
                              ": coupler targets must be an adjacent pair");
      ins = CouplerOn{a, flux, dur};
    } else if (kind == "detune") {
      ins = QubitDetune{std::stoi(targets), flux, dur};
    } else if (kind == "drive") {
      ins = QubitDrive{std::stoi(targets), flux};
    } else {
      throw ValidationError("schedule line " + std::to_string(line_no) +
                            ": unknown instruction kind '" + kind + "'");
    }
    out.layers[layer].push_back(ins);
  }
  validate_schedule(out);
  out.total_duration = layer_sum_seconds(out.layers);
  return out;
}

}  // namespace cqbs::pulse
