// Experiment configuration and the text file formats the command-line tool
// reads and writes.  Configs are flat key=value lines with [section]
// prefixes; outputs are tab-delimited records under a '#' header carrying
// the artifact version, the config hash, and the seed, so a run is
// reproducible byte for byte from its header alone.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "cqbs/device.hpp"
#include "cqbs/fock.hpp"
#include "cqbs/gaussian.hpp"
#include "cqbs/interferometer.hpp"
#include "cqbs/sampler.hpp"

namespace cqbs::config {

enum class ReadoutKind { none, swap, qnd };

struct ExperimentConfig {
  int modes = 4;
  int photons = 2;
  std::uint64_t seed = 1;
  int cutoff = 8;              // per-mode truncation for Gaussian runs
  std::size_t samples = 1000;
  double depth_coefficient = 1.0;

  // empty path means a Haar unitary drawn from the seed
  std::string unitary_file;

  device::DeviceParams device;

  // empty occupation means one photon in each of the first `photons` modes
  fock::Occupation occupation;

  // Gaussian input recipe; empty alphas mean all-zero displacements
  std::vector<std::complex<double>> alphas;
  std::vector<gaussian::TwoModeSqueezeOp> squeezes;
  bool displace_first = false;

  ReadoutKind readout = ReadoutKind::none;
  double readout_eta = 0.9;
  int readout_repetitions = 5;
  int readout_max_n_probe = 4;
  bool post_select = true;

  bool loss_enabled = false;
  double survival = 1.0;
};

// Merges key=value lines into `config`.  Unknown keys, unknown sections, and
// malformed values throw ValidationError naming the offending line.
void apply_config_text(ExperimentConfig& config, const std::string& text);

// Full render of every field in a fixed key order; parsing it back yields an
// equal config.
std::string canonical_text(const ExperimentConfig& config);

// FNV-1a over canonical_text.  Covers the configuration itself; the contents
// of a referenced unitary file are not folded in.
std::uint64_t config_hash(const ExperimentConfig& config);

// The three '#' lines: artifact version, config hash (16 hex digits), seed.
std::string header_lines(const ExperimentConfig& config);

// Accepts "a", "bi", and "a+bi" forms with optional exponents.
std::complex<double> parse_complex(const std::string& token);

fock::Occupation default_occupation(const ExperimentConfig& config);
gaussian::GaussianPrep gaussian_input(const ExperimentConfig& config);
sampler::ReadoutModel readout_model(const ExperimentConfig& config);

// Element list records: "bs <lower_mode> <angle>" / "ps <mode> <phase>",
// tab separated, printed to full precision.
std::string serialize_elements(const interferometer::ElementList& elements);
interferometer::ElementList parse_elements(const std::string& text);

// Square complex matrix: a "modes <M>" line, then M rows of M tab-separated
// "a+bi" entries.
std::string serialize_unitary(const Eigen::MatrixXcd& unitary);
Eigen::MatrixXcd parse_unitary(const std::string& text);

// "n1,n2,...,nM <probability>" per outcome, probabilities to 12 significant
// digits, in the distribution's own key order.
std::string serialize_distribution(const sampler::OutputDistribution& distribution);

}  // namespace cqbs::config
