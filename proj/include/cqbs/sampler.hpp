#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <variant>
#include <vector>

#include "cqbs/fock.hpp"
#include "cqbs/interferometer.hpp"
#include "cqbs/rng.hpp"

namespace cqbs::sampler {

// Exact lossless photon-count statistics at one interferometer output.
// Entries cover the whole fixed-total sector, zero-probability outcomes
// included, keyed in the sector's enumeration order.
struct OutputDistribution {
  int mode_count = 0;
  int photon_count = 0;
  std::map<fock::Occupation, double> entries;
};

// Qubit-swap photodetector: reports the binary occupancy pattern; a mode
// holding two or more photons cannot complete the swap, so those outcomes
// carry a reject flag when post-selection is on.
struct SwapPhotodetector {
  bool post_select_bunching = true;
};

// Number-resolved counter probing the qubit at each photon-shifted candidate
// frequency in ascending order, `repetitions` tries per candidate, each
// succeeding with probability eta.  A mode whose probes all fail reports
// max_n_probe + 1 as an out-of-range marker.
struct QndCounter {
  double eta = 0.9;
  int repetitions = 1;
  int max_n_probe = 4;
};

using ReadoutModel = std::variant<SwapPhotodetector, QndCounter>;

struct ReadoutResult {
  fock::Occupation reported;
  bool rejected = false;
};

// Ryser's inclusion-exclusion formula with Gray-code subset updates,
// O(2^n n).  Guarded at n = 24; the empty matrix has permanent 1.
std::complex<double> permanent(const Eigen::MatrixXcd& matrix);

// |perm(U_ST)|^2 / (prod input_i! * prod output_i!) where U_ST repeats
// column j input_j times and row i output_i times.  Photon totals must match.
double output_probability(const Eigen::MatrixXcd& unitary, const fock::Occupation& input,
                          const fock::Occupation& output);

// Evaluates output_probability over the whole fixed-total sector.
OutputDistribution full_distribution(const Eigen::MatrixXcd& unitary,
                                     const fock::Occupation& input,
                                     std::size_t enumeration_cap = 1'000'000);

// Independent route to the same distribution: applies each element's sector
// unitary to the input Fock state and reads squared amplitudes.
OutputDistribution brute_force_distribution(const interferometer::ElementList& elements,
                                            const fock::Occupation& input);

// Inverse-CDF draws over the enumerated support; deterministic per seed.
std::vector<fock::Occupation> sample(const OutputDistribution& distribution,
                                     std::uint64_t seed, std::size_t count);

ReadoutResult apply_readout(const fock::Occupation& true_outcome, const ReadoutModel& model,
                            rng::Stream& stream);
ReadoutResult apply_readout(const fock::Occupation& true_outcome, const ReadoutModel& model,
                            std::uint64_t seed);

// Binomial thinning: each photon independently survives with survival_p.
// The distribution overload is exact; the sample overload draws per photon.
OutputDistribution apply_loss(const OutputDistribution& distribution, double survival_p);
std::vector<fock::Occupation> apply_loss(const std::vector<fock::Occupation>& samples,
                                         double survival_p, std::uint64_t seed);

}  // namespace cqbs::sampler
