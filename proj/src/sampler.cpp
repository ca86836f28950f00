#include "cqbs/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "cqbs/dynamics.hpp"
#include "cqbs/errors.hpp"

namespace cqbs::sampler {
namespace {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

constexpr int kPermanentCap = 24;

void validate_occupation(const fock::Occupation& v, const char* what) {
  for (int n : v)
    if (n < 0) throw ValidationError(std::string(what) + " has a negative count");
}

int total_photons(const fock::Occupation& v) {
  return std::accumulate(v.begin(), v.end(), 0);
}

double factorial_product(const fock::Occupation& v) {
  double prod = 1.0;
  for (int n : v)
    for (int k = 2; k <= n; ++k) prod *= k;
  return prod;
}

void validate_model(const ReadoutModel& model) {
  if (const auto* qnd = std::get_if<QndCounter>(&model)) {
    if (!(qnd->eta > 0.0 && qnd->eta <= 1.0))
      throw ValidationError("readout efficiency must lie in (0, 1]");
    if (qnd->repetitions < 1) throw ValidationError("readout needs at least one repetition");
    if (qnd->max_n_probe < 0) throw ValidationError("probe ceiling must be non-negative");
  }
}

double check_normalized(const OutputDistribution& dist) {
  double sum = 0.0;
  for (const auto& [outcome, p] : dist.entries) {
    if (p < -1e-12) throw ValidationError("distribution has a negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError("distribution is not normalized");
  return sum;
}

}  // namespace

std::complex<double> permanent(const Eigen::MatrixXcd& matrix) {
  if (matrix.rows() != matrix.cols()) throw ValidationError("permanent needs a square matrix");
  const int n = int(matrix.rows());
  if (n == 0) return 1.0;
  if (n > kPermanentCap) {
    std::ostringstream msg;
    msg << "permanent guarded at " << kPermanentCap << "x" << kPermanentCap << ", got " << n;
    throw CapExceeded(msg.str());
  }

  // Gray-code walk over non-empty column subsets, one row-sum update per step
  std::vector<cd> row_sums(n, cd(0.0, 0.0));
  cd total(0.0, 0.0);
  std::uint32_t gray_prev = 0;
  for (std::uint32_t k = 1; k < (1u << n); ++k) {
    std::uint32_t gray = k ^ (k >> 1);
    std::uint32_t changed = gray ^ gray_prev;
    int j = std::countr_zero(changed);
    double dir = (gray & changed) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) row_sums[i] += dir * matrix(i, j);
    gray_prev = gray;

    cd prod(1.0, 0.0);
    for (int i = 0; i < n; ++i) prod *= row_sums[i];
    total += (std::popcount(gray) % 2 == 0) ? prod : -prod;
  }
  return (n % 2 == 0) ? total : -total;
}

double output_probability(const Eigen::MatrixXcd& unitary, const fock::Occupation& input,
                          const fock::Occupation& output) {
  const int m = int(unitary.rows());
  if (unitary.cols() != m) throw ValidationError("interferometer matrix must be square");
  if (int(input.size()) != m || int(output.size()) != m)
    throw ValidationError("occupation length must match the mode count");
  validate_occupation(input, "input");
  validate_occupation(output, "output");
  const int n = total_photons(input);
  if (total_photons(output) != n)
    throw ValidationError("input and output photon totals differ");
  if (n == 0) return 1.0;

  Mat sub(n, n);
  int row = 0;
  for (int i = 0; i < m; ++i)
    for (int rep_r = 0; rep_r < output[i]; ++rep_r, ++row) {
      int col = 0;
      for (int j = 0; j < m; ++j)
        for (int rep_c = 0; rep_c < input[j]; ++rep_c, ++col) sub(row, col) = unitary(i, j);
    }

  double norm2 = std::norm(permanent(sub));
  return norm2 / (factorial_product(input) * factorial_product(output));
}

OutputDistribution full_distribution(const Eigen::MatrixXcd& unitary,
                                     const fock::Occupation& input,
                                     std::size_t enumeration_cap) {
  const int m = int(unitary.rows());
  if (unitary.cols() != m) throw ValidationError("interferometer matrix must be square");
  if (int(input.size()) != m) throw ValidationError("occupation length must match the mode count");
  validate_occupation(input, "input");
  const int n = total_photons(input);

  fock::Basis sector = fock::Basis::fixed_total(m, n, 0, enumeration_cap);
  std::vector<fock::BasisLabel> labels = sector.enumerate();
  std::vector<double> probs(labels.size(), 0.0);

  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      probs[i] = output_probability(unitary, input, labels[i].counts);
  };
  unsigned workers = std::min(std::thread::hardware_concurrency(), 8u);
  if (workers >= 2 && labels.size() >= 64) {
    std::vector<std::thread> pool;
    std::size_t chunk = (labels.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      std::size_t begin = w * chunk;
      std::size_t end = std::min(labels.size(), begin + chunk);
      if (begin < end) pool.emplace_back(fill, begin, end);
    }
    for (auto& t : pool) t.join();
  } else {
    fill(0, labels.size());
  }

  OutputDistribution dist{m, n, {}};
  for (std::size_t i = 0; i < labels.size(); ++i) dist.entries.emplace(labels[i].counts, probs[i]);
  double sum = 0.0;
  for (const auto& [outcome, p] : dist.entries) sum += p;
  if (std::abs(sum - 1.0) > 1e-9) throw InternalError("output distribution lost normalization");
  return dist;
}

OutputDistribution brute_force_distribution(const interferometer::ElementList& elements,
                                            const fock::Occupation& input) {
  validate_occupation(input, "input");
  const int m = int(input.size());
  const int n = total_photons(input);

  auto sector = std::make_shared<const fock::Basis>(fock::Basis::fixed_total(m, n));
  fock::State psi = fock::State::basis_state(sector, {input, 0u});
  for (const auto& element : elements) {
    if (const auto* bs = std::get_if<interferometer::BeamSplitter>(&element)) {
      double sign = bs->angle < 0.0 ? -1.0 : 1.0;
      psi = dynamics::evolve(dynamics::BeamSplitterRwa{bs->lower_mode, sign},
                             psi, std::abs(bs->angle))
                .state;
    } else {
      const auto& ps = std::get<interferometer::PhaseShifter>(element);
      double sign = ps.phase < 0.0 ? -1.0 : 1.0;
      psi = dynamics::evolve(dynamics::PhaseRotation{ps.mode, sign}, psi, std::abs(ps.phase))
                .state;
    }
  }

  OutputDistribution dist{m, n, {}};
  double sum = 0.0;
  for (const auto& label : sector->enumerate()) {
    double p = psi.probability(label);
    dist.entries.emplace(label.counts, p);
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InternalError("sector evolution lost normalization");
  return dist;
}

std::vector<fock::Occupation> sample(const OutputDistribution& distribution, std::uint64_t seed,
                                     std::size_t count) {
  check_normalized(distribution);
  std::vector<const fock::Occupation*> outcomes;
  std::vector<double> cumulative;
  outcomes.reserve(distribution.entries.size());
  cumulative.reserve(distribution.entries.size());
  double acc = 0.0;
  for (const auto& [outcome, p] : distribution.entries) {
    acc += std::max(p, 0.0);
    outcomes.push_back(&outcome);
    cumulative.push_back(acc);
  }
  if (outcomes.empty()) throw ValidationError("cannot sample an empty distribution");

  rng::Stream stream(seed);
  std::vector<fock::Occupation> draws;
  draws.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    double u = stream.uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    draws.push_back(*outcomes[std::size_t(it - cumulative.begin())]);
  }
  return draws;
}

ReadoutResult apply_readout(const fock::Occupation& true_outcome, const ReadoutModel& model,
                            rng::Stream& stream) {
  validate_occupation(true_outcome, "outcome");
  validate_model(model);

  if (const auto* swap = std::get_if<SwapPhotodetector>(&model)) {
    ReadoutResult res{fock::Occupation(true_outcome.size(), 0), false};
    for (std::size_t i = 0; i < true_outcome.size(); ++i) {
      res.reported[i] = true_outcome[i] > 0 ? 1 : 0;
      if (true_outcome[i] >= 2 && swap->post_select_bunching) res.rejected = true;
    }
    return res;
  }

  const auto& qnd = std::get<QndCounter>(model);
  ReadoutResult res{fock::Occupation(true_outcome.size(), 0), false};
  for (std::size_t i = 0; i < true_outcome.size(); ++i) {
    // candidates sweep upward; only the probe at the true shifted frequency
    // can respond, with probability eta per repetition
    int reported = qnd.max_n_probe + 1;
    for (int candidate = 0; candidate <= qnd.max_n_probe; ++candidate) {
      if (candidate != true_outcome[i]) continue;
      for (int rep = 0; rep < qnd.repetitions; ++rep) {
        if (stream.uniform() < qnd.eta) {
          reported = candidate;
          break;
        }
      }
      break;
    }
    res.reported[i] = reported;
  }
  return res;
}

ReadoutResult apply_readout(const fock::Occupation& true_outcome, const ReadoutModel& model,
                            std::uint64_t seed) {
  rng::Stream stream(seed);
  return apply_readout(true_outcome, model, stream);
}

OutputDistribution apply_loss(const OutputDistribution& distribution, double survival_p) {
  if (!(survival_p >= 0.0 && survival_p <= 1.0))
    throw ValidationError("survival probability must lie in [0, 1]");
  check_normalized(distribution);

  OutputDistribution lossy{distribution.mode_count, distribution.photon_count, {}};
  for (const auto& [outcome, p] : distribution.entries) {
    if (p == 0.0) {
      lossy.entries.try_emplace(outcome, 0.0);
      continue;
    }
    // odometer over all survivor patterns m <= outcome
    fock::Occupation kept(outcome.size(), 0);
    for (;;) {
      double weight = p;
      for (std::size_t i = 0; i < outcome.size(); ++i) {
        int n = outcome[i], k = kept[i];
        double binom = 1.0;
        for (int j = 0; j < k; ++j) binom = binom * double(n - j) / double(j + 1);
        weight *= binom * std::pow(survival_p, k) * std::pow(1.0 - survival_p, n - k);
      }
      if (weight != 0.0) lossy.entries[kept] += weight;

      std::size_t i = 0;
      while (i < kept.size() && kept[i] == outcome[i]) kept[i++] = 0;
      if (i == kept.size()) break;
      ++kept[i];
    }
  }
  return lossy;
}

std::vector<fock::Occupation> apply_loss(const std::vector<fock::Occupation>& samples,
                                         double survival_p, std::uint64_t seed) {
  if (!(survival_p >= 0.0 && survival_p <= 1.0))
    throw ValidationError("survival probability must lie in [0, 1]");
  rng::Stream stream(seed);
  std::vector<fock::Occupation> thinned = samples;
  for (auto& outcome : thinned) {
    validate_occupation(outcome, "sample");
    for (auto& n : outcome) {
      int kept = 0;
      for (int k = 0; k < n; ++k)
        if (stream.uniform() < survival_p) ++kept;
      n = kept;
    }
  }
  return thinned;
}

}  // namespace cqbs::sampler
