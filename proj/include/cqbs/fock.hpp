#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace cqbs::fock {

using Occupation = std::vector<int>;

// One basis ket: photon counts per mode plus an optional qubit bit pattern.
// Bit (qubit_slots-1-k) of `qubits` holds qubit k, so qubit 0 is the most
// significant bit of the pattern; bit value 1 means excited.
struct BasisLabel {
  Occupation counts;
  unsigned qubits = 0;
};

enum class Truncation { FixedTotal, PerModeCutoff };

// Enumerable truncated Fock basis over `modes` bosonic modes and
// `qubit_slots` two-level systems.
//
// Ordering is total and deterministic: the index splits as
//   index = qubit_pattern * bosonic_dimension + bosonic_rank
// (qubit bits most significant) and within a qubit block the occupation
// vectors run in descending lexicographic order, e.g. for FixedTotal(2) on
// three modes: (2,0,0), (1,1,0), (1,0,1), (0,2,0), (0,1,1), (0,0,2).
class Basis {
 public:
  static constexpr std::size_t default_dimension_cap = 4'000'000;

  static Basis fixed_total(int modes, int total_photons, int qubit_slots = 0,
                           std::size_t dimension_cap = default_dimension_cap);
  static Basis per_mode_cutoff(int modes, int max_per_mode, int qubit_slots = 0,
                               std::size_t dimension_cap = default_dimension_cap);

  int modes() const { return modes_; }
  int qubit_slots() const { return qubit_slots_; }
  Truncation truncation() const { return truncation_; }
  // total photon number (FixedTotal) or per-mode ceiling (PerModeCutoff)
  int truncation_value() const { return trunc_value_; }

  std::size_t dimension() const { return dimension_; }
  std::size_t bosonic_dimension() const { return bosonic_dim_; }

  // O(modes) combinatorial ranking; throws ValidationError on labels that are
  // outside this basis (wrong length, negative counts, wrong total, count
  // above cutoff, qubit bits beyond the slot count).
  std::size_t index_of(const BasisLabel& label) const;
  std::size_t index_of(const Occupation& counts, unsigned qubits = 0) const;
  BasisLabel label_at(std::size_t index) const;

  std::vector<BasisLabel> enumerate() const;

  bool operator==(const Basis& other) const;
  bool operator!=(const Basis& other) const { return !(*this == other); }

 private:
  Basis() = default;

  std::size_t bosonic_rank(const Occupation& counts) const;
  Occupation bosonic_label(std::size_t rank) const;
  unsigned long long binomial(int n, int k) const;

  int modes_ = 0;
  int qubit_slots_ = 0;
  Truncation truncation_ = Truncation::FixedTotal;
  int trunc_value_ = 0;
  std::size_t bosonic_dim_ = 0;
  std::size_t dimension_ = 0;
  std::vector<unsigned long long> binom_;  // (n_+1) x (k_+1) table, FixedTotal only
  int binom_rows_ = 0, binom_cols_ = 0;
};

using BasisPtr = std::shared_ptr<const Basis>;

// Immutable normalized-or-not amplitude vector over a shared basis.
class State {
 public:
  State(BasisPtr basis, Eigen::VectorXcd amplitudes);

  static State zero(BasisPtr basis);
  static State basis_state(BasisPtr basis, const BasisLabel& label);
  static State vacuum(BasisPtr basis);  // all modes empty, all qubits ground

  const Basis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const Eigen::VectorXcd& amplitudes() const { return amp_; }

  std::complex<double> amplitude(const BasisLabel& label) const;
  double probability(const BasisLabel& label) const;
  double norm() const { return amp_.norm(); }

 private:
  BasisPtr basis_;
  Eigen::VectorXcd amp_;
};

enum class Ladder { Create, Annihilate };

// apply_ladder drops any component pushed above a PerModeCutoff ceiling and
// reports the squared amplitude it removed.
struct LadderResult {
  State state;
  double leakage = 0.0;
};

// Only defined on PerModeCutoff bases; a ladder operator leaves a FixedTotal
// sector, so that combination throws ValidationError.
LadderResult apply_ladder(const State& state, int mode, Ladder kind);

}  // namespace cqbs::fock
