#include "cqbs/fock.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cqbs/errors.hpp"

namespace cqbs::fock {

namespace {

constexpr unsigned long long kSaturated = std::numeric_limits<unsigned long long>::max();

// saturating multiply, used only while sizing the basis
unsigned long long mul_sat(unsigned long long a, unsigned long long b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSaturated / b) return kSaturated;
  return a * b;
}

unsigned long long add_sat(unsigned long long a, unsigned long long b) {
  if (a > kSaturated - b) return kSaturated;
  return a + b;
}

}  // namespace

Basis Basis::fixed_total(int modes, int total_photons, int qubit_slots,
                         std::size_t dimension_cap) {
  if (modes < 1) throw ValidationError("fock: need at least one mode");
  if (total_photons < 0) throw ValidationError("fock: negative photon total");
  if (qubit_slots < 0 || qubit_slots > 20)
    throw ValidationError("fock: qubit slot count out of range");

  Basis b;
  b.modes_ = modes;
  b.qubit_slots_ = qubit_slots;
  b.truncation_ = Truncation::FixedTotal;
  b.trunc_value_ = total_photons;

  // Pascal table up to C(total+modes-1, *): covers every rank query later.
  b.binom_rows_ = total_photons + modes;
  b.binom_cols_ = b.binom_rows_;
  b.binom_.assign(static_cast<std::size_t>(b.binom_rows_) * b.binom_cols_, 0);
  for (int n = 0; n < b.binom_rows_; ++n) {
    for (int k = 0; k <= n && k < b.binom_cols_; ++k) {
      auto& cell = b.binom_[static_cast<std::size_t>(n) * b.binom_cols_ + k];
      if (k == 0 || k == n) {
        cell = 1;
      } else {
        cell = add_sat(b.binom_[static_cast<std::size_t>(n - 1) * b.binom_cols_ + k - 1],
                       b.binom_[static_cast<std::size_t>(n - 1) * b.binom_cols_ + k]);
      }
    }
  }

  unsigned long long bd = b.binomial(total_photons + modes - 1, total_photons);
  unsigned long long full = mul_sat(bd, 1ull << qubit_slots);
  if (full > dimension_cap) {
    std::ostringstream msg;
    msg << "fock: basis dimension " << full << " exceeds cap " << dimension_cap;
    throw CapExceeded(msg.str());
  }
  b.bosonic_dim_ = static_cast<std::size_t>(bd);
  b.dimension_ = static_cast<std::size_t>(full);
  return b;
}

Basis Basis::per_mode_cutoff(int modes, int max_per_mode, int qubit_slots,
                             std::size_t dimension_cap) {
  if (modes < 1) throw ValidationError("fock: need at least one mode");
  if (max_per_mode < 0) throw ValidationError("fock: negative per-mode cutoff");
  if (qubit_slots < 0 || qubit_slots > 20)
    throw ValidationError("fock: qubit slot count out of range");

  Basis b;
  b.modes_ = modes;
  b.qubit_slots_ = qubit_slots;
  b.truncation_ = Truncation::PerModeCutoff;
  b.trunc_value_ = max_per_mode;

  unsigned long long bd = 1;
  for (int i = 0; i < modes; ++i) bd = mul_sat(bd, static_cast<unsigned long long>(max_per_mode) + 1);
  unsigned long long full = mul_sat(bd, 1ull << qubit_slots);
  if (full > dimension_cap) {
    std::ostringstream msg;
    msg << "fock: basis dimension " << full << " exceeds cap " << dimension_cap;
    throw CapExceeded(msg.str());
  }
  b.bosonic_dim_ = static_cast<std::size_t>(bd);
  b.dimension_ = static_cast<std::size_t>(full);
  return b;
}

unsigned long long Basis::binomial(int n, int k) const {
  if (k < 0 || k > n || n < 0) return 0;
  if (n >= binom_rows_ || k >= binom_cols_) throw InternalError("fock: binomial table overrun");
  return binom_[static_cast<std::size_t>(n) * binom_cols_ + k];
}

std::size_t Basis::bosonic_rank(const Occupation& counts) const {
  if (truncation_ == Truncation::FixedTotal) {
    // Descending lexicographic rank: for each mode, count the completions
    // that place more photons here than this label does. The inner sum
    // telescopes to one binomial (hockey-stick identity).
    int remaining = trunc_value_;
    std::size_t rank = 0;
    for (int i = 0; i < modes_; ++i) {
      int n_i = counts[i];
      int m = modes_ - i - 1;  // modes to the right
      int t = remaining - n_i - 1;
      if (t >= 0) rank += static_cast<std::size_t>(binomial(t + m, m));
      remaining -= n_i;
    }
    return rank;
  }
  // PerModeCutoff: mixed-radix with digit (cutoff - n_i), so (cutoff,...)
  // comes first and the order stays descending lexicographic.
  std::size_t rank = 0;
  for (int i = 0; i < modes_; ++i) {
    rank = rank * static_cast<std::size_t>(trunc_value_ + 1) +
           static_cast<std::size_t>(trunc_value_ - counts[i]);
  }
  return rank;
}

Occupation Basis::bosonic_label(std::size_t rank) const {
  Occupation counts(static_cast<std::size_t>(modes_), 0);
  if (truncation_ == Truncation::FixedTotal) {
    int remaining = trunc_value_;
    for (int i = 0; i < modes_; ++i) {
      int m = modes_ - i - 1;
      if (m == 0) {
        counts[i] = remaining;
        break;
      }
      for (int k = remaining; k >= 0; --k) {
        unsigned long long block = binomial(remaining - k + m - 1, m - 1);
        if (rank < block) {
          counts[i] = k;
          remaining -= k;
          break;
        }
        rank -= static_cast<std::size_t>(block);
      }
    }
    return counts;
  }
  for (int i = modes_ - 1; i >= 0; --i) {
    auto digit = rank % static_cast<std::size_t>(trunc_value_ + 1);
    counts[i] = trunc_value_ - static_cast<int>(digit);
    rank /= static_cast<std::size_t>(trunc_value_ + 1);
  }
  return counts;
}

std::size_t Basis::index_of(const BasisLabel& label) const {
  if (static_cast<int>(label.counts.size()) != modes_)
    throw ValidationError("fock: occupation length does not match mode count");
  if (label.qubits >= (1u << qubit_slots_))
    throw ValidationError("fock: qubit pattern outside slot count");
  int total = 0;
  for (int i = 0; i < modes_; ++i) {
    int n = label.counts[i];
    if (n < 0) throw ValidationError("fock: negative occupation");
    if (truncation_ == Truncation::PerModeCutoff && n > trunc_value_)
      throw ValidationError("fock: occupation above per-mode cutoff");
    total += n;
  }
  if (truncation_ == Truncation::FixedTotal && total != trunc_value_)
    throw ValidationError("fock: occupation total does not match sector");
  return static_cast<std::size_t>(label.qubits) * bosonic_dim_ + bosonic_rank(label.counts);
}

std::size_t Basis::index_of(const Occupation& counts, unsigned qubits) const {
  return index_of(BasisLabel{counts, qubits});
}

BasisLabel Basis::label_at(std::size_t index) const {
  if (index >= dimension_) throw ValidationError("fock: index outside basis");
  BasisLabel label;
  label.qubits = static_cast<unsigned>(index / bosonic_dim_);
  label.counts = bosonic_label(index % bosonic_dim_);
  return label;
}

std::vector<BasisLabel> Basis::enumerate() const {
  std::vector<BasisLabel> out;
  out.reserve(dimension_);
  for (std::size_t i = 0; i < dimension_; ++i) out.push_back(label_at(i));
  return out;
}

bool Basis::operator==(const Basis& other) const {
  return modes_ == other.modes_ && qubit_slots_ == other.qubit_slots_ &&
         truncation_ == other.truncation_ && trunc_value_ == other.trunc_value_;
}

State::State(BasisPtr basis, Eigen::VectorXcd amplitudes)
    : basis_(std::move(basis)), amp_(std::move(amplitudes)) {
  if (!basis_) throw ValidationError("fock: null basis");
  if (static_cast<std::size_t>(amp_.size()) != basis_->dimension())
    throw ValidationError("fock: amplitude vector does not match basis dimension");
}

State State::zero(BasisPtr basis) {
  if (!basis) throw ValidationError("fock: null basis");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->dimension()));
  return State(std::move(basis), std::move(v));
}

State State::basis_state(BasisPtr basis, const BasisLabel& label) {
  if (!basis) throw ValidationError("fock: null basis");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->dimension()));
  v(static_cast<Eigen::Index>(basis->index_of(label))) = 1.0;
  return State(std::move(basis), std::move(v));
}

State State::vacuum(BasisPtr basis) {
  if (!basis) throw ValidationError("fock: null basis");
  if (basis->truncation() == Truncation::FixedTotal && basis->truncation_value() != 0)
    throw ValidationError("fock: vacuum is outside a nonzero FixedTotal sector");
  BasisLabel label{Occupation(static_cast<std::size_t>(basis->modes()), 0), 0};
  return basis_state(std::move(basis), label);
}

std::complex<double> State::amplitude(const BasisLabel& label) const {
  return amp_(static_cast<Eigen::Index>(basis_->index_of(label)));
}

double State::probability(const BasisLabel& label) const {
  return std::norm(amplitude(label));
}

LadderResult apply_ladder(const State& state, int mode, Ladder kind) {
  const Basis& basis = state.basis();
  if (basis.truncation() != Truncation::PerModeCutoff)
    throw ValidationError("fock: ladder operators leave a FixedTotal sector; use a PerModeCutoff basis");
  if (mode < 0 || mode >= basis.modes())
    throw ValidationError("fock: mode index out of range");

  int nmax = basis.truncation_value();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(state.amplitudes().size());
  double leakage = 0.0;
  for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
    std::complex<double> a = state.amplitudes()(static_cast<Eigen::Index>(idx));
    if (a == std::complex<double>(0.0, 0.0)) continue;
    BasisLabel label = basis.label_at(idx);
    int n = label.counts[mode];
    if (kind == Ladder::Create) {
      if (n == nmax) {
        leakage += std::norm(a);  // amplitude has nowhere to go above the cutoff
        continue;
      }
      label.counts[mode] = n + 1;
      out(static_cast<Eigen::Index>(basis.index_of(label))) += a * std::sqrt(double(n + 1));
    } else {
      if (n == 0) continue;  // annihilating vacuum vanishes exactly, no leakage
      label.counts[mode] = n - 1;
      out(static_cast<Eigen::Index>(basis.index_of(label))) += a * std::sqrt(double(n));
    }
  }
  return LadderResult{State(state.basis_ptr(), std::move(out)), leakage};
}

}  // namespace cqbs::fock
