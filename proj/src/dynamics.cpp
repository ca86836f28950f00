#include "cqbs/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "cqbs/constants.hpp"
#include "cqbs/errors.hpp"

namespace cqbs::dynamics {
namespace {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

constexpr std::size_t kDenseCap = 4096;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ValidationError(std::string(what) + " must be finite");
}

void require_mode(const fock::Basis& basis, int mode, const char* what) {
  if (mode < 0 || mode >= basis.modes())
    throw ValidationError(std::string(what) + " mode index out of range");
}

void require_pair(const fock::Basis& basis, int lower, const char* what) {
  if (lower < 0 || lower + 1 >= basis.modes())
    throw ValidationError(std::string(what) + " needs an adjacent mode pair inside the basis");
}

void require_qubit(const fock::Basis& basis, int qubit, const char* what) {
  if (qubit < 0 || qubit >= basis.qubit_slots())
    throw ValidationError(std::string(what) + " qubit index out of range");
}

void validate_spec(const HamiltonianSpec& spec, const fock::Basis& basis) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, JaynesCummings>) {
          require_mode(basis, s.mode, "jaynes-cummings");
          require_qubit(basis, s.qubit, "jaynes-cummings");
          require_finite(s.mode_freq, "mode_freq");
          require_finite(s.qubit_freq, "qubit_freq");
          require_finite(s.coupling, "coupling");
        } else if constexpr (std::is_same_v<T, Dispersive>) {
          require_mode(basis, s.mode, "dispersive");
          require_qubit(basis, s.qubit, "dispersive");
          require_finite(s.mode_freq, "mode_freq");
          require_finite(s.qubit_freq, "qubit_freq");
          require_finite(s.chi, "chi");
        } else if constexpr (std::is_same_v<T, BeamSplitterRwa>) {
          require_pair(basis, s.lower_mode, "beam-splitter");
          require_finite(s.coupling, "coupling");
        } else if constexpr (std::is_same_v<T, PhaseRotation>) {
          require_mode(basis, s.mode, "phase rotation");
          require_finite(s.rate, "rate");
        } else if constexpr (std::is_same_v<T, QuadratureCoupling>) {
          require_pair(basis, s.lower_mode, "quadrature coupling");
          require_finite(s.freq_a, "freq_a");
          require_finite(s.freq_b, "freq_b");
          require_finite(s.coupling_scale, "coupling_scale");
          require_finite(s.drive.dc, "drive dc");
          require_finite(s.drive.ac, "drive ac");
          require_finite(s.drive.frequency, "drive frequency");
        } else {
          require_pair(basis, s.lower_mode, "two-mode squeeze");
          require_finite(s.rate, "rate");
          require_finite(s.phase, "phase");
        }
      },
      spec);
}

std::vector<int> involved_modes(const HamiltonianSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::vector<int> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, JaynesCummings> || std::is_same_v<T, Dispersive>)
          return {s.mode};
        else if constexpr (std::is_same_v<T, PhaseRotation>)
          return {s.mode};
        else
          return {s.lower_mode, s.lower_mode + 1};
      },
      spec);
}

double quadrature_coupling_value(const QuadratureCoupling& s, double t) {
  double phi = s.drive.dc + s.drive.ac * std::cos(s.drive.frequency * t);
  return s.coupling_scale * std::cos(constants::two_pi * phi);
}

bool is_driven(const HamiltonianSpec& spec) {
  const auto* q = std::get_if<QuadratureCoupling>(&spec);
  return q && q->drive.ac != 0.0 && q->drive.frequency != 0.0;
}

// ---- local Hamiltonians in natural ordering (row = site0 * d1 + site1) ----

struct LocalOp {
  std::vector<Site> sites;
  Mat h;
};

Mat quadrature_matrix(int dim) {
  Mat x = Mat::Zero(dim, dim);
  for (int n = 0; n + 1 < dim; ++n) {
    x(n + 1, n) = std::sqrt(double(n + 1));
    x(n, n + 1) = std::sqrt(double(n + 1));
  }
  return x;
}

LocalOp local_op(const HamiltonianSpec& spec, const fock::Basis& basis, double t) {
  const int d = basis.truncation_value() + 1;
  return std::visit(
      [&](const auto& s) -> LocalOp {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, JaynesCummings>) {
          Mat h = Mat::Zero(2 * d, 2 * d);
          for (int n = 0; n < d; ++n) {
            h(n, n) = s.mode_freq * n - s.qubit_freq / 2.0;
            h(d + n, d + n) = s.mode_freq * n + s.qubit_freq / 2.0;
          }
          for (int n = 1; n < d; ++n) {
            cd v = s.coupling * std::sqrt(double(n));  // <e,n-1|H|g,n>
            h(d + n - 1, n) = v;
            h(n, d + n - 1) = std::conj(v);
          }
          return {{{Site::Kind::Qubit, s.qubit}, {Site::Kind::Mode, s.mode}}, std::move(h)};
        } else if constexpr (std::is_same_v<T, Dispersive>) {
          Mat h = Mat::Zero(2 * d, 2 * d);
          for (int n = 0; n < d; ++n) {
            h(n, n) = (s.mode_freq + s.chi) * n - (s.qubit_freq - s.chi) / 2.0;
            h(d + n, d + n) = (s.mode_freq - s.chi) * n + (s.qubit_freq - s.chi) / 2.0;
          }
          return {{{Site::Kind::Qubit, s.qubit}, {Site::Kind::Mode, s.mode}}, std::move(h)};
        } else if constexpr (std::is_same_v<T, BeamSplitterRwa>) {
          Mat h = Mat::Zero(d * d, d * d);
          for (int n1 = 0; n1 + 1 < d; ++n1)
            for (int n2 = 1; n2 < d; ++n2) {
              double v = s.coupling * std::sqrt(double(n1 + 1) * double(n2));
              h((n1 + 1) * d + (n2 - 1), n1 * d + n2) = v;
              h(n1 * d + n2, (n1 + 1) * d + (n2 - 1)) = v;
            }
          return {{{Site::Kind::Mode, s.lower_mode}, {Site::Kind::Mode, s.lower_mode + 1}},
                  std::move(h)};
        } else if constexpr (std::is_same_v<T, PhaseRotation>) {
          Mat h = Mat::Zero(d, d);
          for (int n = 0; n < d; ++n) h(n, n) = s.rate * n;
          return {{{Site::Kind::Mode, s.mode}}, std::move(h)};
        } else if constexpr (std::is_same_v<T, QuadratureCoupling>) {
          Mat h = Mat::Zero(d * d, d * d);
          for (int n1 = 0; n1 < d; ++n1)
            for (int n2 = 0; n2 < d; ++n2)
              h(n1 * d + n2, n1 * d + n2) = s.freq_a * n1 + s.freq_b * n2;
          Mat x = quadrature_matrix(d);
          double g = quadrature_coupling_value(s, t);
          for (int n1 = 0; n1 < d; ++n1)
            for (int m1 = 0; m1 < d; ++m1) {
              if (x(n1, m1) == 0.0) continue;
              for (int n2 = 0; n2 < d; ++n2)
                for (int m2 = 0; m2 < d; ++m2) {
                  if (x(n2, m2) == 0.0) continue;
                  h(n1 * d + n2, m1 * d + m2) += g * x(n1, m1) * x(n2, m2);
                }
            }
          return {{{Site::Kind::Mode, s.lower_mode}, {Site::Kind::Mode, s.lower_mode + 1}},
                  std::move(h)};
        } else {
          Mat h = Mat::Zero(d * d, d * d);
          cd v0 = s.rate * std::exp(cd(0.0, s.phase));
          for (int n1 = 0; n1 + 1 < d; ++n1)
            for (int n2 = 0; n2 + 1 < d; ++n2) {
              cd v = v0 * std::sqrt(double(n1 + 1) * double(n2 + 1));
              h((n1 + 1) * d + (n2 + 1), n1 * d + n2) = v;
              h(n1 * d + n2, (n1 + 1) * d + (n2 + 1)) = std::conj(v);
            }
          return {{{Site::Kind::Mode, s.lower_mode}, {Site::Kind::Mode, s.lower_mode + 1}},
                  std::move(h)};
        }
      },
      spec);
}

// ---- flat-index geometry of a site subset on a PerModeCutoff basis ----

struct Axis {
  std::size_t stride = 1;
  int size = 0;
  bool flip = false;  // stored digit counts down from the cutoff on mode axes
};

struct LocalFrame {
  std::vector<Axis> axes;
  std::vector<int> perm;             // digit config -> natural config
  std::vector<std::size_t> offsets;  // digit config -> flat-index offset
  std::vector<std::size_t> bases;    // flat indices with every covered digit zero
  int local_dim = 1;
};

Axis axis_of(const fock::Basis& basis, const Site& site) {
  if (site.kind == Site::Kind::Mode) {
    require_mode(basis, site.index, "local operator");
    std::size_t stride = 1;
    for (int j = site.index + 1; j < basis.modes(); ++j)
      stride *= std::size_t(basis.truncation_value()) + 1;
    return {stride, basis.truncation_value() + 1, true};
  }
  require_qubit(basis, site.index, "local operator");
  std::size_t stride = basis.bosonic_dimension();
  for (int j = site.index + 1; j < basis.qubit_slots(); ++j) stride *= 2;
  return {stride, 2, false};
}

LocalFrame make_frame(const fock::Basis& basis, const std::vector<Site>& sites) {
  if (basis.truncation() != fock::Truncation::PerModeCutoff)
    throw ValidationError("local operators require a per-mode cutoff basis");
  if (sites.empty() || sites.size() > 2)
    throw ValidationError("local operators act on one or two sites");
  if (sites.size() == 2 && sites[0].kind == sites[1].kind && sites[0].index == sites[1].index)
    throw ValidationError("local operator sites must be distinct");

  LocalFrame f;
  for (const auto& s : sites) f.axes.push_back(axis_of(basis, s));
  for (const auto& a : f.axes) f.local_dim *= a.size;

  f.perm.resize(f.local_dim);
  f.offsets.resize(f.local_dim);
  if (f.axes.size() == 1) {
    const Axis& a = f.axes[0];
    for (int v = 0; v < a.size; ++v) {
      f.perm[v] = a.flip ? a.size - 1 - v : v;
      f.offsets[v] = std::size_t(v) * a.stride;
    }
  } else {
    const Axis &a0 = f.axes[0], &a1 = f.axes[1];
    for (int v0 = 0; v0 < a0.size; ++v0)
      for (int v1 = 0; v1 < a1.size; ++v1) {
        int c = v0 * a1.size + v1;
        int n0 = a0.flip ? a0.size - 1 - v0 : v0;
        int n1 = a1.flip ? a1.size - 1 - v1 : v1;
        f.perm[c] = n0 * a1.size + n1;
        f.offsets[c] = std::size_t(v0) * a0.stride + std::size_t(v1) * a1.stride;
      }
  }

  f.bases.reserve(basis.dimension() / std::size_t(f.local_dim));
  for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
    bool base = true;
    for (const auto& a : f.axes)
      if ((idx / a.stride) % std::size_t(a.size) != 0) {
        base = false;
        break;
      }
    if (base) f.bases.push_back(idx);
  }
  return f;
}

Mat to_digit_order(const Mat& natural, const LocalFrame& f) {
  Mat out(f.local_dim, f.local_dim);
  for (int p = 0; p < f.local_dim; ++p)
    for (int q = 0; q < f.local_dim; ++q) out(p, q) = natural(f.perm[p], f.perm[q]);
  return out;
}

// one dense block application per base; indices (base, config) tile the space
Vec apply_blocks(const Vec& in, const LocalFrame& f, const Mat& digit_op) {
  Vec out(in.size());
  Vec y(f.local_dim), z(f.local_dim);
  for (std::size_t base : f.bases) {
    for (int c = 0; c < f.local_dim; ++c) y(c) = in(Eigen::Index(base + f.offsets[c]));
    z.noalias() = digit_op * y;
    for (int c = 0; c < f.local_dim; ++c) out(Eigen::Index(base + f.offsets[c])) = z(c);
  }
  return out;
}

// ---- dense builders ----

Mat dense_fixed_total(const HamiltonianSpec& spec, const fock::Basis& basis) {
  const std::size_t dim = basis.dimension();
  Mat h = Mat::Zero(Eigen::Index(dim), Eigen::Index(dim));
  if (const auto* bs = std::get_if<BeamSplitterRwa>(&spec)) {
    const int i = bs->lower_mode, j = bs->lower_mode + 1;
    for (std::size_t idx = 0; idx < dim; ++idx) {
      fock::BasisLabel label = basis.label_at(idx);
      if (label.counts[j] > 0) {
        fock::Occupation to = label.counts;
        --to[j];
        ++to[i];
        double v = bs->coupling * std::sqrt(double(to[i]) * double(label.counts[j]));
        h(Eigen::Index(basis.index_of(to, label.qubits)), Eigen::Index(idx)) += v;
      }
      if (label.counts[i] > 0) {
        fock::Occupation to = label.counts;
        --to[i];
        ++to[j];
        double v = bs->coupling * std::sqrt(double(to[j]) * double(label.counts[i]));
        h(Eigen::Index(basis.index_of(to, label.qubits)), Eigen::Index(idx)) += v;
      }
    }
    return h;
  }
  if (const auto* ph = std::get_if<PhaseRotation>(&spec)) {
    for (std::size_t idx = 0; idx < dim; ++idx)
      h(Eigen::Index(idx), Eigen::Index(idx)) = ph->rate * basis.label_at(idx).counts[ph->mode];
    return h;
  }
  if (const auto* dp = std::get_if<Dispersive>(&spec)) {
    const int shift = basis.qubit_slots() - 1 - dp->qubit;
    for (std::size_t idx = 0; idx < dim; ++idx) {
      fock::BasisLabel label = basis.label_at(idx);
      double sz = ((label.qubits >> shift) & 1u) ? 1.0 : -1.0;
      h(Eigen::Index(idx), Eigen::Index(idx)) =
          (dp->mode_freq - dp->chi * sz) * label.counts[dp->mode] +
          0.5 * (dp->qubit_freq - dp->chi) * sz;
    }
    return h;
  }
  throw ValidationError("interaction does not conserve the photon total; use a per-mode cutoff basis");
}

Vec spectral_propagate(const Mat& h, const Vec& psi, double duration) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success) throw InternalError("eigendecomposition failed");
  Vec c = es.eigenvectors().adjoint() * psi;
  for (Eigen::Index k = 0; k < c.size(); ++k)
    c(k) *= std::exp(cd(0.0, -es.eigenvalues()(k) * duration));
  return es.eigenvectors() * c;
}

// exp(-i H dt) psi summed until the series term vanishes relative to the result
Vec expm_apply(const Vec& psi, const LocalFrame& f, const Mat& digit_h, double dt) {
  Vec out = psi;
  Vec term = psi;
  const cd factor(0.0, -dt);
  for (int k = 1; k <= 80; ++k) {
    term = apply_blocks(term, f, digit_h);
    term *= factor / double(k);
    out += term;
    if (term.norm() <= 1e-15 * out.norm()) return out;
  }
  throw InternalError("propagator series did not converge; step too large");
}

Vec run_midpoint(Vec psi, const LocalFrame& f, const Mat& h_static, const Mat& h_drive,
                 const QuadratureCoupling& s, double duration, long steps) {
  const double dt = duration / double(steps);
  Mat h_step(h_static.rows(), h_static.cols());
  for (long k = 0; k < steps; ++k) {
    double g = quadrature_coupling_value(s, (double(k) + 0.5) * dt);
    h_step.noalias() = h_static + g * h_drive;
    psi = expm_apply(psi, f, h_step, dt);
  }
  return psi;
}

EvolutionResult evolve_driven(const QuadratureCoupling& s, const fock::State& state,
                              double duration, const EvolveOptions& options) {
  const fock::Basis& basis = state.basis();
  if (basis.truncation() != fock::Truncation::PerModeCutoff)
    throw ValidationError("a driven coupler mixes photon-number sectors; use a per-mode cutoff basis");

  const int d = basis.truncation_value() + 1;
  std::vector<Site> sites{{Site::Kind::Mode, s.lower_mode}, {Site::Kind::Mode, s.lower_mode + 1}};
  LocalFrame frame = make_frame(basis, sites);

  Mat h_static = Mat::Zero(d * d, d * d);
  for (int n1 = 0; n1 < d; ++n1)
    for (int n2 = 0; n2 < d; ++n2)
      h_static(n1 * d + n2, n1 * d + n2) = s.freq_a * n1 + s.freq_b * n2;
  Mat x = quadrature_matrix(d);
  Mat h_drive = Mat::Zero(d * d, d * d);
  for (int n1 = 0; n1 < d; ++n1)
    for (int m1 = 0; m1 < d; ++m1) {
      if (x(n1, m1) == 0.0) continue;
      for (int n2 = 0; n2 < d; ++n2)
        for (int m2 = 0; m2 < d; ++m2) {
          if (x(n2, m2) == 0.0) continue;
          h_drive(n1 * d + n2, m1 * d + m2) = x(n1, m1) * x(n2, m2);
        }
    }
  h_static = to_digit_order(h_static, frame);
  h_drive = to_digit_order(h_drive, frame);

  auto inf_norm = [](const Mat& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); };
  double bound = inf_norm(h_static) + std::abs(s.coupling_scale) * inf_norm(h_drive);
  double cycles = duration * std::abs(s.drive.frequency) / constants::two_pi;
  long steps = std::max<long>({64, long(std::ceil(cycles * 16.0)), long(std::ceil(duration * bound))});
  if (steps > options.max_steps) throw CapExceeded("driven evolution needs more steps than max_steps");

  Vec prev = run_midpoint(state.amplitudes(), frame, h_static, h_drive, s, duration, steps);
  for (;;) {
    long next = steps * 2;
    if (next > options.max_steps)
      throw CapExceeded("step doubling exceeded max_steps before reaching step_tolerance");
    Vec cur = run_midpoint(state.amplitudes(), frame, h_static, h_drive, s, duration, next);
    double diff = (cur - prev).cwiseAbs().maxCoeff();
    steps = next;
    if (diff < options.step_tolerance) {
      fock::State out(state.basis_ptr(), std::move(cur));
      double leak = cutoff_population(out, {s.lower_mode, s.lower_mode + 1});
      return {std::move(out), leak, steps};
    }
    prev = std::move(cur);
  }
}

}  // namespace

Eigen::MatrixXcd build_hamiltonian(const HamiltonianSpec& spec, const fock::Basis& basis,
                                   double t) {
  validate_spec(spec, basis);
  if (basis.dimension() > kDenseCap)
    throw CapExceeded("dense Hamiltonian capped at 4096 basis states");
  if (basis.truncation() == fock::Truncation::FixedTotal) return dense_fixed_total(spec, basis);

  LocalOp op = local_op(spec, basis, t);
  LocalFrame frame = make_frame(basis, op.sites);
  Mat digit_h = to_digit_order(op.h, frame);
  Mat h = Mat::Zero(Eigen::Index(basis.dimension()), Eigen::Index(basis.dimension()));
  for (std::size_t base : frame.bases)
    for (int p = 0; p < frame.local_dim; ++p)
      for (int q = 0; q < frame.local_dim; ++q)
        h(Eigen::Index(base + frame.offsets[p]), Eigen::Index(base + frame.offsets[q])) =
            digit_h(p, q);
  return h;
}

Eigen::MatrixXcd hermitian_propagator(const Eigen::MatrixXcd& hamiltonian, double t) {
  if (hamiltonian.rows() != hamiltonian.cols())
    throw ValidationError("propagator needs a square matrix");
  double scale = std::max(1.0, hamiltonian.cwiseAbs().maxCoeff());
  if ((hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw ValidationError("propagator needs a Hermitian matrix");
  Eigen::SelfAdjointEigenSolver<Mat> es(hamiltonian);
  if (es.info() != Eigen::Success) throw InternalError("eigendecomposition failed");
  Vec phases(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < phases.size(); ++k)
    phases(k) = std::exp(cd(0.0, -es.eigenvalues()(k) * t));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

fock::State apply_local_unitary(const fock::State& state, const std::vector<Site>& sites,
                                const Eigen::MatrixXcd& local_unitary) {
  LocalFrame frame = make_frame(state.basis(), sites);
  if (local_unitary.rows() != frame.local_dim || local_unitary.cols() != frame.local_dim)
    throw ValidationError("local unitary dimension does not match the site subspace");
  Mat digit_u = to_digit_order(local_unitary, frame);
  return fock::State(state.basis_ptr(), apply_blocks(state.amplitudes(), frame, digit_u));
}

double cutoff_population(const fock::State& state, const std::vector<int>& modes) {
  const fock::Basis& basis = state.basis();
  if (basis.truncation() != fock::Truncation::PerModeCutoff) return 0.0;
  for (int m : modes) require_mode(basis, m, "cutoff population");
  const int top = basis.truncation_value();
  double pop = 0.0;
  for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
    fock::BasisLabel label = basis.label_at(idx);
    for (int m : modes)
      if (label.counts[m] == top) {
        pop += std::norm(state.amplitudes()(Eigen::Index(idx)));
        break;
      }
  }
  return pop;
}

EvolutionResult evolve(const HamiltonianSpec& spec, const fock::State& state, double duration,
                       const EvolveOptions& options) {
  const fock::Basis& basis = state.basis();
  validate_spec(spec, basis);
  if (!std::isfinite(duration) || duration < 0.0)
    throw ValidationError("duration must be finite and non-negative");

  if (is_driven(spec)) return evolve_driven(std::get<QuadratureCoupling>(spec), state, duration, options);

  if (basis.truncation() == fock::Truncation::PerModeCutoff) {
    LocalOp op = local_op(spec, basis, 0.0);
    Mat u = hermitian_propagator(op.h, duration);
    fock::State out = apply_local_unitary(state, op.sites, u);
    double leak = cutoff_population(out, involved_modes(spec));
    return {std::move(out), leak, 1};
  }

  if (basis.dimension() > kDenseCap)
    throw CapExceeded("dense evolution capped at 4096 basis states");
  Mat h = dense_fixed_total(spec, basis);
  return {fock::State(state.basis_ptr(), spectral_propagate(h, state.amplitudes(), duration)),
          0.0, 1};
}

// ---- named analyses ----

JcLoadResult jc_load(double coupling, double mode_freq, double detuning, bool start_excited,
                     int cutoff) {
  require_finite(coupling, "coupling");
  require_finite(mode_freq, "mode_freq");
  require_finite(detuning, "detuning");
  if (coupling <= 0.0) throw ValidationError("coupling must be positive");
  if (cutoff < 1) throw ValidationError("cutoff must be at least 1");

  auto basis = std::make_shared<const fock::Basis>(fock::Basis::per_mode_cutoff(1, cutoff, 1));
  HamiltonianSpec spec =
      JaynesCummings{0, 0, mode_freq, mode_freq + detuning, coupling};
  Mat h = build_hamiltonian(spec, *basis);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success) throw InternalError("eigendecomposition failed");

  fock::State psi0 =
      fock::State::basis_state(basis, {{0}, start_excited ? 1u : 0u});
  Vec c0 = es.eigenvectors().adjoint() * psi0.amplitudes();
  const Eigen::Index target = Eigen::Index(basis->index_of({1}, 0u));
  auto transfer = [&](double t) {
    cd amp = 0.0;
    for (Eigen::Index k = 0; k < c0.size(); ++k)
      amp += es.eigenvectors()(target, k) * std::exp(cd(0.0, -es.eigenvalues()(k) * t)) * c0(k);
    return std::norm(amp);
  };

  const double rabi = std::sqrt(coupling * coupling + 0.25 * detuning * detuning);
  const double window = 1.2 * constants::pi / rabi;
  const int samples = 4096;
  double best_t = 0.0, best_p = transfer(0.0);
  for (int k = 1; k <= samples; ++k) {
    double t = window * double(k) / double(samples);
    double p = transfer(t);
    if (p > best_p) {
      best_p = p;
      best_t = t;
    }
  }
  double lo = std::max(0.0, best_t - 2.0 * window / samples);
  double hi = best_t + 2.0 * window / samples;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
  double fa = transfer(a), fb = transfer(b);
  for (int it = 0; it < 90; ++it) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + gr * (hi - lo);
      fb = transfer(b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - gr * (hi - lo);
      fa = transfer(a);
    }
  }
  best_t = 0.5 * (lo + hi);
  best_p = transfer(best_t);
  if (detuning == 0.0 && start_excited && best_p < 1.0 - 1e-10)
    throw InternalError("resonant transfer fell below 1 - 1e-10");

  Vec ct(c0.size());
  for (Eigen::Index k = 0; k < c0.size(); ++k)
    ct(k) = std::exp(cd(0.0, -es.eigenvalues()(k) * best_t)) * c0(k);
  fock::State at_best(basis, es.eigenvectors() * ct);
  double leak = cutoff_population(at_best, {0});
  return {{std::move(at_best), leak, 1}, best_t, best_p};
}

double dispersive_phase_check(double coupling, double detuning, double duration,
                              double mode_freq) {
  require_finite(coupling, "coupling");
  require_finite(detuning, "detuning");
  require_finite(duration, "duration");
  if (coupling <= 0.0 || detuning == 0.0)
    throw ValidationError("needs positive coupling and nonzero detuning");
  if (duration < 0.0) throw ValidationError("duration must be nonnegative");
  if (std::abs(coupling / detuning) >= 0.2)
    throw ValidationError("outside the dispersive regime: require |g/Delta| < 0.2");

  const double chi = coupling * coupling / detuning;
  const double expected = 2.0 * chi * duration;
  auto basis = std::make_shared<const fock::Basis>(fock::Basis::per_mode_cutoff(1, 4, 1));
  HamiltonianSpec spec = JaynesCummings{0, 0, mode_freq, mode_freq + detuning, coupling};
  Mat u = hermitian_propagator(build_hamiltonian(spec, *basis), duration);

  auto diag = [&](unsigned bit, int n) {
    Eigen::Index i = Eigen::Index(basis->index_of({n}, bit));
    return u(i, i);
  };
  cd loop = diag(1u, 1) * std::conj(diag(1u, 0)) * std::conj(diag(0u, 1)) * diag(0u, 0);
  double measured = std::arg(loop);
  return std::abs(std::arg(std::exp(cd(0.0, measured - expected))));
}

RwaCheckResult rwa_beam_splitter_check(double coupling, double mode_freq, double theta,
                                       int cutoff) {
  require_finite(coupling, "coupling");
  require_finite(mode_freq, "mode_freq");
  require_finite(theta, "theta");
  if (coupling < 0.0 || mode_freq <= 0.0)
    throw ValidationError("needs nonnegative coupling and positive mode frequency");
  if (cutoff < 2) throw ValidationError("cutoff must be at least 2");
  if (coupling == 0.0) return {1.0, 0.0};

  auto basis = std::make_shared<const fock::Basis>(fock::Basis::per_mode_cutoff(2, cutoff));
  fock::State psi0 = fock::State::basis_state(basis, {{1, 0}, 0u});
  const double duration = theta / coupling;

  HamiltonianSpec full = QuadratureCoupling{0, mode_freq, mode_freq, coupling, {}};
  EvolutionResult lab = evolve(full, psi0, duration);
  if (lab.truncation_leakage > 1e-6)
    throw ValidationError("cutoff too small: lab-frame leakage above 1e-6");

  Vec rot = lab.state.amplitudes();
  for (std::size_t idx = 0; idx < basis->dimension(); ++idx) {
    fock::BasisLabel label = basis->label_at(idx);
    int total = label.counts[0] + label.counts[1];
    rot(Eigen::Index(idx)) *= std::exp(cd(0.0, mode_freq * duration * total));
  }

  HamiltonianSpec eff = BeamSplitterRwa{0, coupling};
  fock::State ideal = evolve(eff, psi0, duration).state;
  double fid = std::norm(ideal.amplitudes().dot(rot));
  return {fid, lab.truncation_leakage};
}

SqueezeEffective squeeze_effective(double r, int cutoff) {
  require_finite(r, "squeeze parameter");
  if (r <= 0.0) throw ValidationError("squeeze parameter must be positive");
  if (cutoff < 2) throw ValidationError("cutoff must be at least 2");
  double th = std::tanh(r);
  if (std::pow(th, 2.0 * (cutoff + 1)) > 1e-8)
    throw ValidationError("cutoff too small to hold the squeezed ladder");

  auto basis = std::make_shared<const fock::Basis>(fock::Basis::per_mode_cutoff(2, cutoff));
  fock::State vac = fock::State::vacuum(basis);
  HamiltonianSpec spec = TwoModeSqueeze{0, 1.0, 0.0};
  fock::State out = evolve(spec, vac, r).state;

  double ch2 = std::cosh(r) * std::cosh(r);
  double p00 = out.probability({{0, 0}, 0u});
  double p11 = out.probability({{1, 1}, 0u});
  return {std::move(out), p00, p11, 1.0 / ch2, th * th / ch2};
}

SqueezeFullRun squeeze_full_drive(double r, double modulation_depth, int cycles, int cutoff,
                                  const EvolveOptions& options) {
  require_finite(r, "squeeze parameter");
  require_finite(modulation_depth, "modulation depth");
  if (r <= 0.0) throw ValidationError("squeeze parameter must be positive");
  if (cycles < 1) throw ValidationError("cycle count must be at least 1");
  if (cutoff < 2) throw ValidationError("cutoff must be at least 2");
  double j1 = std::cyl_bessel_j(1, modulation_depth);
  if (std::abs(j1) < 1e-6)
    throw ValidationError("modulation depth has no first-harmonic weight to calibrate against");

  // resonators at unit frequency, drive at the pair sum frequency, whole
  // number of drive cycles so micromotion closes
  const double duration = constants::pi * double(cycles);
  const double g_eff = r / duration;
  const double scale = g_eff / j1;
  QuadratureCoupling spec{0, 1.0, 1.0, scale,
                          {0.25, modulation_depth / constants::two_pi, 2.0}};

  auto basis = std::make_shared<const fock::Basis>(fock::Basis::per_mode_cutoff(2, cutoff));
  fock::State vac = fock::State::vacuum(basis);
  EvolutionResult run = evolve(HamiltonianSpec(spec), vac, duration, options);

  double th = std::tanh(r);
  double ch2 = std::cosh(r) * std::cosh(r);
  SqueezeFullRun res;
  res.coupling_ratio = scale;  // resonator frequency is 1 in these units
  res.err_p00 = std::abs(run.state.probability({{0, 0}, 0u}) - 1.0 / ch2);
  res.err_p11 = std::abs(run.state.probability({{1, 1}, 0u}) - th * th / ch2);
  res.steps = run.steps;
  return res;
}

SqueezingReport flux_modulated_squeezing(double g_bs, double duration, int cutoff,
                                         int base_cycles, int run_count) {
  require_finite(g_bs, "coupling");
  require_finite(duration, "duration");
  if (g_bs <= 0.0 || duration <= 0.0) throw ValidationError("coupling and duration must be positive");
  if (run_count < 1) throw ValidationError("run count must be at least 1");

  const double r = g_bs * duration;
  SqueezingReport report{squeeze_effective(r, cutoff), {}};
  for (int k = 0; k < run_count; ++k)
    report.runs.push_back(squeeze_full_drive(r, 1.0, base_cycles << k, cutoff));
  return report;
}

}  // namespace cqbs::dynamics
