#include "cqbs/interferometer.hpp"

#include <cmath>
#include <complex>

#include "cqbs/constants.hpp"
#include "cqbs/errors.hpp"
#include "cqbs/rng.hpp"

namespace cqbs::interferometer {

using std::complex;
using constants::pi;
using constants::two_pi;

namespace {

constexpr complex<double> kI{0.0, 1.0};

double mod_two_pi(double x) {
  double y = std::fmod(x, two_pi);
  return y < 0 ? y + two_pi : y;
}

bool phase_is_trivial(double ph, double eps = 1e-12) {
  return ph < eps || two_pi - ph < eps;
}

void check_element(const Element& e, int modes) {
  if (const auto* bs = std::get_if<BeamSplitter>(&e)) {
    if (bs->lower_mode < 0 || bs->lower_mode + 1 >= modes)
      throw ValidationError("interferometer: beam splitter pair out of range");
  } else {
    const auto& ps = std::get<PhaseShifter>(e);
    if (ps.mode < 0 || ps.mode >= modes)
      throw ValidationError("interferometer: phase shifter mode out of range");
  }
}

// in-place right-multiplication V <- V * B(theta) on columns (j, j+1)
void apply_bs_columns(Eigen::MatrixXcd& V, int j, double theta) {
  double c = std::cos(theta), s = std::sin(theta);
  for (Eigen::Index r = 0; r < V.rows(); ++r) {
    complex<double> vj = V(r, j), vk = V(r, j + 1);
    V(r, j) = c * vj - kI * s * vk;
    V(r, j + 1) = -kI * s * vj + c * vk;
  }
}

void apply_ps_column(Eigen::MatrixXcd& V, int j, double phase) {
  V.col(j) *= std::exp(-kI * phase);
}

}  // namespace

Eigen::MatrixXcd haar_random(int modes, std::uint64_t seed) {
  if (modes < 1) throw ValidationError("interferometer: need at least one mode");
  rng::Stream stream(seed);
  Eigen::MatrixXcd A(modes, modes);
  for (int i = 0; i < modes; ++i)
    for (int j = 0; j < modes; ++j) A(i, j) = stream.complex_normal();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
  Eigen::MatrixXcd Q = qr.householderQ();
  Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
  // divide out the R diagonal phases, otherwise Q is not Haar
  for (int j = 0; j < modes; ++j) {
    complex<double> d = R(j, j);
    Q.col(j) *= d / std::abs(d);
  }
  return Q;
}

Eigen::MatrixXcd single_element_unitary(const Element& element, int modes) {
  if (modes < 1) throw ValidationError("interferometer: need at least one mode");
  check_element(element, modes);
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(modes, modes);
  if (const auto* bs = std::get_if<BeamSplitter>(&element)) {
    int i = bs->lower_mode;
    double c = std::cos(bs->angle), s = std::sin(bs->angle);
    U(i, i) = c;
    U(i, i + 1) = -kI * s;
    U(i + 1, i) = -kI * s;
    U(i + 1, i + 1) = c;
  } else {
    const auto& ps = std::get<PhaseShifter>(element);
    U(ps.mode, ps.mode) = std::exp(-kI * ps.phase);
  }
  return U;
}

Eigen::MatrixXcd elements_to_unitary(const ElementList& elements, int modes) {
  if (modes < 1) throw ValidationError("interferometer: need at least one mode");
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(modes, modes);
  // apply each element to the running product on the left, touching only the
  // affected rows; this keeps the whole recomposition O(K * modes)
  for (const Element& e : elements) {
    check_element(e, modes);
    if (const auto* bs = std::get_if<BeamSplitter>(&e)) {
      int i = bs->lower_mode;
      double c = std::cos(bs->angle), s = std::sin(bs->angle);
      for (Eigen::Index col = 0; col < modes; ++col) {
        complex<double> ui = U(i, col), uj = U(i + 1, col);
        U(i, col) = c * ui - kI * s * uj;
        U(i + 1, col) = -kI * s * ui + c * uj;
      }
    } else {
      const auto& ps = std::get<PhaseShifter>(e);
      U.row(ps.mode) *= std::exp(-kI * ps.phase);
    }
  }
  return U;
}

ElementList reck_decompose(const Eigen::MatrixXcd& unitary, double unitarity_tol) {
  const int M = static_cast<int>(unitary.rows());
  if (M < 1 || unitary.cols() != M)
    throw ValidationError("interferometer: matrix must be square and nonempty");
  double dev = (unitary.adjoint() * unitary - Eigen::MatrixXcd::Identity(M, M))
                   .cwiseAbs()
                   .maxCoeff();
  if (dev > unitarity_tol)
    throw ValidationError("interferometer: matrix is not unitary within tolerance");

  constexpr double kNullTol = 1e-14;
  Eigen::MatrixXcd V = unitary;

  // Right-multiplied primitives, in application order.  U * op_0 * op_1 * ...
  // ends up diagonal, so U = D * op_L^-1 * ... * op_0^-1 and the element list
  // is the op inverses in the same order followed by the diagonal phases.
  struct Op {
    bool is_bs;
    int target;
    double value;
  };
  std::vector<Op> ops;

  for (int r = M - 1; r >= 1; --r) {
    for (int j = 0; j < r; ++j) {
      complex<double> a = V(r, j), b = V(r, j + 1);
      if (std::abs(a) < kNullTol) continue;
      double theta, alpha;
      if (std::abs(b) < kNullTol) {
        theta = pi / 2;
        alpha = 0.0;
      } else {
        theta = std::atan2(std::abs(a), std::abs(b));
        alpha = std::arg(a) - std::arg(b) - pi / 2;
      }
      if (std::abs(alpha) > kNullTol) {
        apply_ps_column(V, j, alpha);
        ops.push_back({false, j, alpha});
      }
      apply_bs_columns(V, j, theta);
      ops.push_back({true, j, theta});
      V(r, j) = 0.0;  // nulled by construction; clamp the round-off
    }
  }

  ElementList out;
  out.reserve(3 * ops.size() + static_cast<std::size_t>(M));
  for (const Op& op : ops) {
    if (op.is_bs) {
      // B(theta)^-1 = P_i(pi) B(theta) P_i(pi) on the pair's lower mode
      out.push_back(PhaseShifter{op.target, pi});
      out.push_back(BeamSplitter{op.target, op.value});
      out.push_back(PhaseShifter{op.target, pi});
    } else {
      out.push_back(PhaseShifter{op.target, mod_two_pi(-op.value)});
    }
  }
  for (int j = 0; j < M; ++j) {
    // V is now diagonal with unit-modulus entries that the trailing shifters
    // must reproduce: exp(-i phase_j) = V_jj
    out.push_back(PhaseShifter{j, mod_two_pi(-std::arg(V(j, j)))});
  }
  return canonicalize(out);
}

ElementList canonicalize(const ElementList& elements) {
  constexpr double kEps = 1e-12;
  ElementList out;
  auto push_phase = [&](int mode, double phase) {
    phase = mod_two_pi(phase);
    if (!out.empty()) {
      if (auto* prev = std::get_if<PhaseShifter>(&out.back()); prev && prev->mode == mode) {
        phase = mod_two_pi(prev->phase + phase);
        out.pop_back();
      }
    }
    if (!phase_is_trivial(phase, kEps)) out.push_back(PhaseShifter{mode, phase});
  };

  for (const Element& e : elements) {
    if (const auto* ps = std::get_if<PhaseShifter>(&e)) {
      push_phase(ps->mode, ps->phase);
      continue;
    }
    BeamSplitter bs = std::get<BeamSplitter>(e);
    double a = mod_two_pi(bs.angle);
    // fold a directly trailing splitter on the same pair: equal generators,
    // so the angles just add
    if (!out.empty()) {
      if (auto* prev = std::get_if<BeamSplitter>(&out.back());
          prev && prev->lower_mode == bs.lower_mode) {
        a = mod_two_pi(prev->angle + a);
        out.pop_back();
      }
    }
    // angle folding: B(a+pi) = P_i(pi) P_j(pi) B(a) with the scalar pair of
    // pi phases commuting freely, and B(pi-a') reading right to left as
    // P_i(pi), B(a'), P_j(pi)
    bool wrap = a > pi;
    if (wrap) a -= pi;
    bool conj = a > pi / 2;
    if (conj) a = pi - a;
    push_phase(bs.lower_mode, (wrap ? pi : 0.0) + (conj ? pi : 0.0));
    push_phase(bs.lower_mode + 1, wrap ? pi : 0.0);
    if (a >= kEps) out.push_back(BeamSplitter{bs.lower_mode, a});
    push_phase(bs.lower_mode + 1, conj ? pi : 0.0);
  }
  return out;
}

int beam_splitter_count(const ElementList& elements) {
  int n = 0;
  for (const Element& e : elements)
    if (std::holds_alternative<BeamSplitter>(e)) ++n;
  return n;
}

}  // namespace cqbs::interferometer
