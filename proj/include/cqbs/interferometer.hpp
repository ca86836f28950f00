#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <variant>
#include <vector>

namespace cqbs::interferometer {

// Beam splitter on the adjacent pair (lower_mode, lower_mode+1):
//   [[cos a, -i sin a], [-i sin a, cos a]]
// i.e. exp(-i a (a†_i a_j + a†_j a_i)) restricted to one photon.
struct BeamSplitter {
  int lower_mode = 0;
  double angle = 0.0;
};

// Phase shifter multiplying mode `mode` by exp(-i phase).
struct PhaseShifter {
  int mode = 0;
  double phase = 0.0;
};

using Element = std::variant<BeamSplitter, PhaseShifter>;
using ElementList = std::vector<Element>;

// Haar-distributed unitary: QR of a complex Gaussian matrix with the R
// diagonal phases divided out. Deterministic per seed.
Eigen::MatrixXcd haar_random(int modes, std::uint64_t seed);

Eigen::MatrixXcd single_element_unitary(const Element& element, int modes);

// Ordered product with element 0 applied first (rightmost factor).
Eigen::MatrixXcd elements_to_unitary(const ElementList& elements, int modes);

// Triangular elimination over adjacent pairs only: Givens steps null the
// strictly lower triangle row by row from the bottom, residual diagonal
// phases come out as trailing per-mode phase shifters.  Beam splitter count
// is at most modes*(modes-1)/2.  Throws ValidationError when the input is
// not unitary to within `unitarity_tol` (max entry of U†U - I).
ElementList reck_decompose(const Eigen::MatrixXcd& unitary,
                           double unitarity_tol = 1e-8);

// Folds beam-splitter angles into [0, pi/2] and phases into [0, 2pi), merges
// adjacent same-target elements, and drops the ones that became identity.
// The recomposed unitary moves by no more than ~1e-12 in any entry.
ElementList canonicalize(const ElementList& elements);

int beam_splitter_count(const ElementList& elements);

}  // namespace cqbs::interferometer
