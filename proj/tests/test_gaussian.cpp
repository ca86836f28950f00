#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <map>
#include <memory>

#include "cqbs/constants.hpp"
#include "cqbs/dynamics.hpp"
#include "cqbs/errors.hpp"
#include "cqbs/fock.hpp"
#include "cqbs/gaussian.hpp"
#include "cqbs/sampler.hpp"

using namespace cqbs;
using namespace cqbs::gaussian;
namespace itf = cqbs::interferometer;
using fock::Basis;
using fock::State;
using cd = std::complex<double>;

namespace {
const double kPi = constants::pi;

fock::BasisPtr pmc(int modes, int cutoff) {
  return std::make_shared<const Basis>(Basis::per_mode_cutoff(modes, cutoff));
}

double poisson(double mean, int n) {
  double p = std::exp(-mean);
  for (int k = 1; k <= n; ++k) p *= mean / k;
  return p;
}

std::map<int, double> total_photon_histogram(const State& state) {
  std::map<int, double> hist;
  for (std::size_t idx = 0; idx < state.basis().dimension(); ++idx) {
    int total = 0;
    for (int n : state.basis().label_at(idx).counts) total += n;
    hist[total] += std::norm(state.amplitudes()(Eigen::Index(idx)));
  }
  return hist;
}
}  // namespace

TEST_CASE("displacement matrix matches the exponentiated generator") {
  cd alpha(0.3, -0.2);
  int dim = 14;
  Eigen::MatrixXcd closed = displacement_matrix(alpha, dim);

  Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n + 1 < dim; ++n) {
    gen(n + 1, n) = cd(0.0, 1.0) * alpha * std::sqrt(double(n + 1));
    gen(n, n + 1) = std::conj(gen(n + 1, n));
  }
  Eigen::MatrixXcd exact = dynamics::hermitian_propagator(gen, 1.0);
  // far from the truncation edge the two constructions agree
  CHECK((closed.block(0, 0, 7, 7) - exact.block(0, 0, 7, 7)).cwiseAbs().maxCoeff() < 1e-9);

  Eigen::MatrixXcd zero = displacement_matrix(cd(0.0, 0.0), 5);
  CHECK((zero - Eigen::MatrixXcd::Identity(5, 5)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coherent preparation reproduces Poisson statistics") {
  GaussianPrep prep{{cd(1.0, 0.0)}, {}};
  State state = prepare_gaussian(prep, pmc(1, 12));
  for (int n = 0; n <= 4; ++n)
    CHECK(state.probability({{n}, 0u}) == doctest::Approx(poisson(1.0, n)).epsilon(1e-6));
  CHECK(state.probability({{0}, 0u}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-7));
  CHECK(mean_photon_number(state) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(parity_expectation(state, 0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-5));
}

TEST_CASE("trivial preparations and parities") {
  GaussianPrep nothing{{cd(0.0, 0.0), cd(0.0, 0.0)}, {}};
  State vac = prepare_gaussian(nothing, pmc(2, 3));
  CHECK(vac.probability({{0, 0}, 0u}) == doctest::Approx(1.0));
  CHECK(parity_expectation(vac, 0) == doctest::Approx(1.0));
  CHECK(parity_expectation(vac, 1) == doctest::Approx(1.0));

  State one = State::basis_state(pmc(1, 3), {{1}, 0u});
  CHECK(parity_expectation(one, 0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(parity_expectation(one, 2), ValidationError);
}

TEST_CASE("two-mode squeezing builds the pair ladder") {
  double r = 0.5;
  GaussianPrep prep{{cd(0.0, 0.0), cd(0.0, 0.0)}, {{0, r, 0.0}}};
  State state = prepare_gaussian(prep, pmc(2, 12));
  double ch2 = std::cosh(r) * std::cosh(r);
  double th2 = std::tanh(r) * std::tanh(r);
  CHECK(state.probability({{0, 0}, 0u}) == doctest::Approx(1.0 / ch2).epsilon(1e-8));
  CHECK(state.probability({{1, 1}, 0u}) == doctest::Approx(th2 / ch2).epsilon(1e-8));
  CHECK(state.probability({{1, 0}, 0u}) < 1e-20);
  CHECK(mean_photon_number(state) ==
        doctest::Approx(2.0 * std::sinh(r) * std::sinh(r)).epsilon(1e-6));
}

TEST_CASE("mean photon number adds displacement and squeeze contributions") {
  GaussianPrep prep{{cd(0.5, 0.2), cd(0.0, 0.0), cd(0.0, 0.0)}, {{1, 0.4, 1.1}}};
  State state = prepare_gaussian(prep, pmc(3, 10));
  double expected = std::norm(cd(0.5, 0.2)) + 2.0 * std::sinh(0.4) * std::sinh(0.4);
  CHECK(mean_photon_number(state) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("displacement and squeezing order is part of the recipe") {
  GaussianPrep sq_first{{cd(0.4, 0.0), cd(0.0, 0.0)}, {{0, 0.3, 0.0}}};
  GaussianPrep disp_first = sq_first;
  disp_first.displace_first = true;
  auto basis = pmc(2, 10);
  State a = prepare_gaussian(sq_first, basis);
  State b = prepare_gaussian(disp_first, basis);
  CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(b.norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(a.amplitudes().dot(b.amplitudes())) < 1.0 - 1e-4);

  GaussianPrep bare{{cd(0.0, 0.0), cd(0.0, 0.0)}, {{0, 0.3, 0.0}}};
  GaussianPrep flipped = bare;
  flipped.displace_first = true;
  State c = prepare_gaussian(bare, basis);
  State d = prepare_gaussian(flipped, basis);
  CHECK((c.amplitudes() - d.amplitudes()).norm() < 1e-12);
}

TEST_CASE("preparation rejects inadequate cutoffs and malformed recipes") {
  CHECK_THROWS_AS(prepare_gaussian({{cd(3.0, 0.0)}, {}}, pmc(1, 4)), ValidationError);
  CHECK_THROWS_AS(prepare_gaussian({{cd(0.0, 0.0), cd(0.0, 0.0)}, {{0, 2.0, 0.0}}}, pmc(2, 6)),
                  ValidationError);
  CHECK_THROWS_AS(prepare_gaussian({{cd(0.0, 0.0)}, {}}, pmc(2, 4)), ValidationError);
  CHECK_THROWS_AS(prepare_gaussian({{cd(0.0, 0.0), cd(0.0, 0.0)}, {{1, 0.3, 0.0}}}, pmc(2, 8)),
                  ValidationError);
  CHECK_THROWS_AS(prepare_gaussian({{cd(0.0, 0.0), cd(0.0, 0.0)}, {{0, -0.3, 0.0}}}, pmc(2, 8)),
                  ValidationError);
  auto sector = std::make_shared<const Basis>(Basis::fixed_total(2, 2));
  CHECK_THROWS_AS(prepare_gaussian({{cd(0.0, 0.0), cd(0.0, 0.0)}, {}}, sector),
                  ValidationError);
}

TEST_CASE("pipeline sends vacuum to vacuum through any network") {
  GaussianPrep vac{{cd(0.0, 0.0), cd(0.0, 0.0), cd(0.0, 0.0)}, {}};
  auto elements = itf::reck_decompose(itf::haar_random(3, 4));
  auto dist = gaussian_pipeline(vac, elements);
  REQUIRE(dist.entries.count({0, 0, 0}) == 1);
  CHECK(dist.entries.at({0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dist.mode_count == 3);
  CHECK(dist.photon_count == -1);
}

TEST_CASE("squeezed pairs keep diagonal support through the identity") {
  GaussianPrep prep{{cd(0.0, 0.0), cd(0.0, 0.0)}, {{0, 0.3, 0.0}}};
  auto dist = gaussian_pipeline(prep, {}, sampler::QndCounter{0.9, 5, 4}, 10);
  double sum = 0.0;
  for (const auto& [pattern, p] : dist.entries) {
    if (p > 1e-12) CHECK(pattern[0] == pattern[1]);
    sum += p;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  // the counter conditions on all probes landing, so the surviving
  // distribution is the squeeze ladder restricted to n <= 4
  double th2 = std::tanh(0.3) * std::tanh(0.3);
  double ladder = 0.0;
  for (int n = 0; n <= 4; ++n) ladder += std::pow(th2, n);
  CHECK(dist.entries.at({0, 0}) == doctest::Approx(1.0 / ladder).epsilon(1e-6));
  CHECK(dist.entries.at({1, 1}) == doctest::Approx(th2 / ladder).epsilon(1e-6));
}

TEST_CASE("pair creation keeps the total photon parity even through a splitter") {
  GaussianPrep prep{{cd(0.0, 0.0), cd(0.0, 0.0)}, {{0, 0.3, 0.0}}};
  auto dist =
      gaussian_pipeline(prep, {itf::BeamSplitter{0, kPi / 4.0}}, sampler::QndCounter{}, 10);
  for (const auto& [pattern, p] : dist.entries) {
    if (p > 1e-12) CHECK((pattern[0] + pattern[1]) % 2 == 0);
  }
}

TEST_CASE("swap readout post-selects the collision-free ladder rungs") {
  GaussianPrep prep{{cd(0.0, 0.0), cd(0.0, 0.0)}, {{0, 0.3, 0.0}}};
  auto dist = gaussian_pipeline(prep, {}, sampler::SwapPhotodetector{}, 10);
  double th2 = std::tanh(0.3) * std::tanh(0.3);
  REQUIRE(dist.entries.size() == 2);
  CHECK(dist.entries.at({0, 0}) == doctest::Approx(1.0 / (1.0 + th2)).epsilon(1e-8));
  CHECK(dist.entries.at({1, 1}) == doctest::Approx(th2 / (1.0 + th2)).epsilon(1e-8));

  auto clipped = gaussian_pipeline(prep, {}, sampler::SwapPhotodetector{false}, 10);
  // without post-selection every rung folds onto the binary diagonal
  CHECK(clipped.entries.at({1, 1}) > th2 / (1.0 + th2));
}

TEST_CASE("pipeline flags runaway truncation during evolution") {
  // each mode fits under the cutoff, but constructive interference at the
  // splitter concentrates both amplitudes into one mode
  GaussianPrep prep{{cd(0.65, 0.0), cd(0.0, 0.65)}, {}};
  CHECK_NOTHROW(gaussian_pipeline(prep, {}, sampler::QndCounter{}, 6));
  CHECK_THROWS_AS(
      gaussian_pipeline(prep, {itf::BeamSplitter{0, kPi / 4.0}}, sampler::QndCounter{}, 6),
      ValidationError);
}

TEST_CASE("interferometer evolution conserves the total photon block structure") {
  GaussianPrep prep{{cd(0.4, 0.1), cd(0.0, 0.0)}, {{0, 0.25, 0.7}}};
  auto basis = pmc(2, 9);
  State before = prepare_gaussian(prep, basis);
  State after = before;
  for (const auto& element : itf::ElementList{itf::BeamSplitter{0, 0.3},
                                              itf::PhaseShifter{1, 0.7},
                                              itf::BeamSplitter{0, 0.4}}) {
    after = std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, itf::BeamSplitter>)
            return dynamics::evolve(dynamics::BeamSplitterRwa{e.lower_mode, 1.0}, after,
                                    e.angle)
                .state;
          else
            return dynamics::evolve(dynamics::PhaseRotation{e.mode, 1.0}, after, e.phase)
                .state;
        },
        element);
  }
  auto h0 = total_photon_histogram(before);
  auto h1 = total_photon_histogram(after);
  for (const auto& [total, p] : h0)
    CHECK(h1[total] == doctest::Approx(p).epsilon(1e-10).scale(1.0));
}

TEST_CASE("pipeline validates readout parameters and nonempty acceptance") {
  GaussianPrep prep{{cd(0.0, 0.0), cd(0.0, 0.0)}, {{0, 0.3, 0.0}}};
  CHECK_THROWS_AS(gaussian_pipeline(prep, {}, sampler::QndCounter{1.5, 1, 4}, 10),
                  ValidationError);
  CHECK_THROWS_AS(gaussian_pipeline(prep, {}, sampler::QndCounter{0.9, 0, 4}, 10),
                  ValidationError);
  CHECK_THROWS_AS(gaussian_pipeline(prep, {}, sampler::QndCounter{}, 0), ValidationError);
}
