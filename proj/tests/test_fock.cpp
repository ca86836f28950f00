#include <doctest.h>

#include <complex>
#include <random>

#include "cqbs/errors.hpp"
#include "cqbs/fock.hpp"

using namespace cqbs;
using fock::Basis;
using fock::BasisLabel;
using fock::Occupation;
using fock::State;

TEST_CASE("fixed-total enumeration is descending lexicographic") {
  Basis b = Basis::fixed_total(3, 2);
  REQUIRE(b.dimension() == 6);
  std::vector<Occupation> expected = {{2, 0, 0}, {1, 1, 0}, {1, 0, 1},
                                      {0, 2, 0}, {0, 1, 1}, {0, 0, 2}};
  auto labels = b.enumerate();
  REQUIRE(labels.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(labels[i].counts == expected[i]);
    CHECK(b.index_of(labels[i]) == i);
  }
}

TEST_CASE("per-mode cutoff dimensions and qubit blocks") {
  CHECK(Basis::per_mode_cutoff(2, 2).dimension() == 9);
  CHECK(Basis::per_mode_cutoff(2, 2, 2).dimension() == 36);
  CHECK(Basis::fixed_total(4, 3).dimension() == 20);

  Basis b = Basis::per_mode_cutoff(2, 1, 1);
  // index = qubit_pattern * bosonic_dimension + bosonic_rank
  CHECK(b.bosonic_dimension() == 4);
  std::size_t ground = b.index_of({1, 0}, 0u);
  std::size_t excited = b.index_of({1, 0}, 1u);
  CHECK(excited == ground + 4);
}

TEST_CASE("round trip between labels and indices") {
  std::mt19937 gen(12345);
  Basis pm = Basis::per_mode_cutoff(4, 3, 2);
  for (int trial = 0; trial < 1000; ++trial) {
    BasisLabel label;
    label.counts.resize(4);
    for (auto& n : label.counts) n = int(gen() % 4);
    label.qubits = gen() % 4;
    std::size_t idx = pm.index_of(label);
    BasisLabel back = pm.label_at(idx);
    CHECK(back.counts == label.counts);
    CHECK(back.qubits == label.qubits);
  }

  Basis ft = Basis::fixed_total(5, 4, 1);
  for (std::size_t idx = 0; idx < ft.dimension(); ++idx) {
    CHECK(ft.index_of(ft.label_at(idx)) == idx);
  }
}

TEST_CASE("label validation") {
  Basis ft = Basis::fixed_total(3, 2);
  CHECK_THROWS_AS((void)ft.index_of({1, 1}), ValidationError);         // wrong length
  CHECK_THROWS_AS((void)ft.index_of({1, 1, 1}), ValidationError);      // wrong total
  CHECK_THROWS_AS((void)ft.index_of({-1, 2, 1}), ValidationError);     // negative
  CHECK_THROWS_AS((void)ft.index_of({2, 0, 0}, 1u), ValidationError);  // no qubit slots

  Basis pm = Basis::per_mode_cutoff(2, 2, 1);
  CHECK_THROWS_AS((void)pm.index_of({3, 0}, 0u), ValidationError);  // above cutoff
  CHECK_THROWS_AS((void)pm.index_of({0, 0}, 2u), ValidationError);  // qubit bits out of range
  CHECK_THROWS_AS((void)pm.label_at(pm.dimension()), ValidationError);
}

TEST_CASE("dimension cap rejects runaway bases") {
  CHECK_THROWS_AS(Basis::per_mode_cutoff(12, 9), CapExceeded);
  CHECK_NOTHROW(Basis::per_mode_cutoff(12, 9, 0, 1'000'000'000'000ull));
  CHECK_THROWS_AS(Basis::fixed_total(40, 20), CapExceeded);
}

TEST_CASE("state factories and amplitude lookup") {
  auto b = std::make_shared<const Basis>(Basis::per_mode_cutoff(2, 2, 1));
  State vac = State::vacuum(b);
  CHECK(vac.norm() == doctest::Approx(1.0));
  CHECK(vac.probability({{0, 0}, 0u}) == doctest::Approx(1.0));
  CHECK(vac.probability({{1, 0}, 0u}) == doctest::Approx(0.0));

  State one = State::basis_state(b, {{1, 1}, 1u});
  CHECK(one.amplitude({{1, 1}, 1u}) == std::complex<double>(1.0, 0.0));

  auto sector = std::make_shared<const Basis>(Basis::fixed_total(2, 1));
  CHECK_THROWS_AS(State::vacuum(sector), ValidationError);
  CHECK_NOTHROW(State::vacuum(std::make_shared<const Basis>(Basis::fixed_total(2, 0))));
}

TEST_CASE("ladder operators respect the cutoff and report leakage") {
  auto b = std::make_shared<const Basis>(Basis::per_mode_cutoff(1, 3));

  State two = State::basis_state(b, {{2}, 0u});
  auto up = fock::apply_ladder(two, 0, fock::Ladder::Create);
  CHECK(up.leakage == doctest::Approx(0.0));
  CHECK(std::abs(up.state.amplitude({{3}, 0u}) - std::sqrt(3.0)) < 1e-12);

  auto clipped = fock::apply_ladder(up.state, 0, fock::Ladder::Create);
  CHECK(clipped.leakage == doctest::Approx(3.0));  // squared amplitude of the dropped part
  CHECK(clipped.state.norm() == doctest::Approx(0.0));

  State vac = State::vacuum(b);
  auto down = fock::apply_ladder(vac, 0, fock::Ladder::Annihilate);
  CHECK(down.leakage == doctest::Approx(0.0));
  CHECK(down.state.norm() == doctest::Approx(0.0));

  auto sector = std::make_shared<const Basis>(Basis::fixed_total(2, 1));
  State in_sector = State::basis_state(sector, {{1, 0}, 0u});
  CHECK_THROWS_AS(fock::apply_ladder(in_sector, 0, fock::Ladder::Create), ValidationError);
}

TEST_CASE("commutator holds below the cutoff") {
  auto b = std::make_shared<const Basis>(Basis::per_mode_cutoff(1, 5));
  for (int n = 0; n <= 4; ++n) {
    State s = State::basis_state(b, {{n}, 0u});
    auto a_adag = fock::apply_ladder(fock::apply_ladder(s, 0, fock::Ladder::Create).state, 0,
                                     fock::Ladder::Annihilate);
    auto adag_a = fock::apply_ladder(fock::apply_ladder(s, 0, fock::Ladder::Annihilate).state, 0,
                                     fock::Ladder::Create);
    std::complex<double> diff =
        a_adag.state.amplitude({{n}, 0u}) - adag_a.state.amplitude({{n}, 0u});
    CHECK(std::abs(diff - 1.0) < 1e-12);
  }
}
