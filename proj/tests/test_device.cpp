#include <doctest.h>

#include <cmath>

#include "cqbs/constants.hpp"
#include "cqbs/device.hpp"
#include "cqbs/errors.hpp"

using namespace cqbs;
using namespace cqbs::device;

namespace {
const double kTwoPi = constants::two_pi;
}

TEST_CASE("default parameter table is valid and convention switches the pull rates") {
  DeviceParams p;
  CHECK_NOTHROW(p.validate());
  CHECK(p.chi_ps_rate() == doctest::Approx(20e6));
  CHECK(p.xi0_rate() == doctest::Approx(30e6));
  p.convention = PhaseConvention::angular;
  CHECK(p.chi_ps_rate() == doctest::Approx(kTwoPi * 20e6));
  CHECK(p.xi0_rate() == doctest::Approx(kTwoPi * 30e6));

  DeviceParams bad = p;
  bad.kappa_s = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.eta_readout = 1.2;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.f_prep = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.omega_s = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("qubit frequency follows the SQUID modulation") {
  DeviceGeometry g = DeviceGeometry::typical();
  double at_zero = qubit_frequency(g, 0.0);
  CHECK(at_zero ==
        doctest::Approx(std::sqrt(16.0 * g.e_j * g.charging_energy()) / constants::hbar)
            .epsilon(1e-12));
  // half a quantum flips the cosine sign but leaves the magnitude maximal
  CHECK(qubit_frequency(g, 0.5 * g.phi_0) == doctest::Approx(at_zero).epsilon(1e-9));
  CHECK(qubit_frequency(g, 0.1 * g.phi_0) < at_zero);
  CHECK_THROWS_AS(qubit_frequency(g, 0.25 * g.phi_0), ValidationError);
  CHECK_THROWS_AS(qubit_frequency(g, 0.75 * g.phi_0), ValidationError);

  DeviceGeometry broken = g;
  broken.c_j = 0.0;
  CHECK_THROWS_AS(qubit_frequency(broken, 0.0), ValidationError);
}

TEST_CASE("typical geometry lands in the transmon band") {
  DeviceGeometry g = DeviceGeometry::typical();
  double f = qubit_frequency(g, 0.0) / kTwoPi;
  CHECK(f > 3e9);
  CHECK(f < 13e9);
  CHECK(qubit_frequency(g, 0.0) < DeviceParams{}.omega_max);
}

TEST_CASE("qubit frequency inverts on the principal flux branch") {
  DeviceGeometry g = DeviceGeometry::typical();
  double top = qubit_frequency(g, 0.0);
  for (double frac : {1.0, 0.9, 0.6, 0.3, 0.05}) {
    double flux = flux_for_qubit_frequency(g, frac * top);
    CHECK(flux >= 0.0);
    CHECK(flux < 0.25 * g.phi_0);
    CHECK(qubit_frequency(g, flux) == doctest::Approx(frac * top).epsilon(1e-10));
  }
  CHECK_THROWS_AS(flux_for_qubit_frequency(g, 1.01 * top), ValidationError);
  CHECK_THROWS_AS(flux_for_qubit_frequency(g, 0.0), ValidationError);
}

TEST_CASE("coupler strength is the flux cosine and inverts on the principal branch") {
  double g_bs = kTwoPi * 30e6;
  double phi0 = constants::flux_quantum;
  CHECK(coupler_strength(g_bs, 0.0) == doctest::Approx(g_bs));
  CHECK(coupler_strength(g_bs, 0.5 * phi0) == doctest::Approx(-g_bs));
  CHECK(std::abs(coupler_strength(g_bs, 0.25 * phi0)) < 1e-9 * g_bs);

  CHECK(flux_for_strength(g_bs, g_bs / 2.0) == doctest::Approx(phi0 / 6.0).epsilon(1e-12));
  CHECK(flux_for_strength(g_bs, g_bs) == doctest::Approx(0.0));
  CHECK(flux_for_strength(g_bs, 0.0) == doctest::Approx(phi0 / 4.0).epsilon(1e-12));

  for (int k = -4; k <= 4; ++k) {
    double target = g_bs * double(k) / 4.0;
    double flux = flux_for_strength(g_bs, target);
    CHECK(flux >= 0.0);
    CHECK(flux <= 0.5 * phi0 + 1e-18);
    CHECK(coupler_strength(g_bs, flux) ==
          doctest::Approx(target).epsilon(1e-10).scale(g_bs));
  }
  CHECK_THROWS_AS(flux_for_strength(g_bs, 1.01 * g_bs), ValidationError);
  CHECK_THROWS_AS(flux_for_strength(g_bs, -1.01 * g_bs), ValidationError);
}

TEST_CASE("capacitive coupling scales with the divider and the mode volume") {
  DeviceGeometry g = DeviceGeometry::typical();
  DeviceParams p;
  double base = qubit_resonator_coupling(g, p, Resonator::storage);
  CHECK(base > 0.0);

  // with C_s << C_J the divider is ~C_s/C_J, so doubling C_J halves g
  DeviceGeometry light = g;
  light.c_s = 1e-18;
  DeviceGeometry heavier = light;
  heavier.c_j *= 2.0;
  double halved = qubit_resonator_coupling(heavier, p, Resonator::storage) /
                  qubit_resonator_coupling(light, p, Resonator::storage);
  CHECK(halved == doctest::Approx(0.5).epsilon(1e-4));

  DeviceGeometry longer = g;
  longer.length *= 4.0;
  CHECK(qubit_resonator_coupling(longer, p, Resonator::storage) / base ==
        doctest::Approx(0.5).epsilon(1e-12));

  CHECK(qubit_resonator_coupling(g, p, Resonator::measurement) > base);
}

TEST_CASE("coupling calibration round-trips through the geometry formula") {
  DeviceGeometry g = DeviceGeometry::typical();
  DeviceParams p;
  double target = kTwoPi * 150e6;
  g.c_s = capacitance_for_coupling(g, p, Resonator::storage, target);
  CHECK(qubit_resonator_coupling(g, p, Resonator::storage) ==
        doctest::Approx(target).epsilon(1e-9));

  double bound = std::sqrt(p.omega_s / (g.c_per_len * g.length));
  CHECK_THROWS_AS(capacitance_for_coupling(g, p, Resonator::storage, bound), ValidationError);
  CHECK_THROWS_AS(capacitance_for_coupling(g, p, Resonator::storage, -1.0), ValidationError);
}
