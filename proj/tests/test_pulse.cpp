#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "cqbs/constants.hpp"
#include "cqbs/device.hpp"
#include "cqbs/errors.hpp"
#include "cqbs/interferometer.hpp"
#include "cqbs/pulse.hpp"

using namespace cqbs;
using namespace cqbs::pulse;
namespace itf = cqbs::interferometer;
using Mat = Eigen::MatrixXcd;

namespace {
const double kPi = constants::pi;

// removes the free global phase by aligning on the largest entry of `a`
double phase_aligned_distance(const Mat& a, const Mat& b) {
  Eigen::Index i = 0, j = 0;
  a.cwiseAbs().maxCoeff(&i, &j);
  std::complex<double> phase = b(i, j) / a(i, j);
  phase /= std::abs(phase);
  return (a * phase - b).cwiseAbs().maxCoeff();
}
}  // namespace

TEST_CASE("a 50/50 splitter compiles to one full-coupling pulse") {
  device::DeviceParams p;
  auto schedule = compile({itf::BeamSplitter{0, kPi / 4.0}}, p);
  REQUIRE(schedule.layers.size() == 1);
  REQUIRE(schedule.layers[0].size() == 1);
  const auto& ins = std::get<CouplerOn>(schedule.layers[0][0]);
  CHECK(ins.lower_mode == 0);
  CHECK(ins.flux == 0.0);
  CHECK(ins.duration == doctest::Approx(4.16666666667).epsilon(1e-9));  // ns
  CHECK(schedule.total_duration == doctest::Approx(4.16666666667e-9).epsilon(1e-9));
}

TEST_CASE("phase shifters hold the detuned qubit for phase over twice the pull") {
  device::DeviceParams p;
  auto plain = compile({itf::PhaseShifter{2, kPi}}, p);
  REQUIRE(plain.layers.size() == 1);
  const auto& d = std::get<QubitDetune>(plain.layers[0][0]);
  CHECK(d.qubit == 2);
  CHECK(d.duration == doctest::Approx(1e9 * kPi / (2.0 * 20e6)).epsilon(1e-12));
  CHECK(d.flux > 0.0);
  CHECK(d.flux < 0.25);

  p.convention = device::PhaseConvention::angular;
  auto angular = compile({itf::PhaseShifter{2, kPi}}, p);
  const auto& da = std::get<QubitDetune>(angular.layers[0][0]);
  CHECK(da.duration ==
        doctest::Approx(1e9 * kPi / (2.0 * constants::two_pi * 20e6)).epsilon(1e-12));
  CHECK(da.flux != doctest::Approx(d.flux));
}

TEST_CASE("hardware-disjoint instructions share a layer, conflicts serialize") {
  device::DeviceParams p;
  auto disjoint = compile({itf::BeamSplitter{0, 0.3}, itf::BeamSplitter{2, 0.4}}, p);
  CHECK(disjoint.layers.size() == 1);
  CHECK(disjoint.layers[0].size() == 2);

  auto chained = compile({itf::BeamSplitter{0, 0.3}, itf::BeamSplitter{1, 0.4}}, p);
  CHECK(chained.layers.size() == 2);

  // a phase shifter claims its mode's resonator, so it blocks the coupler
  auto mixed = compile({itf::PhaseShifter{0, 1.0}, itf::BeamSplitter{0, 0.3}}, p);
  CHECK(mixed.layers.size() == 2);

  // total duration is the sum of per-layer maxima
  auto two = compile({itf::BeamSplitter{0, 0.3}, itf::PhaseShifter{3, 1.0},
                      itf::BeamSplitter{0, 0.7}},
                     p);
  double bs1 = 1e9 * 0.3 / p.g_bs, ps = 1e9 * 1.0 / (2.0 * p.chi_ps_rate()),
         bs2 = 1e9 * 0.7 / p.g_bs;
  CHECK(two.layers.size() == 2);
  CHECK(two.total_duration ==
        doctest::Approx((std::max(bs1, ps) + bs2) * 1e-9).epsilon(1e-12));
}

TEST_CASE("small meshes compile to shallow schedules") {
  device::DeviceParams p;
  auto one = compile(itf::reck_decompose(itf::haar_random(1, 5)), p);
  CHECK(one.layers.size() <= 1);
  auto two = compile(itf::reck_decompose(itf::haar_random(2, 5)), p);
  CHECK(two.layers.size() >= 1);
  CHECK(two.layers.size() <= 3);
  auto empty = compile({}, p);
  CHECK(empty.layers.empty());
  CHECK(empty.total_duration == 0.0);
}

TEST_CASE("compile rejects malformed elements") {
  device::DeviceParams p;
  CHECK_THROWS_AS(compile({itf::BeamSplitter{-1, 0.3}}, p), ValidationError);
  CHECK_THROWS_AS(compile({itf::PhaseShifter{-2, 0.3}}, p), ValidationError);
  device::DeviceParams bad = p;
  bad.g_bs = 0.0;
  CHECK_THROWS_AS(compile({itf::BeamSplitter{0, 0.3}}, bad), ValidationError);
}

TEST_CASE("simulating the schedule reproduces the element unitary") {
  device::DeviceParams p;
  for (std::uint64_t seed : {11u, 12u}) {
    Mat target = itf::haar_random(4, seed);
    itf::ElementList elements = itf::reck_decompose(target);
    PulseSchedule schedule = compile(elements, p);
    Mat simulated = schedule_unitary(schedule, 4, p);
    CHECK(phase_aligned_distance(simulated, target) < 1e-6);
  }
}

TEST_CASE("schedules compiled under either pull convention simulate identically") {
  Mat target = itf::haar_random(3, 21);
  for (auto conv : {device::PhaseConvention::plain, device::PhaseConvention::angular}) {
    device::DeviceParams p;
    p.convention = conv;
    Mat simulated = schedule_unitary(compile(itf::reck_decompose(target), p), 3, p);
    CHECK(phase_aligned_distance(simulated, target) < 1e-6);
  }
}

TEST_CASE("flattening a schedule recovers the compiled unitary") {
  device::DeviceParams p;
  Mat target = itf::haar_random(5, 33);
  itf::ElementList elements = itf::reck_decompose(target);
  PulseSchedule schedule = compile(elements, p);
  itf::ElementList flat = schedule_to_elements(schedule, p);
  Mat from_flat = itf::elements_to_unitary(flat, 5);
  Mat from_elements = itf::elements_to_unitary(elements, 5);
  CHECK((from_flat - from_elements).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("depth and duration grow linearly with the mesh size") {
  int d8 = schedule_depth_estimate(8);
  int d16 = schedule_depth_estimate(16);
  CHECK(double(d16) / double(d8) == doctest::Approx(2.0).epsilon(0.3));
  for (int m : {2, 4, 8, 16}) {
    int depth = schedule_depth_estimate(m);
    CHECK(depth >= 1);
    CHECK(depth <= 6 * m + 4);
  }
  CHECK(schedule_depth_estimate(1) <= 1);

  device::DeviceParams p;
  double t8 = compile(itf::reck_decompose(itf::haar_random(8, 3)), p).total_duration;
  double t16 = compile(itf::reck_decompose(itf::haar_random(16, 3)), p).total_duration;
  CHECK(t16 / t8 == doctest::Approx(2.0).epsilon(0.35));
}

TEST_CASE("schedules serialize to tab records and reload byte-identically") {
  device::DeviceParams p;
  PulseSchedule schedule = compile(itf::reck_decompose(itf::haar_random(4, 9)), p);
  // drives occupy otherwise idle hardware in the first layer
  schedule.layers[0].push_back(QubitDrive{3, kPi / 2.0});
  validate_schedule(schedule);

  std::string text = serialize_schedule(schedule);
  CHECK(text.rfind("# pulse-schedule v1\n", 0) == 0);
  PulseSchedule reloaded = parse_schedule(text);
  CHECK(serialize_schedule(reloaded) == text);
  CHECK(reloaded.total_duration == doctest::Approx(schedule.total_duration).epsilon(1e-15));
  CHECK(reloaded.layers.size() == schedule.layers.size());
}

TEST_CASE("schedule parsing rejects malformed records") {
  std::string header = "# pulse-schedule v1\n";
  CHECK_THROWS_AS(parse_schedule(header + "0\tcoupler\t0,2\t0\t1\n"), ValidationError);
  CHECK_THROWS_AS(parse_schedule(header + "0\twiggle\t0\t0\t1\n"), ValidationError);
  CHECK_THROWS_AS(parse_schedule(header + "0\tcoupler\t0,1\t0\n"), ValidationError);
  CHECK_THROWS_AS(parse_schedule(header + "2\tcoupler\t0,1\t0\t1\n"), ValidationError);
  CHECK_THROWS_AS(parse_schedule(header + "0\tcoupler\t0,1\tzero\t1\n"), ValidationError);
  CHECK_THROWS_AS(parse_schedule(header + "0\tcoupler\t0,1\t0\t-1\n"), ValidationError);
  // two instructions on the same resonator cannot share a layer
  CHECK_THROWS_AS(
      parse_schedule(header + "0\tcoupler\t0,1\t0\t1\n0\tdetune\t1\t0.1\t1\n"),
      ValidationError);
  CHECK_NOTHROW(parse_schedule(header + "0\tcoupler\t0,1\t0\t1\n0\tdetune\t2\t0.1\t1\n"));
}

TEST_CASE("schedule simulation validates its inputs") {
  device::DeviceParams p;
  PulseSchedule schedule = compile({itf::BeamSplitter{2, 0.4}}, p);
  CHECK_THROWS_AS(schedule_unitary(schedule, 3, p), ValidationError);
  CHECK_NOTHROW(schedule_unitary(schedule, 4, p));
  CHECK_THROWS_AS(schedule_unitary(schedule, 0, p), ValidationError);
}
