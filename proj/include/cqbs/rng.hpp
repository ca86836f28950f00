#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "cqbs/constants.hpp"

namespace cqbs::rng {

// Deterministic random stream. mt19937_64 has a standard-mandated sequence and
// the float conversions below are done by hand, so identical seeds give
// identical draws on every platform (std::*_distribution would not).
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // uniform on [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller; second value of each pair is cached
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    double u2 = uniform();
    double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(constants::two_pi * u2);
    have_spare_ = true;
    return mag * std::cos(constants::two_pi * u2);
  }

  // complex normal with E|z|^2 = 1
  std::complex<double> complex_normal() {
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double mag = std::sqrt(-std::log(u1));
    return {mag * std::cos(constants::two_pi * u2),
            mag * std::sin(constants::two_pi * u2)};
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace cqbs::rng
