#pragma once

#include <cstdint>
#include <random>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace acprobit {

/// Seeded random stream. The engine is std::mt19937_64, whose output sequence
/// is fixed by the standard; the distributions come from Boost.Random, whose
/// algorithms are header code, so traces are reproducible across platforms.
class Rng {
public:
  static constexpr const char* kAlgorithm = "mt19937_64+boost.random";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double exponential(double rate) {
    return boost::random::exponential_distribution<double>(rate)(engine_);
  }

  std::mt19937_64& engine() noexcept { return engine_; }

private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_{};
  boost::random::uniform_01<double> uniform_{};
};

}  // namespace acprobit
