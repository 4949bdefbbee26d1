#pragma once

#include "fepp/protocol.hpp"

#include <cstdint>
#include <optional>

namespace fepp {

// Counter-style generator: each trial gets its own stream derived from
// (seed, trial index), so results do not depend on scheduling.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  static SplitMix64 for_trial(std::uint64_t seed, std::uint64_t trial);

 private:
  std::uint64_t state_;
};

struct MonteCarloOptions {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct MonteCarloReport {
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t surviving_trials = 0;  // both photons reached the detectors
  std::uint64_t kept_trials = 0;

  double keep_rate = 0.0;  // kept / surviving
  double keep_rate_se = 0.0;
  std::optional<double> kept_fidelity;  // mean fidelity over kept trials
  std::optional<double> kept_fidelity_se;
  // A standard error is zero or undefined (too few trials or a deterministic outcome).
  bool degenerate_se = false;

  bool operator==(const MonteCarloReport&) const = default;
};

MonteCarloReport monte_carlo_round(const BellMixture& pair1, const BellMixture& pair2,
                                   const RoundConfig& cfg, const MonteCarloOptions& options);

struct MonteCarloComparison {
  double exact_keep_rate;
  std::optional<double> exact_kept_fidelity;
  std::optional<double> keep_rate_z;
  std::optional<double> kept_fidelity_z;
};

// z-scores of the empirical estimates against the exact engine. A z-score is
// empty when its standard error is zero and the estimate differs from exact.
MonteCarloComparison compare_with_exact(const MonteCarloReport& report, const RoundResult& exact);

}  // namespace fepp
