#include "fepp/montecarlo.hpp"

#include "fepp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace fepp {
namespace {

// Fixed block size: block boundaries, not threads, define the summation order.
constexpr std::uint64_t kBlockSize = 8192;

struct ComboTable {
  double survival = 0.0;
  std::vector<double> cumulative;  // conditional branch CDF given survival
  std::vector<bool> kept;
  std::vector<double> fidelity;
};

struct Tally {
  std::uint64_t surviving = 0;
  std::uint64_t kept = 0;
  double fidelity_sum = 0.0;
};

std::size_t sample_index(double u, std::span<const double> cumulative) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const auto idx = static_cast<std::size_t>(it - cumulative.begin());
  return std::min(idx, cumulative.size() - 1);
}

std::array<double, 4> cumulative_weights(const BellMixture& m) {
  std::array<double, 4> c{};
  double acc = 0.0;
  const auto w = m.weights();
  for (std::size_t i = 0; i < 4; ++i) c[i] = (acc += w[i]);
  c[3] = 1.0;
  return c;
}

// Index of the first label with nonzero weight at or after the sampled slot.
std::size_t sample_label(double u, const std::array<double, 4>& cumulative,
                         const std::array<double, 4>& weights) {
  std::size_t idx = sample_index(u, cumulative);
  while (weights[idx] == 0.0 && idx + 1 < 4) ++idx;
  while (weights[idx] == 0.0 && idx > 0) --idx;
  return idx;
}

}  // namespace

SplitMix64 SplitMix64::for_trial(std::uint64_t seed, std::uint64_t trial) {
  SplitMix64 mixer(seed);
  const std::uint64_t base = mixer();
  SplitMix64 trial_mixer(base ^ (trial * 0xD1B54A32D192ED03ULL));
  return SplitMix64(trial_mixer());
}

MonteCarloReport monte_carlo_round(const BellMixture& pair1, const BellMixture& pair2,
                                   const RoundConfig& cfg, const MonteCarloOptions& options) {
  if (options.trials == 0) throw ContractError("Monte Carlo needs at least one trial");
  pair1.validate();
  pair2.validate();
  cfg.validate();

  // Branch statistics for each of the 16 pure Bell-pair inputs.
  std::array<ComboTable, 16> tables;
  for (BellLabel l1 : kBellLabels) {
    for (BellLabel l2 : kBellLabels) {
      const std::size_t idx = 4 * static_cast<std::size_t>(l1) + static_cast<std::size_t>(l2);
      if (pair1.weight(l1) == 0.0 || pair2.weight(l2) == 0.0) continue;
      const PureRoundResult pure = run_round_pure(l1, l2, cfg);
      ComboTable& t = tables[idx];
      // Unitary gates conserve norm up to round-off; never sample a spurious loss.
      t.survival = std::abs(pure.photon_survival - 1.0) <= 1e-12 ? 1.0 : pure.photon_survival;
      double acc = 0.0;
      for (const PureBranch& b : pure.branches) {
        acc += t.survival > 0.0 ? b.probability / t.survival : 0.0;
        t.cumulative.push_back(acc);
        t.kept.push_back(b.kept);
        t.fidelity.push_back(b.fidelity);
      }
      if (!t.cumulative.empty()) t.cumulative.back() = std::max(t.cumulative.back(), 1.0);
    }
  }

  const auto w1 = pair1.weights();
  const auto w2 = pair2.weights();
  const auto c1 = cumulative_weights(pair1);
  const auto c2 = cumulative_weights(pair2);

  const std::uint64_t n_blocks = (options.trials + kBlockSize - 1) / kBlockSize;
  std::vector<Tally> block_tally(n_blocks);

  auto run_block = [&](std::uint64_t block) {
    Tally tally;
    const std::uint64_t begin = block * kBlockSize;
    const std::uint64_t end = std::min(options.trials, begin + kBlockSize);
    for (std::uint64_t trial = begin; trial < end; ++trial) {
      SplitMix64 rng = SplitMix64::for_trial(options.seed, trial);
      const std::size_t l1 = sample_label(rng.uniform(), c1, w1);
      const std::size_t l2 = sample_label(rng.uniform(), c2, w2);
      const double u_survive = rng.uniform();
      const double u_branch = rng.uniform();
      const ComboTable& t = tables[4 * l1 + l2];
      if (u_survive >= t.survival) continue;
      ++tally.surviving;
      const std::size_t b = sample_index(u_branch, t.cumulative);
      if (t.kept[b]) {
        ++tally.kept;
        tally.fidelity_sum += t.fidelity[b];
      }
    }
    block_tally[block] = tally;
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = static_cast<unsigned>(std::clamp<std::uint64_t>(threads, 1, n_blocks));
  if (threads == 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t b = w; b < n_blocks; b += threads) run_block(b);
      });
    }
  }

  Tally total;
  for (const Tally& t : block_tally) {
    total.surviving += t.surviving;
    total.kept += t.kept;
    total.fidelity_sum += t.fidelity_sum;
  }

  MonteCarloReport report;
  report.seed = options.seed;
  report.trials = options.trials;
  report.surviving_trials = total.surviving;
  report.kept_trials = total.kept;
  if (total.surviving == 0) {
    report.degenerate_se = true;
    return report;
  }
  const auto n = static_cast<double>(total.surviving);
  report.keep_rate = static_cast<double>(total.kept) / n;
  report.keep_rate_se = std::sqrt(report.keep_rate * (1.0 - report.keep_rate) / n);
  report.degenerate_se = !(report.keep_rate_se > 0.0);
  if (total.kept > 0) {
    const auto k = static_cast<double>(total.kept);
    const double f = std::clamp(total.fidelity_sum / k, 0.0, 1.0);
    report.kept_fidelity = f;
    report.kept_fidelity_se = std::sqrt(f * (1.0 - f) / k);
    report.degenerate_se = report.degenerate_se || !(*report.kept_fidelity_se > 0.0);
  } else {
    report.degenerate_se = true;
  }
  return report;
}

namespace {
std::optional<double> z_score(double estimate, double se, double exact) {
  const double diff = estimate - exact;
  if (se > 0.0) return diff / se;
  if (std::abs(diff) <= 1e-12) return 0.0;
  return std::nullopt;
}
}  // namespace

MonteCarloComparison compare_with_exact(const MonteCarloReport& report, const RoundResult& exact) {
  MonteCarloComparison cmp{exact.kept_probability(), exact.kept_fidelity(), std::nullopt, std::nullopt};
  if (report.surviving_trials > 0) {
    cmp.keep_rate_z = z_score(report.keep_rate, report.keep_rate_se, cmp.exact_keep_rate);
  }
  if (report.kept_fidelity && report.kept_fidelity_se && cmp.exact_kept_fidelity) {
    cmp.kept_fidelity_z =
        z_score(*report.kept_fidelity, *report.kept_fidelity_se, *cmp.exact_kept_fidelity);
  }
  return cmp;
}

}  // namespace fepp
