#pragma once

#include "specband/fsratio.hpp"
#include "specband/random.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace specband {

enum class ResamplingScheme {
  stationary,   // geometric block lengths (Politis-Romano)
  fixed_block,  // circular blocks of constant length
};

struct BootstrapConfig {
  int replications = 500;
  std::optional<double> block_length;  // empty = automatic selection
  double confidence_level = 0.95;
  std::uint64_t seed = 0;
  ResamplingScheme scheme = ResamplingScheme::stationary;

  static constexpr int kMinReplications = 50;

  void validate() const;
};

// Length-T resample of whole rows. Block starts are uniform, lengths are
// geometric with mean `expected_block_length`, and indices wrap circularly.
EpochSeries stationary_bootstrap_resample(const EpochSeries& series, double expected_block_length,
                                          Rng& rng);

// Same, with every block exactly round(block_length) rows long.
EpochSeries fixed_block_resample(const EpochSeries& series, double block_length, Rng& rng);

// Row indices used by the resamplers, exposed for multiset checks.
std::vector<Index> stationary_bootstrap_indices(Index length, double expected_block_length,
                                                Rng& rng);

// Politis-White automatic block length for one univariate series, with the
// Patton-Politis-White correction for the stationary bootstrap.
double select_block_length_univariate(const Eigen::Ref<const Eigen::VectorXd>& x);

// Average of the per-component selections, floored at 1. Needs T >= 50.
double select_block_length(const EpochSeries& series);

struct BootstrapDistribution {
  std::vector<double> ratios;  // replicate order
  double block_length = 1.0;
  ConfidenceInterval interval;
};

// Percentile interval of the FS-ratio from B resamples. Replicate b draws
// from stream (seed, epoch_id, b), so output is reproducible and
// independent of thread scheduling.
BootstrapDistribution bootstrap_fs_ratio(const EpochSeries& series, const Band& band_radians,
                                         const Kernel& kernel, const BootstrapConfig& config);

ConfidenceInterval bootstrap_ci(const EpochSeries& series, const Band& band_radians,
                                const Kernel& kernel, const BootstrapConfig& config);

// One bootstrap pass evaluating several bands on the same resamples.
std::vector<ConfidenceInterval> bootstrap_ci(const EpochSeries& series,
                                             const std::vector<Band>& bands_radians,
                                             const Kernel& kernel, const BootstrapConfig& config);

}  // namespace specband
