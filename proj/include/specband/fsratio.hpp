#pragma once

#include "specband/spectral.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace specband {

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
};

// FS-ratio of one epoch over one band (band stored in radians).
struct FsRatioResult {
  int epoch_id = 0;
  Band band;
  double ratio = 0.0;
  double band_energy = 0.0;
  double total_energy = 0.0;
  std::optional<ConfidenceInterval> ci;
};

// Squared Frobenius norms ||vec(f_hat(w_j))||^2 at the positive harmonics
// j = 1..floor(T/2), cached so several bands can share one pass.
class EnergyProfile {
 public:
  explicit EnergyProfile(const SpectralMatrices& estimate);

  const FrequencyGrid& grid() const noexcept { return grid_; }

  // (2*pi/T) * sum of ||vec||^2 over harmonics in (lo, hi].
  double band_energy(const Band& band_radians) const;

  // Integral over (-pi, pi] evaluated through conjugate symmetry as twice
  // the (0, pi] sum; the w = 0 ordinate is left out.
  double total_energy() const noexcept { return 2.0 * half_energy_; }

 private:
  FrequencyGrid grid_;
  std::vector<double> norms_;  // norms_[j - 1] for harmonic j
  double half_energy_;
};

// r_hat over (a, b]. Throws EmptyBand when no Fourier frequency falls inside.
double band_energy(const SpectralMatrices& estimate, const Band& band_radians);

// R_hat = 2 r_hat(a,b) / r_hat(-pi,pi). Throws ZeroTotalEnergy for an
// identically zero spectrum.
FsRatioResult fs_ratio(const SpectralMatrices& estimate, const Band& band_radians,
                       int epoch_id = 0);
FsRatioResult fs_ratio(const EnergyProfile& profile, const Band& band_radians, int epoch_id = 0);

std::vector<FsRatioResult> fs_ratios(const SpectralMatrices& estimate,
                                     std::span<const Band> bands_radians, int epoch_id = 0);

struct RatioSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  bool ci_from_bootstrap = false;
};

// Mean/median/SD over epochs. When every result carries a bootstrap
// interval the CI columns are the averaged interval limits; otherwise they
// are the 2.5% / 97.5% empirical percentiles of the ratios.
RatioSummary summarize_ratios(std::span<const FsRatioResult> values);

// Sample quantile with linear interpolation between order statistics
// (Hyndman-Fan type 7). `sorted` must be ascending and nonempty.
double quantile_sorted(std::span<const double> sorted, double prob);

}  // namespace specband
