#include "specband/fsratio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace specband {

EnergyProfile::EnergyProfile(const SpectralMatrices& estimate)
    : grid_(estimate.grid()), half_energy_(0.0) {
  const Index top = grid_.max_harmonic();
  norms_.reserve(static_cast<std::size_t>(std::max<Index>(top, 0)));
  for (Index j = 1; j <= top; ++j) norms_.push_back(estimate.frobenius_sq(grid_.bin(j)));
  half_energy_ = grid_.spacing() * std::accumulate(norms_.begin(), norms_.end(), 0.0);
}

double EnergyProfile::band_energy(const Band& band_radians) const {
  const auto [first, last] = grid_.band_harmonics(band_radians);
  if (first > last) {
    throw Error(ErrorKind::EmptyBand, "no Fourier frequency in (" +
                                          std::to_string(band_radians.lo) + ", " +
                                          std::to_string(band_radians.hi) + "] at T = " +
                                          std::to_string(grid_.size()));
  }
  const auto begin = norms_.begin() + (first - 1);
  const auto end = norms_.begin() + last;
  return grid_.spacing() * std::accumulate(begin, end, 0.0);
}

double band_energy(const SpectralMatrices& estimate, const Band& band_radians) {
  return EnergyProfile(estimate).band_energy(band_radians);
}

FsRatioResult fs_ratio(const EnergyProfile& profile, const Band& band_radians, int epoch_id) {
  const double total = profile.total_energy();
  if (!(total > 0.0)) {
    throw Error(ErrorKind::ZeroTotalEnergy,
                "epoch " + std::to_string(epoch_id) + " has zero spectral energy");
  }
  FsRatioResult out;
  out.epoch_id = epoch_id;
  out.band = band_radians;
  out.band_energy = profile.band_energy(band_radians);
  out.total_energy = total;
  out.ratio = std::clamp(2.0 * out.band_energy / total, 0.0, 1.0);
  return out;
}

FsRatioResult fs_ratio(const SpectralMatrices& estimate, const Band& band_radians, int epoch_id) {
  return fs_ratio(EnergyProfile(estimate), band_radians, epoch_id);
}

std::vector<FsRatioResult> fs_ratios(const SpectralMatrices& estimate,
                                     std::span<const Band> bands_radians, int epoch_id) {
  const EnergyProfile profile(estimate);
  std::vector<FsRatioResult> out;
  out.reserve(bands_radians.size());
  for (const Band& band : bands_radians) out.push_back(fs_ratio(profile, band, epoch_id));
  return out;
}

double quantile_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw Error(ErrorKind::EmptyInput, "quantile of empty sample");
  const double pos = std::clamp(prob, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

RatioSummary summarize_ratios(std::span<const FsRatioResult> values) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "no FS-ratio values to summarize");

  std::vector<double> r;
  r.reserve(values.size());
  for (const auto& v : values) r.push_back(v.ratio);
  const double n = static_cast<double>(r.size());

  RatioSummary s;
  s.count = r.size();
  s.mean = std::accumulate(r.begin(), r.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : r) ss += (x - s.mean) * (x - s.mean);
  s.sd = r.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

  std::sort(r.begin(), r.end());
  s.median = quantile_sorted(r, 0.5);

  const bool all_ci =
      std::all_of(values.begin(), values.end(), [](const auto& v) { return v.ci.has_value(); });
  if (all_ci) {
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& v : values) {
      lo += v.ci->lower;
      hi += v.ci->upper;
    }
    s.ci_lower = lo / n;
    s.ci_upper = hi / n;
    s.ci_from_bootstrap = true;
  } else {
    s.ci_lower = quantile_sorted(r, 0.025);
    s.ci_upper = quantile_sorted(r, 0.975);
  }
  return s;
}

}  // namespace specband
