#include "specband/bootstrap.hpp"

#include <algorithm>
#include <cmath>

namespace specband {

void BootstrapConfig::validate() const {
  if (replications < kMinReplications) {
    throw Error(ErrorKind::InvalidConfig, "bootstrap needs at least " +
                                              std::to_string(kMinReplications) +
                                              " replications, got " +
                                              std::to_string(replications));
  }
  if (!(confidence_level > 0.0 && confidence_level < 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "confidence level must lie in (0, 1)");
  }
  if (block_length && !(*block_length >= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "block length must be >= 1");
  }
}

std::vector<Index> stationary_bootstrap_indices(Index length, double expected_block_length,
                                                Rng& rng) {
  if (!(expected_block_length >= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "expected block length must be >= 1");
  }
  const double p = 1.0 / expected_block_length;
  std::vector<Index> idx;
  idx.reserve(static_cast<std::size_t>(length));
  while (static_cast<Index>(idx.size()) < length) {
    const Index start = uniform_index(rng, 0, length - 1);
    const std::int64_t block = geometric_trials(rng, p);
    for (std::int64_t i = 0; i < block && static_cast<Index>(idx.size()) < length; ++i) {
      idx.push_back((start + i) % length);
    }
  }
  return idx;
}

namespace {

EpochSeries gather_rows(const EpochSeries& series, const std::vector<Index>& idx) {
  Eigen::MatrixXd out(series.length(), series.dimension());
  for (Index r = 0; r < series.length(); ++r) {
    out.row(r) = series.data().row(idx[static_cast<std::size_t>(r)]);
  }
  return EpochSeries(series.epoch_id(), std::move(out), series.sampling_rate_hz(), true);
}

}  // namespace

EpochSeries stationary_bootstrap_resample(const EpochSeries& series, double expected_block_length,
                                          Rng& rng) {
  return gather_rows(series,
                     stationary_bootstrap_indices(series.length(), expected_block_length, rng));
}

EpochSeries fixed_block_resample(const EpochSeries& series, double block_length, Rng& rng) {
  const Index n = series.length();
  const Index block = std::clamp<Index>(static_cast<Index>(std::llround(block_length)), 1, n);
  std::vector<Index> idx;
  idx.reserve(static_cast<std::size_t>(n));
  while (static_cast<Index>(idx.size()) < n) {
    const Index start = uniform_index(rng, 0, n - 1);
    for (Index i = 0; i < block && static_cast<Index>(idx.size()) < n; ++i) {
      idx.push_back((start + i) % n);
    }
  }
  return gather_rows(series, idx);
}

// ---------------------------------------------------------------------------

namespace {

// Flat-top lag window.
double flat_top(double s) {
  const double a = std::abs(s);
  if (a <= 0.5) return 1.0;
  if (a <= 1.0) return 2.0 * (1.0 - a);
  return 0.0;
}

}  // namespace

double select_block_length_univariate(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Index n = x.size();
  if (n < 50) {
    throw Error(ErrorKind::SeriesTooShort,
                "block-length selection needs T >= 50, got " + std::to_string(n));
  }
  const double dn = static_cast<double>(n);
  const Index kn = std::max<Index>(5, static_cast<Index>(std::ceil(std::log10(dn))));
  const Index mmax = std::min<Index>(n - 1, static_cast<Index>(std::ceil(std::sqrt(dn))) + kn);
  const double bmax = std::ceil(std::min(3.0 * std::sqrt(dn), dn / 3.0));
  const double critical = 1.959963984540054 * std::sqrt(std::log10(dn) / dn);

  const Eigen::VectorXd c = x.array() - x.mean();
  std::vector<double> acov(static_cast<std::size_t>(mmax + 1));
  for (Index k = 0; k <= mmax; ++k) {
    acov[static_cast<std::size_t>(k)] = c.head(n - k).dot(c.tail(n - k)) / dn;
  }
  if (!(acov[0] > 0.0)) return 1.0;

  // Smallest lag after which kn consecutive autocorrelations are
  // insignificant.
  const auto insignificant = [&](Index lag) {
    return std::abs(acov[static_cast<std::size_t>(lag)] / acov[0]) < critical;
  };
  Index mhat = 0;
  for (Index j = 1; j + kn - 1 <= mmax && mhat == 0; ++j) {
    bool run = true;
    for (Index k = j; k < j + kn && run; ++k) run = insignificant(k);
    if (run) mhat = j;
  }
  if (mhat == 0) {
    for (Index k = 1; k <= mmax; ++k) {
      if (!insignificant(k)) mhat = k;
    }
    if (mhat == 0) mhat = 1;
  }
  const Index m = std::min<Index>(2 * mhat, mmax);

  double g = 0.0;
  double spectrum_at_zero = 0.0;
  for (Index k = -m; k <= m; ++k) {
    const double lam = flat_top(static_cast<double>(k) / static_cast<double>(m));
    const double r = acov[static_cast<std::size_t>(std::abs(k))];
    g += lam * std::abs(static_cast<double>(k)) * r;
    spectrum_at_zero += lam * r;
  }
  const double d_sb = 2.0 * spectrum_at_zero * spectrum_at_zero;
  if (!(d_sb > 0.0)) return bmax;
  const double b = std::cbrt(2.0 * g * g / d_sb) * std::cbrt(dn);
  return std::min(b, bmax);
}

double select_block_length(const EpochSeries& series) {
  double sum = 0.0;
  for (Index c = 0; c < series.dimension(); ++c) {
    sum += select_block_length_univariate(series.data().col(c));
  }
  return std::max(1.0, sum / static_cast<double>(series.dimension()));
}

// ---------------------------------------------------------------------------

namespace {

struct Replicates {
  std::vector<std::vector<double>> per_band;  // [band][replicate]
  double block_length = 1.0;
};

Replicates run_replicates(const EpochSeries& series, const std::vector<Band>& bands,
                          const Kernel& kernel, const BootstrapConfig& config) {
  config.validate();
  Replicates out;
  out.block_length = config.block_length ? *config.block_length : select_block_length(series);
  out.per_band.assign(bands.size(), std::vector<double>(static_cast<std::size_t>(config.replications)));
  for (int b = 0; b < config.replications; ++b) {
    Rng rng = make_stream(config.seed, static_cast<std::uint64_t>(series.epoch_id()),
                          static_cast<std::uint64_t>(b));
    const EpochSeries resample =
        config.scheme == ResamplingScheme::stationary
            ? stationary_bootstrap_resample(series, out.block_length, rng)
            : fixed_block_resample(series, out.block_length, rng);
    const EnergyProfile profile(estimate_spectral_matrix(resample, kernel));
    for (std::size_t i = 0; i < bands.size(); ++i) {
      out.per_band[i][static_cast<std::size_t>(b)] =
          fs_ratio(profile, bands[i], series.epoch_id()).ratio;
    }
  }
  return out;
}

ConfidenceInterval percentile_interval(std::vector<double> values, double level) {
  std::sort(values.begin(), values.end());
  const double tail = 0.5 * (1.0 - level);
  return ConfidenceInterval{quantile_sorted(values, tail), quantile_sorted(values, 1.0 - tail)};
}

}  // namespace

BootstrapDistribution bootstrap_fs_ratio(const EpochSeries& series, const Band& band_radians,
                                         const Kernel& kernel, const BootstrapConfig& config) {
  Replicates reps = run_replicates(series, {band_radians}, kernel, config);
  BootstrapDistribution out;
  out.ratios = std::move(reps.per_band.front());
  out.block_length = reps.block_length;
  out.interval = percentile_interval(out.ratios, config.confidence_level);
  return out;
}

ConfidenceInterval bootstrap_ci(const EpochSeries& series, const Band& band_radians,
                                const Kernel& kernel, const BootstrapConfig& config) {
  return bootstrap_fs_ratio(series, band_radians, kernel, config).interval;
}

std::vector<ConfidenceInterval> bootstrap_ci(const EpochSeries& series,
                                             const std::vector<Band>& bands_radians,
                                             const Kernel& kernel, const BootstrapConfig& config) {
  const Replicates reps = run_replicates(series, bands_radians, kernel, config);
  std::vector<ConfidenceInterval> out;
  out.reserve(bands_radians.size());
  for (const auto& values : reps.per_band) {
    out.push_back(percentile_interval(values, config.confidence_level));
  }
  return out;
}

}  // namespace specband
