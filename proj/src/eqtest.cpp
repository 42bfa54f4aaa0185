#include "specband/eqtest.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <tuple>

namespace specband {

JointSpectralEstimate joint_spectral_estimate(const EpochSeries& epoch_i,
                                              const EpochSeries& epoch_j, const Kernel& kernel) {
  if (epoch_i.dimension() != epoch_j.dimension()) {
    throw Error(ErrorKind::DimensionMismatch,
                "epochs " + std::to_string(epoch_i.epoch_id()) + " and " +
                    std::to_string(epoch_j.epoch_id()) + " have dimensions " +
                    std::to_string(epoch_i.dimension()) + " and " +
                    std::to_string(epoch_j.dimension()) +
                    "; compare epochs of unequal dimension with FS-ratios instead");
  }
  if (epoch_i.length() != epoch_j.length()) {
    throw Error(ErrorKind::LengthMismatch, "epochs " + std::to_string(epoch_i.epoch_id()) +
                                               " and " + std::to_string(epoch_j.epoch_id()) +
                                               " differ in length");
  }
  const Index d = epoch_i.dimension();
  Eigen::MatrixXd stacked(epoch_i.length(), 2 * d);
  stacked.leftCols(d) = epoch_i.demean().data();
  stacked.rightCols(d) = epoch_j.demean().data();
  const EpochSeries joint(epoch_i.epoch_id(), std::move(stacked), epoch_i.sampling_rate_hz());
  return JointSpectralEstimate{estimate_spectral_matrix(joint, kernel), d};
}

namespace {

std::pair<Index, Index> nonempty_band(const FrequencyGrid& grid, const Band& band) {
  const auto range = grid.band_harmonics(band);
  if (range.first > range.second) {
    throw Error(ErrorKind::EmptyBand, "no Fourier frequency in (" + std::to_string(band.lo) +
                                          ", " + std::to_string(band.hi) + "]");
  }
  return range;
}

double trapezoid(double lo, double hi, int points, auto&& f) {
  if (!(hi > lo)) return 0.0;
  const double step = (hi - lo) / (points - 1);
  double sum = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < points - 1; ++i) sum += f(lo + step * i);
  return sum * step;
}

constexpr int kQuadraturePoints = 2000;

KernelConstants compute_kernel_constants(const Kernel& kernel, const Band& band) {
  KernelConstants out;
  out.a_k = trapezoid(-kPi, kPi, kQuadraturePoints, [&](double v) {
    const double k = kernel.density(v);
    return k * k;
  });

  // (K*K)(v), integrated only where both factors are nonzero so the
  // integrand stays smooth.
  const auto self_convolution = [&](double v) {
    const double lo = std::max(-kPi, -kPi - v);
    const double hi = std::min(kPi, kPi - v);
    return trapezoid(lo, hi, kQuadraturePoints,
                     [&](double u) { return kernel.density(u) * kernel.density(u + v); });
  };
  const auto squared = [&](double v) {
    const double c = self_convolution(v);
    return c * c;
  };
  const double outer_lo = band.lo - kPi;
  const double outer_hi = band.hi + kPi;
  double integral = 0.0;
  if (outer_lo < 0.0 && outer_hi > 0.0) {
    integral = trapezoid(outer_lo, 0.0, kQuadraturePoints, squared) +
               trapezoid(0.0, outer_hi, kQuadraturePoints, squared);
  } else {
    integral = trapezoid(outer_lo, outer_hi, kQuadraturePoints, squared);
  }
  out.b_k = 4.0 * integral;
  return out;
}

}  // namespace

KernelConstants kernel_constants(const Kernel& kernel, const Band& band_radians) {
  // Depends only on the base density and the band; Monte Carlo loops call
  // this repeatedly with the same arguments.
  using Key = std::tuple<KernelType, double, double>;
  static std::mutex mutex;
  static Key last_key{KernelType::daniell, -1.0, -1.0};
  static KernelConstants last_value;
  const Key key{kernel.type(), band_radians.lo, band_radians.hi};
  {
    std::lock_guard lock(mutex);
    if (key == last_key) return last_value;
  }
  const KernelConstants value = compute_kernel_constants(kernel, band_radians);
  std::lock_guard lock(mutex);
  last_key = key;
  last_value = value;
  return value;
}

double d_statistic(const JointSpectralEstimate& joint, const Band& band_radians) {
  const FrequencyGrid& grid = joint.estimate.grid();
  const auto [first, last] = nonempty_band(grid, band_radians);
  double sum = 0.0;
  for (Index j = first; j <= last; ++j) {
    const Index k = grid.bin(j);
    sum += (joint.block(k, 0, 0) - joint.block(k, 1, 1)).squaredNorm();
  }
  return grid.spacing() * sum;
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

EqualityTestResult equality_test(const JointSpectralEstimate& joint, const Band& band_radians) {
  const FrequencyGrid& grid = joint.estimate.grid();
  const auto [first, last] = nonempty_band(grid, band_radians);
  const Kernel& kernel = joint.estimate.kernel();
  const KernelConstants constants = kernel_constants(kernel, band_radians);

  const auto sign = [](int p, int q) { return p == q ? 1.0 : -1.0; };

  double mean_sum = 0.0;
  double var_sum = 0.0;
  double var_scale = 0.0;  // same sum without signs
  for (Index j = first; j <= last; ++j) {
    const Index k = grid.bin(j);
    std::array<Eigen::MatrixXcd, 4> g;
    for (int p = 0; p < 2; ++p) {
      for (int q = 0; q < 2; ++q) g[static_cast<std::size_t>(2 * p + q)] = joint.block(k, p, q);
    }
    const auto blk = [&](int p, int q) -> const Eigen::MatrixXcd& {
      return g[static_cast<std::size_t>(2 * p + q)];
    };

    for (int p1 = 0; p1 < 2; ++p1) {
      for (int p2 = 0; p2 < 2; ++p2) mean_sum += sign(p1, p2) * std::norm(blk(p1, p2).trace());
    }
    // tr(A conj(B)^T) = sum of A .* conj(B)
    for (int p1 = 0; p1 < 2; ++p1) {
      for (int p2 = 0; p2 < 2; ++p2) {
        for (int p3 = 0; p3 < 2; ++p3) {
          for (int p4 = 0; p4 < 2; ++p4) {
            const Complex tr =
                (blk(p1, p3).array() * blk(p2, p4).array().conjugate()).sum();
            var_sum += sign(p1, p2) * sign(p3, p4) * std::norm(tr);
            var_scale += std::norm(tr);
          }
        }
      }
    }
  }

  EqualityTestResult out{.band = band_radians, .kernel = kernel};
  out.d_hat = d_statistic(joint, band_radians);
  // f_hat estimates f itself, while the limit theory is written for
  // f / (2 pi) integrated over both signs of the band. Both plug-ins are
  // rescaled by 1/c, c = 2 / (2 pi)^2, so they live on the scale of d_hat.
  // Factor 2 inside: the indicator covers (a,b) and (-b,-a), whose
  // contributions are equal by conjugate symmetry.
  const double c = 2.0 / (kTwoPi * kTwoPi);
  out.mu_hat = constants.a_k * 2.0 * grid.spacing() * mean_sum / c;
  out.sigma2_hat = constants.b_k * 2.0 * grid.spacing() * var_sum / (c * c);
  // Identical blocks cancel to rounding noise rather than exactly zero.
  if (!(var_sum > 1e-12 * var_scale) || !std::isfinite(out.sigma2_hat)) {
    throw Error(ErrorKind::DegenerateVariance,
                "plug-in variance is " + std::to_string(out.sigma2_hat) +
                    "; the joint spectrum is degenerate on this band");
  }

  const double n = static_cast<double>(grid.size());
  const double h = kernel.bandwidth(grid.size());
  out.bandwidth = h;
  out.z = (kTwoPi * n * std::sqrt(h) * out.d_hat - out.mu_hat / std::sqrt(h)) /
          std::sqrt(out.sigma2_hat);
  out.p_value = normal_upper_tail(out.z);
  return out;
}

EqualityTestResult equality_test(const EpochSeries& epoch_i, const EpochSeries& epoch_j,
                                 const Band& band_radians, const Kernel& kernel) {
  return equality_test(joint_spectral_estimate(epoch_i, epoch_j, kernel), band_radians);
}

}  // namespace specband
