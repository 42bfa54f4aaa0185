#pragma once

#include "specband/spectral.hpp"

namespace specband {

// Spectral matrix of the stacked 2d-variate series (Y_i, Y_j). The four
// d x d blocks are G11 = g_ii, G12 = g_ij, G21 = g_ji, G22 = g_jj.
struct JointSpectralEstimate {
  SpectralMatrixEstimate estimate;
  Index block_dimension;

  auto block(Index bin, int row, int col) const {
    return estimate.at(bin).block(row * block_dimension, col * block_dimension, block_dimension,
                                  block_dimension);
  }
};

JointSpectralEstimate joint_spectral_estimate(const EpochSeries& epoch_i,
                                              const EpochSeries& epoch_j, const Kernel& kernel);

// D_hat = integral over (a, b] of ||vec(g_ii - g_jj)||^2, as a Riemann sum.
double d_statistic(const JointSpectralEstimate& joint, const Band& band_radians);

struct KernelConstants {
  double a_k = 0.0;  // integral of K^2 over [-pi, pi]
  double b_k = 0.0;  // 4 * integral over (a - pi, b + pi) of (K * K)(v)^2
};

// Trapezoid quadrature (2000 points per smooth piece) on the base density K.
KernelConstants kernel_constants(const Kernel& kernel, const Band& band_radians);

struct EqualityTestResult {
  double d_hat = 0.0;
  double mu_hat = 0.0;
  double sigma2_hat = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  double bandwidth = 0.0;
  Band band;
  Kernel kernel;
};

// One-sided asymptotic test of H0: g_ii = g_jj on (a, b) for two epochs of
// equal dimension and length. mu and sigma^2 use the plug-in joint estimate
// and integrate the band indicator over (a,b) and (-b,-a); both are reported
// on the scale of d_hat, so
//   z = (2*pi*T*sqrt(h) * d_hat - mu_hat/sqrt(h)) / sigma_hat.
// Throws DegenerateVariance when sigma^2 is not positive (e.g. i == j).
EqualityTestResult equality_test(const EpochSeries& epoch_i, const EpochSeries& epoch_j,
                                 const Band& band_radians, const Kernel& kernel);
EqualityTestResult equality_test(const JointSpectralEstimate& joint, const Band& band_radians);

// Standard normal upper tail 1 - Phi(z).
double normal_upper_tail(double z);

}  // namespace specband
