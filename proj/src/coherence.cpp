#include "specband/coherence.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace specband {

double squared_coherence(const SpectralMatrices& estimate, Index bin, Index r, Index s) {
  const Eigen::MatrixXcd& f = estimate.at(bin);
  const double frr = f(r, r).real();
  const double fss = f(s, s).real();
  if (!(frr > 0.0) || !(fss > 0.0)) {
    throw Error(ErrorKind::ZeroDiagonalSpectrum,
                "spectral diagonal is not positive at omega = " +
                    std::to_string(estimate.grid().omega(bin)) + " (component " +
                    std::to_string(frr > 0.0 ? s : r) + ")");
  }
  return std::norm(f(r, s)) / (frr * fss);
}

CoherenceSummary squared_coherence_band(const SpectralMatrices& estimate,
                                        const Band& band_radians, int epoch_id) {
  const Index d = estimate.dimension();
  if (d < 2) {
    throw Error(ErrorKind::InvalidArgument, "coherence needs at least 2 components, got " +
                                                std::to_string(d));
  }
  const FrequencyGrid& grid = estimate.grid();
  const auto [first, last] = grid.band_harmonics(band_radians);
  if (first > last) {
    throw Error(ErrorKind::EmptyBand, "no Fourier frequency in (" + std::to_string(band_radians.lo) +
                                          ", " + std::to_string(band_radians.hi) + "]");
  }
  double sum = 0.0;
  for (Index j = first; j <= last; ++j) {
    const Index k = grid.bin(j);
    for (Index r = 0; r < d; ++r) {
      for (Index s = r + 1; s < d; ++s) sum += squared_coherence(estimate, k, r, s);
    }
  }
  const double pairs = static_cast<double>(d * (d - 1) / 2);
  const double count = static_cast<double>(last - first + 1) * pairs;
  return CoherenceSummary{epoch_id, band_radians, sum / count};
}

EpochSeries prewhiten(const EpochSeries& input) {
  const EpochSeries series = input.demean();
  const Eigen::MatrixXd& x = series.data();
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(series.length());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularCovariance, "eigendecomposition of the covariance failed");
  }
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const double lmax = lambda(lambda.size() - 1);
  const double lmin = lambda(0);
  if (!(lmax > 0.0) || !(lmin > 1e-10 * lmax)) {
    throw Error(ErrorKind::SingularCovariance,
                "lag-0 covariance is singular: smallest eigenvalue " + std::to_string(lmin) +
                    ", largest " + std::to_string(lmax));
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const Eigen::MatrixXd inv_sqrt =
      v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  // Rows are X_t^T, so the transform acts from the right (inv_sqrt is symmetric).
  return EpochSeries(series.epoch_id(), x * inv_sqrt, series.sampling_rate_hz(), true);
}

}  // namespace specband
