#pragma once

#include "specband/core.hpp"

#include <complex>
#include <filesystem>
#include <vector>

namespace specband {

using Complex = std::complex<double>;

// Finite Fourier transform of every component:
//   J_T(w_k) = (2*pi*T)^(-1/2) * sum_{t=1..T} Y_t exp(-i t w_k).
// Row k of `values` is J_T(w_k)^T for FFT bin k of `grid`.
struct DftResult {
  FrequencyGrid grid;
  Eigen::MatrixXcd values;

  Index dimension() const noexcept { return values.cols(); }
};

// FFT-based; demeans a copy if the series is not already demeaned.
DftResult compute_dft(const EpochSeries& series);

// Per-frequency d x d matrices stored in FFT bin order.
class SpectralMatrices {
 public:
  SpectralMatrices(FrequencyGrid grid, Index dimension);

  const FrequencyGrid& grid() const noexcept { return grid_; }
  Index dimension() const noexcept { return dimension_; }
  Index size() const noexcept { return grid_.size(); }

  const Eigen::MatrixXcd& at(Index bin) const { return matrices_[static_cast<std::size_t>(bin)]; }
  Eigen::MatrixXcd& at(Index bin) { return matrices_[static_cast<std::size_t>(bin)]; }

  // Squared Frobenius norm ||vec(M(w_k))||^2 at one bin.
  double frobenius_sq(Index bin) const { return at(bin).squaredNorm(); }

 private:
  FrequencyGrid grid_;
  Index dimension_;
  std::vector<Eigen::MatrixXcd> matrices_;
};

// Raw periodogram I_T(w) = J_T(w) J_T(w)^*: rank one, Hermitian, PSD.
class PeriodogramSet : public SpectralMatrices {
 public:
  using SpectralMatrices::SpectralMatrices;
};

// Kernel-smoothed spectral matrix f_hat(w_k) at every Fourier frequency.
class SpectralMatrixEstimate : public SpectralMatrices {
 public:
  SpectralMatrixEstimate(FrequencyGrid grid, Index dimension, Kernel kernel)
      : SpectralMatrices(grid, dimension), kernel_(kernel) {}

  const Kernel& kernel() const noexcept { return kernel_; }

 private:
  Kernel kernel_;
};

PeriodogramSet compute_periodogram(const DftResult& dft);

// Circular smoothing weights indexed by bin offset (offset l lives at index
// l mod T). Bartlett-Priestley weights are (2*pi/T) K_h(2*pi*l/T) wrapped
// periodically and renormalised to sum to one; Daniell gives 1/(2m+1) on
// offsets -m..m.
std::vector<double> smoothing_weights(const Kernel& kernel, Index length);

// f_hat(w_k) = sum_l weight(l) I_T(w_{k+l}), evaluated at every grid point
// with periodic wrap-around.
SpectralMatrixEstimate smooth_spectral_matrix(const PeriodogramSet& periodogram,
                                              const Kernel& kernel);

// dft -> periodogram -> smoothing.
SpectralMatrixEstimate estimate_spectral_matrix(const EpochSeries& series, const Kernel& kernel);

// Long-format dump for plotting: omega, row, col, re, im (one row per entry,
// positive and negative frequencies in ascending order).
void write_spectrum_csv(const std::filesystem::path& path, const SpectralMatrices& spectrum);

}  // namespace specband
