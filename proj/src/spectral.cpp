#include "specband/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>

namespace specband {

namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
    if (ptr == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* ptr;
};

}  // namespace

DftResult compute_dft(const EpochSeries& input) {
  const EpochSeries series = input.demean();
  const Index n = series.length();
  const Index d = series.dimension();
  const Index half = n / 2 + 1;

  FftwBuffer in(sizeof(double) * static_cast<std::size_t>(n * d));
  FftwBuffer out(sizeof(fftw_complex) * static_cast<std::size_t>(half * d));
  auto* in_data = static_cast<double*>(in.ptr);
  auto* out_data = static_cast<fftw_complex*>(out.ptr);

  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    const int len = static_cast<int>(n);
    plan = fftw_plan_many_dft_r2c(1, &len, static_cast<int>(d), in_data, nullptr, 1,
                                  static_cast<int>(n), out_data, nullptr, 1,
                                  static_cast<int>(half), FFTW_ESTIMATE);
  }
  // Eigen storage is column-major, one contiguous column per component.
  std::copy(series.data().data(), series.data().data() + n * d, in_data);
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  DftResult result{FrequencyGrid(n), Eigen::MatrixXcd(n, d)};
  const double scale = 1.0 / std::sqrt(kTwoPi * static_cast<double>(n));
  for (Index k = 0; k < half; ++k) {
    // FFTW sums over t = 0..T-1; the definition runs t = 1..T.
    const double w = result.grid.omega(k);
    const Complex phase = std::polar(scale, -w);
    for (Index c = 0; c < d; ++c) {
      const fftw_complex& z = out_data[c * half + k];
      result.values(k, c) = phase * Complex(z[0], z[1]);
    }
  }
  for (Index k = half; k < n; ++k) {
    result.values.row(k) = result.values.row(n - k).conjugate();
  }
  return result;
}

// ---------------------------------------------------------------------------

SpectralMatrices::SpectralMatrices(FrequencyGrid grid, Index dimension)
    : grid_(grid),
      dimension_(dimension),
      matrices_(static_cast<std::size_t>(grid.size()),
                Eigen::MatrixXcd::Zero(dimension, dimension)) {}

PeriodogramSet compute_periodogram(const DftResult& dft) {
  const Index n = dft.grid.size();
  const Index d = dft.dimension();
  PeriodogramSet out(dft.grid, d);
  for (Index k = 0; k < n; ++k) {
    const auto j = dft.values.row(k);
    Eigen::MatrixXcd& m = out.at(k);
    // Entry-wise J_r conj(J_s) keeps the matrix exactly Hermitian.
    for (Index s = 0; s < d; ++s) {
      for (Index r = 0; r < d; ++r) m(r, s) = j(r) * std::conj(j(s));
    }
    for (Index r = 0; r < d; ++r) m(r, r) = Complex(std::norm(j(r)), 0.0);
  }
  return out;
}

std::vector<double> smoothing_weights(const Kernel& kernel, Index length) {
  std::vector<double> weights(static_cast<std::size_t>(length), 0.0);
  const auto slot = [length](Index offset) {
    return static_cast<std::size_t>(((offset % length) + length) % length);
  };
  if (kernel.type() == KernelType::daniell) {
    const double w = 1.0 / (2.0 * kernel.span() + 1.0);
    for (Index l = -kernel.span(); l <= kernel.span(); ++l) weights[slot(l)] += w;
    return weights;
  }

  const double h = kernel.bandwidth(length);
  const double step = kTwoPi / static_cast<double>(length);
  const auto reach = static_cast<Index>(std::floor(kPi * h / step));
  double total = 0.0;
  for (Index l = -reach; l <= reach; ++l) {
    const double w = step * kernel.density(static_cast<double>(l) * step / h) / h;
    weights[slot(l)] += w;
    total += w;
  }
  Index nonzero = 0;
  for (double w : weights) nonzero += (w > 0.0) ? 1 : 0;
  if (nonzero < 3 || !(total > 0.0)) {
    throw Error(ErrorKind::BandwidthTooSmall,
                "bandwidth " + std::to_string(h) + " gives " + std::to_string(nonzero) +
                    " ordinates with nonzero weight at T = " + std::to_string(length));
  }
  for (double& w : weights) w /= total;
  return weights;
}

namespace {

void clean_diagonal(Eigen::MatrixXcd& m) {
  for (Index r = 0; r < m.rows(); ++r) m(r, r) = Complex(std::max(0.0, m(r, r).real()), 0.0);
}

// Daniell average as a sliding window sum, refreshed periodically so that
// rounding drift from add/subtract does not accumulate.
void smooth_daniell_running(const PeriodogramSet& p, int span, SpectralMatrixEstimate& out) {
  const Index n = p.size();
  const Index d = p.dimension();
  const double inv = 1.0 / (2.0 * span + 1.0);
  const auto wrap = [n](Index k) { return ((k % n) + n) % n; };
  constexpr Index kRefresh = 64;

  Eigen::MatrixXcd window = Eigen::MatrixXcd::Zero(d, d);
  for (Index k = 0; k < n; ++k) {
    if (k % kRefresh == 0) {
      window.setZero();
      for (Index l = -span; l <= span; ++l) window += p.at(wrap(k + l));
    } else {
      window += p.at(wrap(k + span));
      window -= p.at(wrap(k - span - 1));
    }
    Eigen::MatrixXcd& f = out.at(k);
    f = window * inv;
    clean_diagonal(f);
  }
}

void smooth_general(const PeriodogramSet& p, const std::vector<double>& weights,
                    SpectralMatrixEstimate& out) {
  const Index n = p.size();
  std::vector<std::pair<Index, double>> taps;
  for (Index l = 0; l < n; ++l) {
    if (weights[static_cast<std::size_t>(l)] != 0.0) {
      taps.emplace_back(l, weights[static_cast<std::size_t>(l)]);
    }
  }
  for (Index k = 0; k < n; ++k) {
    Eigen::MatrixXcd& f = out.at(k);
    f.setZero();
    for (const auto& [offset, w] : taps) f += w * p.at((k + offset) % n);
    // Restore exact Hermitian symmetry lost to summation order.
    f = (0.5 * (f + f.adjoint())).eval();
    clean_diagonal(f);
  }
}

}  // namespace

SpectralMatrixEstimate smooth_spectral_matrix(const PeriodogramSet& periodogram,
                                              const Kernel& kernel) {
  const Index n = periodogram.size();
  SpectralMatrixEstimate out(periodogram.grid(), periodogram.dimension(), kernel);
  if (kernel.type() == KernelType::daniell && 2 * static_cast<Index>(kernel.span()) + 1 <= n) {
    smooth_daniell_running(periodogram, kernel.span(), out);
  } else {
    smooth_general(periodogram, smoothing_weights(kernel, n), out);
  }
  return out;
}

SpectralMatrixEstimate estimate_spectral_matrix(const EpochSeries& series, const Kernel& kernel) {
  return smooth_spectral_matrix(compute_periodogram(compute_dft(series)), kernel);
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectralMatrices& spectrum) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  out << "omega,row,col,re,im\n";
  const FrequencyGrid& grid = spectrum.grid();
  char buf[128];
  for (Index j = grid.min_harmonic(); j <= grid.max_harmonic(); ++j) {
    const Index k = grid.bin(j);
    const auto& m = spectrum.at(k);
    for (Index r = 0; r < m.rows(); ++r) {
      for (Index s = 0; s < m.cols(); ++s) {
        std::snprintf(buf, sizeof buf, "%.6g,%lld,%lld,%.6g,%.6g\n", grid.omega(k),
                      static_cast<long long>(r + 1), static_cast<long long>(s + 1),
                      m(r, s).real(), m(r, s).imag());
        out << buf;
      }
    }
  }
}

}  // namespace specband
