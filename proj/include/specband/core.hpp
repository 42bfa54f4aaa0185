#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace specband {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorKind {
  InvalidArgument,
  MissingFile,
  ParseError,
  NonFiniteValue,
  InconsistentRows,
  SeriesTooShort,
  InvalidBand,
  NyquistExceeded,
  InvalidKernel,
  BandwidthTooSmall,
  EmptyBand,
  ZeroTotalEnergy,
  EmptyInput,
  DimensionMismatch,
  LengthMismatch,
  DegenerateVariance,
  NonstationaryCoefficients,
  NotPositiveSemidefinite,
  SingularCovariance,
  ZeroDiagonalSpectrum,
  InvalidConfig,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// ---------------------------------------------------------------------------
// EpochSeries
// ---------------------------------------------------------------------------

// One epoch of a multivariate recording: T rows (time) by d columns.
// Dimension may differ between epochs of the same dataset.
class EpochSeries {
 public:
  static constexpr Index kMinLength = 4;

  // Validates shape and finiteness. When `demean` is set the per-column
  // sample mean is subtracted and the series is flagged as demeaned.
  EpochSeries(int epoch_id, Eigen::MatrixXd data, double sampling_rate_hz = 1.0,
              bool demean = true);

  int epoch_id() const noexcept { return epoch_id_; }
  const Eigen::MatrixXd& data() const noexcept { return data_; }
  Index length() const noexcept { return data_.rows(); }
  Index dimension() const noexcept { return data_.cols(); }
  double sampling_rate_hz() const noexcept { return sampling_rate_hz_; }
  bool demeaned() const noexcept { return demeaned_; }

  // Idempotent: a demeaned series is returned unchanged.
  EpochSeries demean() const;

 private:
  int epoch_id_;
  Eigen::MatrixXd data_;
  double sampling_rate_hz_;
  bool demeaned_;
};

// ---------------------------------------------------------------------------
// Frequency bands
// ---------------------------------------------------------------------------

enum class FrequencyUnit { radians, cycles, hertz };

std::string_view to_string(FrequencyUnit unit) noexcept;
FrequencyUnit parse_frequency_unit(std::string_view text);

// Frequency interval (lo, hi]. Validated on construction except for the
// Nyquist bound in hertz, which needs a sampling rate (see band_to_radians).
struct Band {
  double lo = 0.0;
  double hi = 0.0;
  FrequencyUnit unit = FrequencyUnit::radians;

  static Band make(double lo, double hi, FrequencyUnit unit);
  static Band radians(double lo, double hi) { return make(lo, hi, FrequencyUnit::radians); }
  static Band cycles(double lo, double hi) { return make(lo, hi, FrequencyUnit::cycles); }
  static Band hertz(double lo, double hi) { return make(lo, hi, FrequencyUnit::hertz); }

  friend bool operator==(const Band&, const Band&) = default;
};

// radians = 2*pi*cycles = 2*pi*hertz/sampling_rate.
Band band_to_radians(const Band& band, double sampling_rate_hz = 1.0);
Band convert_band(const Band& band, FrequencyUnit target, double sampling_rate_hz = 1.0);

// ---------------------------------------------------------------------------
// FrequencyGrid
// ---------------------------------------------------------------------------

// Fourier frequencies w_j = 2*pi*j/T for j = -ceil(T/2)+1, ..., floor(T/2).
//
// Storage everywhere in the library follows FFT bin order: bin k holds
// harmonic j = k for k <= floor(T/2) and j = k - T above that.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(Index length);

  Index size() const noexcept { return length_; }
  double spacing() const noexcept { return kTwoPi / static_cast<double>(length_); }

  Index min_harmonic() const noexcept { return -((length_ + 1) / 2) + 1; }
  Index max_harmonic() const noexcept { return length_ / 2; }

  Index harmonic(Index bin) const noexcept {
    return bin <= length_ / 2 ? bin : bin - length_;
  }
  Index bin(Index harmonic) const noexcept {
    return harmonic >= 0 ? harmonic : harmonic + length_;
  }
  double omega(Index bin) const noexcept {
    return spacing() * static_cast<double>(harmonic(bin));
  }
  // Bin holding -omega(bin).
  Index mirror(Index bin) const noexcept { return bin == 0 ? 0 : length_ - bin; }

  // Positive harmonics j with lo < w_j <= hi, as the inclusive range
  // [first, last]. Empty when first > last. Band edges that coincide with a
  // grid frequency up to rounding are snapped onto it.
  std::pair<Index, Index> band_harmonics(const Band& band_radians) const;

 private:
  Index length_;
};

// ---------------------------------------------------------------------------
// Kernel
// ---------------------------------------------------------------------------

enum class KernelType { bartlett_priestley, daniell };

std::string_view to_string(KernelType type) noexcept;
KernelType parse_kernel_type(std::string_view text);

// Which sample size drives the default bandwidth: the epoch length T
// (default) or the number of epochs N.
enum class BandwidthRule { series_length, epoch_count };

// Smoothing kernel for the spectral-matrix estimator.
//
// The base density K lives on [-pi, pi] and integrates to one; the scaled
// kernel is K_h(x) = K(x/h)/h with support [-pi*h, pi*h]. Bartlett-Priestley
// carries h directly. Daniell carries a span m (2m+1 ordinates); its
// continuous analogue is the uniform density with h = (2m+1)/T, i.e. support
// half-width 2*pi*(m+1/2)/T.
class Kernel {
 public:
  static Kernel bartlett_priestley(double bandwidth);
  static Kernel daniell(int span);
  // h = n^-0.4 (Bartlett-Priestley) or m = ceil(sqrt(n)) (Daniell).
  static Kernel with_default_bandwidth(KernelType type, Index n);

  KernelType type() const noexcept { return type_; }
  int span() const noexcept { return span_; }
  double bandwidth(Index length) const noexcept;

  // Base density K(x), zero outside [-pi, pi].
  double density(double x) const noexcept;

  std::string describe() const;

 private:
  Kernel(KernelType type, double bandwidth, int span)
      : type_(type), bandwidth_(bandwidth), span_(span) {}

  KernelType type_;
  double bandwidth_;
  int span_;
};

// ---------------------------------------------------------------------------
// Dataset I/O
// ---------------------------------------------------------------------------

struct LoadOptions {
  bool header = false;  // skip the first CSV row
};

struct EpochDataset {
  double sampling_rate_hz = 1.0;
  std::vector<EpochSeries> epochs;
};

// Reads a JSON manifest {"sampling_rate_hz": fs, "epochs": [{"id", "path"}]}.
// Relative paths resolve against the manifest's directory. Epochs are
// returned in manifest order and demeaned column-wise.
EpochDataset load_epoch_dataset(const std::filesystem::path& manifest_path,
                                const LoadOptions& options = {});

// Parses one numeric CSV (rows = time, columns = components).
Eigen::MatrixXd read_numeric_csv(const std::filesystem::path& path, bool header = false);

void write_numeric_csv(const std::filesystem::path& path, const Eigen::MatrixXd& data);

// Writes epoch_NNNN.csv files plus manifest.json; returns written paths.
std::vector<std::filesystem::path> save_epoch_dataset(const std::filesystem::path& directory,
                                                      const std::vector<EpochSeries>& epochs,
                                                      double sampling_rate_hz);

}  // namespace specband
