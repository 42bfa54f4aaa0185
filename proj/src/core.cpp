#include "specband/core.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace specband {

namespace fs = std::filesystem;

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::InconsistentRows: return "InconsistentRows";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::InvalidBand: return "InvalidBand";
    case ErrorKind::NyquistExceeded: return "NyquistExceeded";
    case ErrorKind::InvalidKernel: return "InvalidKernel";
    case ErrorKind::BandwidthTooSmall: return "BandwidthTooSmall";
    case ErrorKind::EmptyBand: return "EmptyBand";
    case ErrorKind::ZeroTotalEnergy: return "ZeroTotalEnergy";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::NonstationaryCoefficients: return "NonstationaryCoefficients";
    case ErrorKind::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::ZeroDiagonalSpectrum: return "ZeroDiagonalSpectrum";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

// ---------------------------------------------------------------------------

EpochSeries::EpochSeries(int epoch_id, Eigen::MatrixXd data, double sampling_rate_hz,
                         bool demean)
    : epoch_id_(epoch_id),
      data_(std::move(data)),
      sampling_rate_hz_(sampling_rate_hz),
      demeaned_(false) {
  if (data_.cols() < 1) {
    throw Error(ErrorKind::InvalidArgument, "epoch " + std::to_string(epoch_id) +
                                                " has no components");
  }
  if (data_.rows() < kMinLength) {
    throw Error(ErrorKind::SeriesTooShort,
                "epoch " + std::to_string(epoch_id) + " has " + std::to_string(data_.rows()) +
                    " samples; at least " + std::to_string(kMinLength) + " required");
  }
  if (!(sampling_rate_hz_ > 0.0) || !std::isfinite(sampling_rate_hz_)) {
    throw Error(ErrorKind::InvalidArgument, "sampling rate must be positive");
  }
  for (Index c = 0; c < data_.cols(); ++c) {
    for (Index r = 0; r < data_.rows(); ++r) {
      if (!std::isfinite(data_(r, c))) {
        throw Error(ErrorKind::NonFiniteValue, "NonFiniteValue{epoch=" +
                                                   std::to_string(epoch_id) +
                                                   ",row=" + std::to_string(r) +
                                                   ",col=" + std::to_string(c) + "}");
      }
    }
  }
  if (demean) {
    data_.rowwise() -= data_.colwise().mean();
    demeaned_ = true;
  }
}

EpochSeries EpochSeries::demean() const {
  if (demeaned_) return *this;
  return EpochSeries(epoch_id_, data_, sampling_rate_hz_, true);
}

// ---------------------------------------------------------------------------

std::string_view to_string(FrequencyUnit unit) noexcept {
  switch (unit) {
    case FrequencyUnit::radians: return "radians";
    case FrequencyUnit::cycles: return "cycles";
    case FrequencyUnit::hertz: return "hertz";
  }
  return "unknown";
}

FrequencyUnit parse_frequency_unit(std::string_view text) {
  if (text == "radians" || text == "rad") return FrequencyUnit::radians;
  if (text == "cycles" || text == "cyc") return FrequencyUnit::cycles;
  if (text == "hertz" || text == "hz" || text == "Hz") return FrequencyUnit::hertz;
  throw Error(ErrorKind::InvalidArgument, "unknown frequency unit '" + std::string(text) + "'");
}

Band Band::make(double lo, double hi, FrequencyUnit unit) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || !(lo < hi)) {
    std::ostringstream os;
    os << "band (" << lo << ", " << hi << "] needs 0 <= lo < hi";
    throw Error(ErrorKind::InvalidBand, os.str());
  }
  if (unit == FrequencyUnit::radians && hi > kPi * (1.0 + 1e-12)) {
    throw Error(ErrorKind::InvalidBand, "band upper edge exceeds pi radians");
  }
  if (unit == FrequencyUnit::cycles && hi > 0.5 * (1.0 + 1e-12)) {
    throw Error(ErrorKind::InvalidBand, "band upper edge exceeds 0.5 cycles");
  }
  return Band{lo, hi, unit};
}

namespace {

double to_radians(double value, FrequencyUnit unit, double fs) {
  switch (unit) {
    case FrequencyUnit::radians: return value;
    case FrequencyUnit::cycles: return kTwoPi * value;
    case FrequencyUnit::hertz: return kTwoPi * value / fs;
  }
  return value;
}

double from_radians(double value, FrequencyUnit unit, double fs) {
  switch (unit) {
    case FrequencyUnit::radians: return value;
    case FrequencyUnit::cycles: return value / kTwoPi;
    case FrequencyUnit::hertz: return value * fs / kTwoPi;
  }
  return value;
}

}  // namespace

Band band_to_radians(const Band& band, double sampling_rate_hz) {
  if (!(sampling_rate_hz > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "sampling rate must be positive");
  }
  if (band.unit == FrequencyUnit::hertz && band.hi > 0.5 * sampling_rate_hz * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "band upper edge " << band.hi << " Hz exceeds Nyquist " << 0.5 * sampling_rate_hz
       << " Hz";
    throw Error(ErrorKind::NyquistExceeded, os.str());
  }
  const double lo = to_radians(band.lo, band.unit, sampling_rate_hz);
  const double hi = std::min(to_radians(band.hi, band.unit, sampling_rate_hz), kPi);
  return Band{lo, hi, FrequencyUnit::radians};
}

Band convert_band(const Band& band, FrequencyUnit target, double sampling_rate_hz) {
  const Band rad = band_to_radians(band, sampling_rate_hz);
  return Band{from_radians(rad.lo, target, sampling_rate_hz),
              from_radians(rad.hi, target, sampling_rate_hz), target};
}

// ---------------------------------------------------------------------------

FrequencyGrid::FrequencyGrid(Index length) : length_(length) {
  if (length < 1) throw Error(ErrorKind::InvalidArgument, "grid length must be positive");
}

std::pair<Index, Index> FrequencyGrid::band_harmonics(const Band& band_radians) const {
  if (band_radians.unit != FrequencyUnit::radians) {
    throw Error(ErrorKind::InvalidBand, "band must be expressed in radians");
  }
  // Work in harmonic units so that edges like 0.08 cycles at T = 1000 land
  // exactly on j = 80 instead of drifting by one ulp.
  const auto snap = [](double x) {
    const double r = std::round(x);
    return std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)) ? r : x;
  };
  const double lo = snap(band_radians.lo / spacing());
  const double hi = snap(band_radians.hi / spacing());
  const Index first = std::max<Index>(1, static_cast<Index>(std::floor(lo)) + 1);
  const Index last = std::min<Index>(max_harmonic(), static_cast<Index>(std::floor(hi)));
  return {first, last};
}

// ---------------------------------------------------------------------------

std::string_view to_string(KernelType type) noexcept {
  switch (type) {
    case KernelType::bartlett_priestley: return "bartlett-priestley";
    case KernelType::daniell: return "daniell";
  }
  return "unknown";
}

KernelType parse_kernel_type(std::string_view text) {
  if (text == "daniell") return KernelType::daniell;
  if (text == "bartlett-priestley" || text == "bp" || text == "bartlett_priestley") {
    return KernelType::bartlett_priestley;
  }
  throw Error(ErrorKind::InvalidKernel, "unknown kernel '" + std::string(text) + "'");
}

Kernel Kernel::bartlett_priestley(double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw Error(ErrorKind::InvalidKernel, "Bartlett-Priestley bandwidth must be positive");
  }
  return Kernel(KernelType::bartlett_priestley, bandwidth, 0);
}

Kernel Kernel::daniell(int span) {
  if (span < 0) throw Error(ErrorKind::InvalidKernel, "Daniell span must be >= 0");
  return Kernel(KernelType::daniell, 0.0, span);
}

Kernel Kernel::with_default_bandwidth(KernelType type, Index n) {
  if (n < 1) throw Error(ErrorKind::InvalidKernel, "bandwidth rule needs n >= 1");
  const double dn = static_cast<double>(n);
  if (type == KernelType::bartlett_priestley) return bartlett_priestley(std::pow(dn, -0.4));
  return daniell(static_cast<int>(std::ceil(std::sqrt(dn))));
}

double Kernel::bandwidth(Index length) const noexcept {
  if (type_ == KernelType::bartlett_priestley) return bandwidth_;
  return (2.0 * span_ + 1.0) / static_cast<double>(length);
}

double Kernel::density(double x) const noexcept {
  if (std::abs(x) > kPi) return 0.0;
  if (type_ == KernelType::bartlett_priestley) {
    const double u = x / kPi;
    return 3.0 / (4.0 * kPi) * (1.0 - u * u);
  }
  return 1.0 / kTwoPi;
}

std::string Kernel::describe() const {
  std::ostringstream os;
  if (type_ == KernelType::daniell) {
    os << "daniell(m=" << span_ << ")";
  } else {
    os << "bartlett-priestley(h=" << bandwidth_ << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

Eigen::MatrixXd read_numeric_csv(const fs::path& path, bool header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, "cannot open '" + path.string() + "'");

  std::vector<double> values;
  Index cols = -1;
  Index rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (header && line_no == 1) continue;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cols < 0) {
      cols = static_cast<Index>(cells.size());
    } else if (static_cast<Index>(cells.size()) != cols) {
      throw Error(ErrorKind::InconsistentRows,
                  "InconsistentRows{file=" + path.string() + ",row=" + std::to_string(line_no) +
                      ",expected=" + std::to_string(cols) +
                      ",found=" + std::to_string(cells.size()) + "}");
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string text = trim(cells[c]);
      double value = 0.0;
      const char* begin = text.data();
      const char* end = begin + text.size();
      // from_chars rejects a leading '+'.
      if (begin != end && *begin == '+') ++begin;
      const auto [ptr, ec] = std::from_chars(begin, end, value);
      if (text.empty() || ec != std::errc() || ptr != end) {
        throw Error(ErrorKind::ParseError, "ParseError{file=" + path.string() +
                                               ",row=" + std::to_string(line_no) +
                                               ",col=" + std::to_string(c + 1) + ",text='" + text +
                                               "'}");
      }
      if (!std::isfinite(value)) {
        throw Error(ErrorKind::NonFiniteValue, "NonFiniteValue{file=" + path.string() +
                                                   ",row=" + std::to_string(line_no) +
                                                   ",col=" + std::to_string(c + 1) + "}");
      }
      values.push_back(value);
    }
    ++rows;
  }
  if (rows == 0) throw Error(ErrorKind::SeriesTooShort, "'" + path.string() + "' has no rows");

  Eigen::MatrixXd out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) out(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  }
  return out;
}

void write_numeric_csv(const fs::path& path, const Eigen::MatrixXd& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  char buf[32];
  for (Index r = 0; r < data.rows(); ++r) {
    for (Index c = 0; c < data.cols(); ++c) {
      if (c > 0) out << ',';
      std::snprintf(buf, sizeof buf, "%.17g", data(r, c));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing '" + path.string() + "'");
}

EpochDataset load_epoch_dataset(const fs::path& manifest_path, const LoadOptions& options) {
  std::ifstream in(manifest_path);
  if (!in) {
    throw Error(ErrorKind::MissingFile, "cannot open manifest '" + manifest_path.string() + "'");
  }
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, "manifest '" + manifest_path.string() + "': " + e.what());
  }

  EpochDataset dataset;
  try {
    dataset.sampling_rate_hz = manifest.at("sampling_rate_hz").get<double>();
    const auto& entries = manifest.at("epochs");
    const fs::path base = manifest_path.parent_path();
    for (const auto& entry : entries) {
      const int id = entry.at("id").get<int>();
      fs::path path = entry.at("path").get<std::string>();
      if (path.is_relative()) path = base / path;
      if (!fs::exists(path)) {
        throw Error(ErrorKind::MissingFile, "epoch " + std::to_string(id) + ": missing file '" +
                                                path.string() + "'");
      }
      Eigen::MatrixXd data = read_numeric_csv(path, options.header);
      if (data.rows() < EpochSeries::kMinLength) {
        throw Error(ErrorKind::SeriesTooShort, "'" + path.string() + "' has " +
                                                   std::to_string(data.rows()) + " rows");
      }
      dataset.epochs.emplace_back(id, std::move(data), dataset.sampling_rate_hz, true);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, "manifest '" + manifest_path.string() + "': " + e.what());
  }
  return dataset;
}

std::vector<fs::path> save_epoch_dataset(const fs::path& directory,
                                         const std::vector<EpochSeries>& epochs,
                                         double sampling_rate_hz) {
  fs::create_directories(directory);
  std::vector<fs::path> written;
  nlohmann::json manifest;
  manifest["sampling_rate_hz"] = sampling_rate_hz;
  manifest["epochs"] = nlohmann::json::array();
  for (const auto& epoch : epochs) {
    char name[32];
    std::snprintf(name, sizeof name, "epoch_%04d.csv", epoch.epoch_id());
    write_numeric_csv(directory / name, epoch.data());
    written.push_back(directory / name);
    manifest["epochs"].push_back({{"id", epoch.epoch_id()}, {"path", name}});
  }
  const fs::path manifest_path = directory / "manifest.json";
  std::ofstream out(manifest_path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + manifest_path.string() + "'");
  out << manifest.dump(2) << '\n';
  written.push_back(manifest_path);
  return written;
}

}  // namespace specband
