#include "specband/cli.hpp"

#include "specband/coherence.hpp"
#include "specband/eqtest.hpp"
#include "specband/fsratio.hpp"
#include "specband/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <fftw3.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace specband::cli {

constexpr const char* kVersion = "0.1.0";

std::string_view to_string(Command command) noexcept {
  switch (command) {
    case Command::simulate: return "simulate";
    case Command::fsratio: return "fsratio";
    case Command::eqtest: return "eqtest";
    case Command::coherence: return "coherence";
    case Command::report: return "report";
  }
  return "?";
}

Kernel KernelOptions::resolve(Index length, Index epoch_count) const {
  if (type == KernelType::daniell && span) return Kernel::daniell(*span);
  if (type == KernelType::bartlett_priestley && bandwidth) {
    return Kernel::bartlett_priestley(*bandwidth);
  }
  const Index n = rule == BandwidthRule::series_length ? length : epoch_count;
  return Kernel::with_default_bandwidth(type, n);
}

// ---------------------------------------------------------------------------
// bands

std::vector<Band> parse_band_set(const std::string& text, FrequencyUnit unit) {
  if (text == "default6") {
    constexpr double edges[] = {0.0, 0.08, 0.16, 0.24, 0.32, 0.40, 0.48};
    std::vector<Band> out;
    for (int k = 0; k < 6; ++k) out.push_back(Band::cycles(edges[k], edges[k + 1]));
    return out;
  }
  if (text == "neuro") {
    return {Band::hertz(4, 8), Band::hertz(8, 12), Band::hertz(12, 30), Band::hertz(30, 50)};
  }
  std::vector<Band> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorKind::InvalidBand, "band '" + item + "' is not of the form lo:hi");
    }
    try {
      std::size_t used_lo = 0;
      std::size_t used_hi = 0;
      const std::string lo_text = item.substr(0, colon);
      const std::string hi_text = item.substr(colon + 1);
      const double lo = std::stod(lo_text, &used_lo);
      const double hi = std::stod(hi_text, &used_hi);
      if (used_lo != lo_text.size() || used_hi != hi_text.size()) throw std::invalid_argument(item);
      out.push_back(Band::make(lo, hi, unit));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidBand, "band '" + item + "' is not numeric");
    }
  }
  if (out.empty()) throw Error(ErrorKind::InvalidBand, "empty band list");
  return out;
}

void check_partition(const std::vector<Band>& bands, double fs) {
  std::vector<Band> rad;
  for (const auto& b : bands) rad.push_back(band_to_radians(b, fs));
  std::sort(rad.begin(), rad.end(), [](const Band& a, const Band& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < rad.size(); ++i) {
    if (rad[i].lo < rad[i - 1].hi - 1e-12) {
      throw Error(ErrorKind::InvalidBand, "bands overlap near omega = " + std::to_string(rad[i].lo));
    }
  }
}

// ---------------------------------------------------------------------------
// output helpers

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string band_columns(const Band& b) {
  return fmt(b.lo) + "," + fmt(b.hi) + "," + std::string(to_string(b.unit));
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "failed writing '" + path.string() + "'");
}

json band_json(const Band& b) {
  return {{"lo", b.lo}, {"hi", b.hi}, {"unit", std::string(to_string(b.unit))}};
}

json kernel_json(const KernelOptions& k) {
  json j;
  j["type"] = std::string(to_string(k.type));
  j["span"] = k.span ? json(*k.span) : json(nullptr);
  j["bandwidth"] = k.bandwidth ? json(*k.bandwidth) : json(nullptr);
  j["bandwidth_rule"] = k.rule == BandwidthRule::series_length ? "T" : "N";
  return j;
}

json versions_json() {
  return {{"specband", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"fftw", std::string(fftw_version)},
          {"boost", std::string(BOOST_LIB_VERSION)}};
}

void write_run_record(const RunConfig& c, const fs::path& dir, json extra) {
  json j;
  j["command"] = std::string(to_string(c.command));
  j["command_line"] = c.command_line;
  j["input"] = c.input.string();
  j["seed"] = c.seed;
  j["versions"] = versions_json();
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  const fs::path path = dir / "run.json";
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

// Changepoint recorded by `simulate` next to the manifest, if any.
std::optional<int> recorded_changepoint(const fs::path& record) {
  std::ifstream in(record);
  if (!in) return std::nullopt;
  try {
    const json j = json::parse(in);
    if (j.contains("changepoint") && j["changepoint"].is_number_integer()) {
      return j["changepoint"].get<int>();
    }
  } catch (const json::exception&) {
  }
  return std::nullopt;
}

std::vector<Band> resolve_bands(const RunConfig& c, double fs) {
  std::vector<Band> rad;
  rad.reserve(c.bands.size());
  for (const auto& b : c.bands) rad.push_back(band_to_radians(b, fs));
  if (c.partition_check) check_partition(c.bands, fs);
  return rad;
}

std::string band_file_stem(const Band& b) { return fmt(b.lo) + "_" + fmt(b.hi); }

// ---------------------------------------------------------------------------
// commands

void cmd_simulate(const RunConfig& c) {
  SchemeConfig scheme = c.scheme;
  scheme.seed = c.seed;
  const std::vector<EpochSeries> epochs = generate_scheme(scheme, c.threads);
  save_epoch_dataset(c.output, epochs, 1.0);
  json extra;
  extra["scheme"] = std::string(to_string(scheme.scheme));
  extra["epochs"] = scheme.epochs;
  extra["length"] = scheme.length;
  extra["dim_range"] = {scheme.dim_min, scheme.dim_max};
  extra["xi_range"] = {scheme.xi_lo, scheme.xi_hi};
  extra["theta_pre"] = scheme.theta_pre;
  extra["theta_post"] = scheme.theta_post;
  extra["changepoint"] = scheme.effective_changepoint();
  extra["rho"] = scheme.rho;
  extra["fixed_p"] = scheme.fixed_p;
  extra["truncate"] = scheme.truncate;
  extra["burn_in"] = scheme.burn_in;
  write_run_record(c, c.output, extra);
}

struct EpochRatios {
  std::vector<FsRatioResult> results;  // one per band
};

void cmd_fsratio(const RunConfig& c) {
  const EpochDataset data = load_epoch_dataset(c.input, LoadOptions{c.header});
  if (data.epochs.empty()) throw Error(ErrorKind::EmptyInput, "manifest lists no epochs");
  const std::vector<Band> bands = resolve_bands(c, data.sampling_rate_hz);
  const Index n_epochs = static_cast<Index>(data.epochs.size());

  std::vector<EpochRatios> rows(data.epochs.size());
  parallel_for(rows.size(), c.threads, [&](std::size_t i) {
    const EpochSeries& epoch = data.epochs[i];
    const Kernel kernel = c.kernel.resolve(epoch.length(), n_epochs);
    const SpectralMatrixEstimate est = estimate_spectral_matrix(epoch, kernel);
    if (c.dump_spectrum) {
      char name[48];
      std::snprintf(name, sizeof name, "spectrum_epoch_%04d.csv", epoch.epoch_id());
      write_spectrum_csv(c.output / name, est);
    }
    const EnergyProfile profile(est);
    auto& out = rows[i].results;
    for (const auto& b : bands) out.push_back(fs_ratio(profile, b, epoch.epoch_id()));
    if (c.bootstrap) {
      BootstrapConfig cfg = *c.bootstrap;
      cfg.seed = c.seed;
      const auto cis = bootstrap_ci(epoch, bands, kernel, cfg);
      for (std::size_t k = 0; k < bands.size(); ++k) out[k].ci = cis[k];
    }
  });

  const auto ci_columns = [](const FsRatioResult& r) {
    return r.ci ? fmt(r.ci->lower) + "," + fmt(r.ci->upper) : std::string(",");
  };
  {
    const fs::path path = c.output / "fsratio.csv";
    std::ofstream out = open_output(path);
    out << "epoch_id,band_lo,band_hi,unit,ratio,ci_lower,ci_upper\n";
    for (const auto& row : rows) {
      for (std::size_t k = 0; k < bands.size(); ++k) {
        const auto& r = row.results[k];
        out << r.epoch_id << ',' << band_columns(c.bands[k]) << ',' << fmt(r.ratio) << ','
            << ci_columns(r) << '\n';
      }
    }
    finish(out, path);
  }
  for (std::size_t k = 0; k < bands.size(); ++k) {
    const fs::path path = c.output / ("fsratio_band_" + band_file_stem(c.bands[k]) + ".csv");
    std::ofstream out = open_output(path);
    out << "epoch_id,ratio,ci_lower,ci_upper\n";
    for (const auto& row : rows) {
      const auto& r = row.results[k];
      out << r.epoch_id << ',' << fmt(r.ratio) << ',' << ci_columns(r) << '\n';
    }
    finish(out, path);
  }

  json extra;
  extra["sampling_rate_hz"] = data.sampling_rate_hz;
  extra["band_set"] = c.band_set;
  extra["bands"] = json::array();
  for (const auto& b : c.bands) extra["bands"].push_back(band_json(b));
  extra["kernel"] = kernel_json(c.kernel);
  const Kernel first = c.kernel.resolve(data.epochs.front().length(), n_epochs);
  extra["kernel_resolved"] = first.describe();
  extra["bandwidth"] = first.bandwidth(data.epochs.front().length());
  if (c.bootstrap) {
    const auto& b = *c.bootstrap;
    extra["bootstrap"] = {
        {"replications", b.replications},
        {"level", b.confidence_level},
        {"block", b.block_length ? json(*b.block_length) : json("auto")},
        {"scheme", b.scheme == ResamplingScheme::stationary ? "stationary" : "fixed"}};
  } else {
    extra["bootstrap"] = nullptr;
  }
  const auto cp = recorded_changepoint(c.input.parent_path() / "run.json");
  extra["changepoint"] = cp ? json(*cp) : json(nullptr);
  write_run_record(c, c.output, extra);
}

struct ReportRow {
  Band band;
  std::vector<FsRatioResult> values;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& text, const fs::path& file, std::size_t row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::ParseError, "file=" + file.string() + " row=" + std::to_string(row) +
                                           " text='" + text + "'");
  }
}

void write_summary(const fs::path& path, const std::vector<ReportRow>& rows,
                   const std::function<bool(int)>& keep, std::ostream& console,
                   const std::string& title) {
  std::ofstream out = open_output(path);
  out << "band_lo,band_hi,unit,count,mean,median,sd,ci_lower,ci_upper,ci_source\n";
  console << title << '\n';
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %9s %9s %9s %9s %9s\n", "band", "mean", "median", "sd",
                "lower_ci", "upper_ci");
  console << line;
  for (const auto& row : rows) {
    std::vector<FsRatioResult> subset;
    for (const auto& v : row.values) {
      if (keep(v.epoch_id)) subset.push_back(v);
    }
    if (subset.empty()) {
      out << band_columns(row.band) << ",0,,,,,,\n";
      continue;
    }
    const RatioSummary s = summarize_ratios(subset);
    out << band_columns(row.band) << ',' << s.count << ',' << fmt(s.mean) << ',' << fmt(s.median)
        << ',' << fmt(s.sd) << ',' << fmt(s.ci_lower) << ',' << fmt(s.ci_upper) << ','
        << (s.ci_from_bootstrap ? "bootstrap" : "percentile") << '\n';
    const std::string label = "(" + fmt(row.band.lo) + "," + fmt(row.band.hi) + ")";
    std::snprintf(line, sizeof line, "%-18s %9.4f %9.4f %9.4f %9.4f %9.4f\n", label.c_str(),
                  s.mean, s.median, s.sd, s.ci_lower, s.ci_upper);
    console << line;
  }
  console << '\n';
  finish(out, path);
}

void cmd_report(const RunConfig& c) {
  const fs::path in_path = fs::is_directory(c.input) ? c.input / "fsratio.csv" : c.input;
  std::ifstream in(in_path);
  if (!in) throw Error(ErrorKind::MissingFile, "cannot open '" + in_path.string() + "'");
  std::string line;
  std::getline(in, line);
  if (line.rfind("epoch_id,band_lo,band_hi,unit,ratio", 0) != 0) {
    throw Error(ErrorKind::ParseError, "file=" + in_path.string() + " row=1 unexpected header");
  }
  std::vector<ReportRow> rows;
  std::size_t row_no = 1;
  int max_id = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 7) {
      throw Error(ErrorKind::InconsistentRows,
                  "file=" + in_path.string() + " row=" + std::to_string(row_no));
    }
    FsRatioResult r;
    r.epoch_id = static_cast<int>(parse_double(cells[0], in_path, row_no));
    const Band band = Band::make(parse_double(cells[1], in_path, row_no),
                                 parse_double(cells[2], in_path, row_no),
                                 parse_frequency_unit(cells[3]));
    r.band = band;
    r.ratio = parse_double(cells[4], in_path, row_no);
    if (!cells[5].empty() && !cells[6].empty()) {
      r.ci = ConfidenceInterval{parse_double(cells[5], in_path, row_no),
                                parse_double(cells[6], in_path, row_no)};
    }
    max_id = std::max(max_id, r.epoch_id);
    auto it = std::find_if(rows.begin(), rows.end(), [&](const ReportRow& x) { return x.band == band; });
    if (it == rows.end()) {
      rows.push_back(ReportRow{band, {}});
      it = rows.end() - 1;
    }
    it->values.push_back(r);
  }
  if (rows.empty()) throw Error(ErrorKind::EmptyInput, "'" + in_path.string() + "' has no rows");

  int split = 0;
  if (c.split) {
    split = *c.split;
  } else if (auto cp = recorded_changepoint(in_path.parent_path() / "run.json")) {
    split = *cp - 1;
  } else {
    split = (max_id + 1) / 2 - 1;
  }
  const fs::path out_dir = c.output.empty() ? in_path.parent_path() : c.output;
  write_summary(out_dir / "summary_pre.csv", rows, [&](int id) { return id <= split; }, std::cout,
                "epochs <= " + std::to_string(split));
  write_summary(out_dir / "summary_post.csv", rows, [&](int id) { return id > split; }, std::cout,
                "epochs > " + std::to_string(split));
}

void cmd_eqtest(const RunConfig& c) {
  const EpochDataset data = load_epoch_dataset(c.input, LoadOptions{c.header});
  if (data.epochs.size() < 2) throw Error(ErrorKind::EmptyInput, "equality test needs two epochs");
  const std::vector<Band> bands = resolve_bands(c, data.sampling_rate_hz);
  const Index n_epochs = static_cast<Index>(data.epochs.size());

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < data.epochs.size(); ++i) {
    if (c.pairs == PairMode::consecutive) {
      if (i + 1 < data.epochs.size()) pairs.emplace_back(i, i + 1);
    } else {
      for (std::size_t j = i + 1; j < data.epochs.size(); ++j) pairs.emplace_back(i, j);
    }
  }
  std::vector<std::vector<EqualityTestResult>> results(pairs.size());
  parallel_for(pairs.size(), c.threads, [&](std::size_t p) {
    const auto& a = data.epochs[pairs[p].first];
    const auto& b = data.epochs[pairs[p].second];
    const Kernel kernel = c.kernel.resolve(a.length(), n_epochs);
    const JointSpectralEstimate joint = joint_spectral_estimate(a, b, kernel);
    for (const auto& band : bands) results[p].push_back(equality_test(joint, band));
  });

  const fs::path path = c.output / "eqtest.csv";
  std::ofstream out = open_output(path);
  out << "epoch_i,epoch_j,band_lo,band_hi,unit,d_hat,z,p_value\n";
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (std::size_t k = 0; k < bands.size(); ++k) {
      const auto& r = results[p][k];
      out << data.epochs[pairs[p].first].epoch_id() << ','
          << data.epochs[pairs[p].second].epoch_id() << ',' << band_columns(c.bands[k]) << ','
          << fmt(r.d_hat) << ',' << fmt(r.z) << ',' << fmt(r.p_value) << '\n';
    }
  }
  finish(out, path);

  json extra;
  extra["bands"] = json::array();
  for (const auto& b : c.bands) extra["bands"].push_back(band_json(b));
  extra["kernel"] = kernel_json(c.kernel);
  extra["pairs"] = c.pairs == PairMode::consecutive ? "consecutive" : "all";
  write_run_record(c, c.output, extra);
}

void cmd_coherence(const RunConfig& c) {
  const EpochDataset data = load_epoch_dataset(c.input, LoadOptions{c.header});
  if (data.epochs.empty()) throw Error(ErrorKind::EmptyInput, "manifest lists no epochs");
  const std::vector<Band> bands = resolve_bands(c, data.sampling_rate_hz);
  const Index n_epochs = static_cast<Index>(data.epochs.size());

  const auto compute = [&](bool whiten) {
    std::vector<std::vector<CoherenceSummary>> rows(data.epochs.size());
    parallel_for(rows.size(), c.threads, [&](std::size_t i) {
      const EpochSeries epoch = whiten ? prewhiten(data.epochs[i]) : data.epochs[i];
      const Kernel kernel = c.kernel.resolve(epoch.length(), n_epochs);
      const SpectralMatrixEstimate est = estimate_spectral_matrix(epoch, kernel);
      for (const auto& b : bands) rows[i].push_back(squared_coherence_band(est, b, epoch.epoch_id()));
    });
    return rows;
  };
  const auto write = [&](const fs::path& path, const std::vector<std::vector<CoherenceSummary>>& rows) {
    std::ofstream out = open_output(path);
    out << "epoch_id,band_lo,band_hi,unit,mean_offdiag_coherence\n";
    for (const auto& row : rows) {
      for (std::size_t k = 0; k < bands.size(); ++k) {
        out << row[k].epoch_id << ',' << band_columns(c.bands[k]) << ','
            << fmt(row[k].mean_offdiag_coherence) << '\n';
      }
    }
    finish(out, path);
  };
  write(c.output / ("coherence_" + c.band_set + ".csv"), compute(false));
  if (c.prewhiten) write(c.output / ("coherence_" + c.band_set + "_prewhitened.csv"), compute(true));

  json extra;
  extra["band_set"] = c.band_set;
  extra["bands"] = json::array();
  for (const auto& b : c.bands) extra["bands"].push_back(band_json(b));
  extra["kernel"] = kernel_json(c.kernel);
  extra["prewhiten"] = c.prewhiten;
  write_run_record(c, c.output, extra);
}

// Files present in `dir` before the run; everything else is removed on failure.
std::set<fs::path> snapshot(const fs::path& dir) {
  std::set<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& e : fs::directory_iterator(dir, ec)) out.insert(e.path());
  return out;
}

void remove_new_files(const fs::path& dir, const std::set<fs::path>& before, bool created_dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return;
  std::vector<fs::path> fresh;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    if (!before.count(e.path())) fresh.push_back(e.path());
  }
  for (const auto& p : fresh) fs::remove_all(p, ec);
  if (created_dir && fs::is_empty(dir, ec)) fs::remove(dir, ec);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    if (ch == '\n' || ch == '\r') {
      out += ' ';
      continue;
    }
    out += ch;
  }
  return out;
}

}  // namespace

void execute(const RunConfig& c) {
  if (c.output.empty() && c.command != Command::report) {
    throw Error(ErrorKind::InvalidConfig, "--out is required");
  }
  if (c.input.empty() && c.command != Command::simulate) {
    throw Error(ErrorKind::InvalidConfig, "--in is required");
  }
  if (c.bootstrap) c.bootstrap->validate();
  if (!c.output.empty()) fs::create_directories(c.output);
  switch (c.command) {
    case Command::simulate: cmd_simulate(c); break;
    case Command::fsratio: cmd_fsratio(c); break;
    case Command::eqtest: cmd_eqtest(c); break;
    case Command::coherence: cmd_coherence(c); break;
    case Command::report: cmd_report(c); break;
  }
}

int run(const RunConfig& config, std::ostream& err) {
  const fs::path dir = config.command == Command::report && config.output.empty()
                           ? (fs::is_directory(config.input) ? config.input : config.input.parent_path())
                           : config.output;
  std::error_code ec;
  const bool existed = dir.empty() || fs::exists(dir, ec);
  const auto before = snapshot(dir);
  std::string kind;
  std::string message;
  try {
    execute(config);
    return 0;
  } catch (const Error& e) {
    kind = std::string(to_string(e.kind()));
    message = e.what();
  } catch (const fs::filesystem_error& e) {
    kind = "IoError";
    message = e.what();
  } catch (const std::exception& e) {
    kind = "InternalError";
    message = e.what();
  }
  if (!dir.empty()) remove_new_files(dir, before, !existed);
  err << "specband: error: kind=" << kind << " message=\"" << escape(message) << "\"\n";
  return 1;
}

// ---------------------------------------------------------------------------
// argument parsing

namespace {

std::optional<std::uint64_t> env_seed() {
  const char* text = std::getenv("SPECBAND_SEED");
  if (text == nullptr || *text == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text, &end, 10);
  if (end == nullptr || *end != '\0') {
    throw Error(ErrorKind::InvalidConfig, std::string("SPECBAND_SEED is not an integer: ") + text);
  }
  return static_cast<std::uint64_t>(v);
}

struct RawOptions {
  std::string input;
  std::string output;
  std::string bands = "default6";
  std::string unit = "cycles";
  std::string kernel = "daniell";
  std::optional<int> span;
  std::optional<double> bandwidth;
  std::string bandwidth_rule = "T";
  std::optional<int> bootstrap;
  double level = 0.95;
  std::string block = "auto";
  std::string resampling = "stationary";
  std::optional<std::uint64_t> seed;
  unsigned threads = default_thread_count();
  bool header = false;
  bool partition_check = false;
  bool dump_spectrum = false;
  std::string scheme = "s1";
  std::optional<int> epochs;
  std::optional<Index> length;
  std::optional<int> changepoint;
  std::optional<double> rho;
  std::optional<double> theta_pre;
  std::optional<double> theta_post;
  bool no_truncate = false;
  std::optional<int> split;
  std::string pairs = "consecutive";
  bool prewhiten = false;
};

void add_analysis_options(CLI::App* cmd, RawOptions& o, bool with_bootstrap) {
  cmd->add_option("--in", o.input, "Dataset manifest (JSON)")->required();
  cmd->add_option("--out", o.output, "Output directory")->required();
  cmd->add_option("--bands", o.bands, "default6, neuro, or lo:hi,lo:hi,...");
  cmd->add_option("--unit", o.unit, "Unit for custom bands: radians, cycles, hertz");
  cmd->add_option("--kernel", o.kernel, "daniell or bp");
  cmd->add_option("--span", o.span, "Daniell half-span m");
  cmd->add_option("--bandwidth", o.bandwidth, "Bartlett-Priestley bandwidth h");
  cmd->add_option("--bandwidth-rule", o.bandwidth_rule, "Default bandwidth from T or N");
  cmd->add_option("--threads", o.threads, "Worker threads");
  cmd->add_flag("--header", o.header, "CSV files have a header row");
  cmd->add_flag("--partition-check", o.partition_check, "Reject overlapping bands");
  if (with_bootstrap) {
    cmd->add_option("--bootstrap", o.bootstrap, "Bootstrap replications B");
    cmd->add_option("--level", o.level, "Confidence level");
    cmd->add_option("--block", o.block, "Block length: auto or a number");
    cmd->add_option("--resampling", o.resampling, "stationary or fixed");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_flag("--dump-spectrum", o.dump_spectrum, "Write per-epoch spectral matrices");
  }
}

RunConfig build_config(Command command, const RawOptions& o) {
  RunConfig c;
  c.command = command;
  c.input = o.input;
  c.output = o.output;
  c.threads = std::max(1u, o.threads);
  c.header = o.header;
  c.partition_check = o.partition_check;
  c.dump_spectrum = o.dump_spectrum;
  c.seed = o.seed ? *o.seed : env_seed().value_or(0);
  c.band_set = o.bands;
  if (command == Command::fsratio || command == Command::eqtest || command == Command::coherence) {
    c.bands = parse_band_set(o.bands, parse_frequency_unit(o.unit));
    if (o.bands != "default6" && o.bands != "neuro") c.band_set = "custom";
  }
  c.kernel.type = parse_kernel_type(o.kernel);
  c.kernel.span = o.span;
  c.kernel.bandwidth = o.bandwidth;
  if (o.bandwidth_rule == "T") {
    c.kernel.rule = BandwidthRule::series_length;
  } else if (o.bandwidth_rule == "N") {
    c.kernel.rule = BandwidthRule::epoch_count;
  } else {
    throw Error(ErrorKind::InvalidConfig, "--bandwidth-rule must be T or N");
  }
  if (o.bootstrap) {
    BootstrapConfig b;
    b.replications = *o.bootstrap;
    b.confidence_level = o.level;
    if (o.block != "auto") {
      try {
        b.block_length = std::stod(o.block);
      } catch (const std::logic_error&) {
        throw Error(ErrorKind::InvalidConfig, "--block must be 'auto' or a number");
      }
    }
    if (o.resampling == "stationary") {
      b.scheme = ResamplingScheme::stationary;
    } else if (o.resampling == "fixed") {
      b.scheme = ResamplingScheme::fixed_block;
    } else {
      throw Error(ErrorKind::InvalidConfig, "--resampling must be stationary or fixed");
    }
    b.seed = c.seed;
    c.bootstrap = b;
  }
  if (command == Command::simulate) {
    c.scheme.scheme = parse_scheme(o.scheme);
    if (o.epochs) c.scheme.epochs = *o.epochs;
    if (o.length) c.scheme.length = *o.length;
    c.scheme.changepoint = o.changepoint;
    if (o.rho) c.scheme.rho = *o.rho;
    if (o.theta_pre) c.scheme.theta_pre = *o.theta_pre;
    if (o.theta_post) c.scheme.theta_post = *o.theta_post;
    c.scheme.truncate = !o.no_truncate;
    const bool example =
        c.scheme.scheme == Scheme::example21a || c.scheme.scheme == Scheme::example21b;
    if (!o.epochs && example) c.scheme.epochs = 600;
  }
  c.split = o.split;
  if (o.pairs == "consecutive") {
    c.pairs = PairMode::consecutive;
  } else if (o.pairs == "all") {
    c.pairs = PairMode::all;
  } else {
    throw Error(ErrorKind::InvalidConfig, "--pairs must be consecutive or all");
  }
  c.prewhiten = o.prewhiten;
  return c;
}

}  // namespace

int main_entry(int argc, char** argv) {
  CLI::App app{"Frequency-specific spectral ratio analysis for multivariate epochs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  RawOptions o;

  auto* sim = app.add_subcommand("simulate", "Generate an Example 2.1 or Scheme 1-3 dataset");
  sim->add_option("--scheme", o.scheme, "ex21a, ex21b, s1, s2, s3");
  sim->add_option("--out", o.output, "Output directory")->required();
  sim->add_option("--seed", o.seed, "RNG seed");
  sim->add_option("--epochs", o.epochs, "Number of epochs N");
  sim->add_option("--length", o.length, "Epoch length T");
  sim->add_option("--changepoint", o.changepoint, "First post-change epoch id");
  sim->add_option("--rho", o.rho, "Scheme 2 noise correlation");
  sim->add_option("--theta-pre", o.theta_pre, "Pre-change peak frequency (radians)");
  sim->add_option("--theta-post", o.theta_post, "Post-change peak frequency (radians)");
  sim->add_flag("--no-truncate", o.no_truncate, "Scheme 3: keep all mixed coordinates");
  sim->add_option("--threads", o.threads, "Worker threads");

  auto* fsr = app.add_subcommand("fsratio", "Per-epoch FS-ratios with optional bootstrap CIs");
  add_analysis_options(fsr, o, true);

  auto* eq = app.add_subcommand("eqtest", "Test equality of spectral matrices between epochs");
  add_analysis_options(eq, o, false);
  eq->add_option("--pairs", o.pairs, "consecutive or all");

  auto* coh = app.add_subcommand("coherence", "Band-averaged squared coherence");
  add_analysis_options(coh, o, false);
  coh->add_flag("--prewhiten", o.prewhiten, "Also report coherence after prewhitening");

  auto* rep = app.add_subcommand("report", "Summary tables from fsratio output");
  rep->add_option("--in", o.input, "fsratio output directory or fsratio.csv")->required();
  rep->add_option("--out", o.output, "Output directory (default: input directory)");
  rep->add_option("--split", o.split, "Last epoch id of the first table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "specband: error: kind=InvalidConfig message=\"" << escape(e.what()) << "\"\n";
    return 1;
  }

  Command command = Command::fsratio;
  if (sim->parsed()) command = Command::simulate;
  if (eq->parsed()) command = Command::eqtest;
  if (coh->parsed()) command = Command::coherence;
  if (rep->parsed()) command = Command::report;

  RunConfig config;
  try {
    config = build_config(command, o);
  } catch (const Error& e) {
    std::cerr << "specband: error: kind=" << to_string(e.kind()) << " message=\""
              << escape(e.what()) << "\"\n";
    return 1;
  }
  std::string line = "specband";
  for (int i = 1; i < argc; ++i) line += std::string(" ") + argv[i];
  config.command_line = line;
  return run(config, std::cerr);
}

}  // namespace specband::cli
