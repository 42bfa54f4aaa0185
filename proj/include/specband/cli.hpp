#pragma once

#include "specband/bootstrap.hpp"
#include "specband/simulate.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace specband::cli {

enum class Command { simulate, fsratio, eqtest, coherence, report };

std::string_view to_string(Command command) noexcept;

// Kernel choice before the epoch length is known.
struct KernelOptions {
  KernelType type = KernelType::daniell;
  std::optional<int> span;          // Daniell m
  std::optional<double> bandwidth;  // Bartlett-Priestley h
  BandwidthRule rule = BandwidthRule::series_length;

  Kernel resolve(Index length, Index epoch_count) const;
};

enum class PairMode { consecutive, all };

struct RunConfig {
  Command command = Command::fsratio;
  std::filesystem::path input;   // manifest, or results directory for `report`
  std::filesystem::path output;  // output directory
  std::string band_set = "default6";
  std::vector<Band> bands;
  KernelOptions kernel;
  std::optional<BootstrapConfig> bootstrap;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool header = false;
  bool partition_check = false;
  bool dump_spectrum = false;
  SchemeConfig scheme;          // simulate
  std::optional<int> split;     // report: ids <= split form the first table
  PairMode pairs = PairMode::consecutive;  // eqtest
  bool prewhiten = false;       // coherence
  std::string command_line;     // echoed into the run record
};

// Named band sets: "default6" (cycles), "neuro" (Hz), or a custom list
// "lo:hi,lo:hi,..." read in `unit`.
std::vector<Band> parse_band_set(const std::string& text, FrequencyUnit unit);

// Throws InvalidBand when two bands overlap.
void check_partition(const std::vector<Band>& bands, double sampling_rate_hz);

// Executes one command. Throws specband::Error; outputs are left as written.
void execute(const RunConfig& config);

// execute() with error handling: on failure prints one line
//   specband: error: kind=<Kind> message="<text>"
// to `err`, removes files the run created, and returns 1.
int run(const RunConfig& config, std::ostream& err);

// Full command-line entry point used by the specband executable.
int main_entry(int argc, char** argv);

}  // namespace specband::cli
