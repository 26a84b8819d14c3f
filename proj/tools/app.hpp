#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "lyzero/lyzero.hpp"

namespace lyzero::cli {

enum class Command { Partition, Zeros, Structure, Bounds, Verify, Scan };
enum class Format { Json, Csv, Text };

struct RunConfig {
  Command command = Command::Partition;
  std::filesystem::path model_path;
  Engine engine = Engine::Auto;
  double tolerance = kDefaultCircleTolerance;
  Format format = Format::Json;
  std::optional<std::filesystem::path> output;
  unsigned threads = 1;
  Precision precision = Precision::Double;

  // bounds
  double beta = 1.0;
  double kappa = 0.0;

  // scan
  std::string param = "theta";
  double from = 0.0;
  double to = 0.0;
  std::size_t steps = 0;
  bool gnuplot = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitMismatch = 2;

/// Checks the invariants of a config: tolerance > 0, threads ≥ 1, model file
/// present for model commands. Throws std::invalid_argument.
void validate(const RunConfig& config);

/// Executes one command. Results go to config.output when set, otherwise to
/// `out`; diagnostics go to `err`. Returns the process exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Argument parsing plus run(); LYZERO_THREADS overrides --threads.
int main_entry(int argc, char** argv);

}  // namespace lyzero::cli
