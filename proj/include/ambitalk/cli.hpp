#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "ambitalk/equilibrium.hpp"

namespace ambitalk::cli {

enum ExitCode : int { kOk = 0, kSuiteFailure = 1, kNonConvergence = 2, kConfigError = 3 };

/// Malformed or invalid configuration. `where` is a JSON pointer.
class ConfigError : public Error {
public:
  ConfigError(const std::string &where, const std::string &what)
      : Error("config error at " + (where.empty() ? std::string("/") : where) + ": " + what) {}
};

enum class Format { Csv, Jsonl };

struct RunConfig {
  GameSpec spec;
  SearchOptions search;
  std::optional<std::string> out_path;
  Format format = Format::Csv;
};

/// Parses a JSON configuration document. Throws ConfigError.
RunConfig parse_config(const std::string &text);
RunConfig load_config(const std::string &path);

/// Symmetric game: uniform prior on [-1/2, 1/2], words L and R, full simplex.
RunConfig symmetric_config(double p);

Format parse_format(const std::string &name);

/// Per-word report of the efficient equilibrium.
int cmd_solve(const RunConfig &config, std::ostream &out);

struct SweepOptions {
  double from = 0.0;
  double to = 1.0;
  int steps = 21;
  /// Zero: p_lo = p_hi = p. Otherwise p_lo = max(0, p - width), p_hi = p.
  double width = 0.0;
  int jobs = 1;
};

int cmd_sweep(const RunConfig &config, const SweepOptions &options, std::ostream &out);

struct ChannelOptions {
  int m = 1;
  int n = 1;
  double q = 0.0;
  /// Directory for the matrix CSV files; nothing is written when unset.
  std::optional<std::string> export_dir;
};

int cmd_channel(const ChannelOptions &options, std::ostream &out);

struct VerifyOptions {
  std::size_t instances = 50;
  std::uint64_t seed = 1;
  Format format = Format::Csv;
};

/// Runs every suite on the configured game (when given) plus seeded random
/// instances. Returns kSuiteFailure if any suite fails.
int cmd_verify(const std::optional<RunConfig> &config, const VerifyOptions &options,
               std::ostream &out);

/// Runs a command and maps escaping errors to exit codes, printing the
/// message to `err`.
int guarded(const std::function<int()> &body, std::ostream &err);

} // namespace ambitalk::cli
