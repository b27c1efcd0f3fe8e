#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "martlab/models.hpp"

// Experiment configuration. The on-disk format is flat key = value text:
// one assignment per line, '#' starts a comment, keys are dotted paths.
// The same key grammar backs the CLI --param overrides, so everything a
// file can set is also settable from the command line.

namespace martlab {

// Raised for malformed keys or values; the CLI maps it to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  ModelSpec model = ModelSpec::brownian_upper(1.0);
  std::size_t n_paths = 100000;
  std::uint64_t master_seed = 42;
  std::vector<double> small_lambdas = {0.02, 0.05, 0.1, 0.2, 0.5};
  std::vector<double> big_lambdas;  // empty: derived per curve from the data
  double step = 1e-3;               // grid step for path-mode work
  std::vector<std::string> checks_enabled = {"mean_one", "sandwich",
                                             "bdg_ratio", "envelope"};
  std::size_t check_paths = 10000;
  std::vector<double> bdg_horizons = {10.0, 100.0, 1000.0};
  std::string output_dir = "out";
  unsigned threads = 1;
  double censor_warn_fraction = 0.01;
  double verdict_sigma = 3.0;  // z threshold for the class-D diagnostic

  // Throws ConfigError when an invariant fails (tail estimation needs at
  // least 1000 paths, grids nonempty, positive step, a valid model, ...).
  void validate() const;
};

// Applies one key = value assignment. "model.kind" swaps in that kind's
// preset, so set it before overriding individual model fields.
void apply_key(ExperimentConfig& config, std::string_view key,
               std::string_view value);

// Parses config text, last assignment wins. Unknown keys are errors.
ExperimentConfig parse_config_text(std::string_view text);

// Reads and parses a config file; missing or unreadable files are
// ConfigErrors (the path came from the user).
ExperimentConfig load_config_file(const std::string& path);

}  // namespace martlab
