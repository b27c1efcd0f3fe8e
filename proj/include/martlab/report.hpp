#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "martlab/checks.hpp"
#include "martlab/models.hpp"
#include "martlab/tails.hpp"

namespace martlab {

// Raised when an artifact cannot be written; the CLI maps it to exit 2.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Transform-side curve over the small-lambda grid, plus the extrapolated
// intercept that estimates the lambda -> 0 limit.
struct LaplaceCurve {
  std::vector<double> lambdas;
  std::vector<double> values;
  std::vector<double> std_errors;
  std::size_t n_samples = 0;
};

struct ExperimentReport {
  ModelSpec model;
  std::size_t n_paths = 0;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;
  double step = 0.0;

  std::size_t n_censored = 0;
  bool censor_warning = false;  // censored fraction above the config threshold

  ValueWithError mean_terminal;  // uncensored paths only

  TailCurve qv_pred_curve;
  TailCurve qv_opt_curve;
  TailCurve sup_neg_curve;
  ValueWithError qv_pred_plateau;
  ValueWithError qv_opt_plateau;
  ValueWithError sup_neg_limit;  // extrapolated against 1/lambda

  LaplaceCurve laplace;
  ValueWithError laplace_limit;
  double laplace_bias_bound = 0.0;

  TauberianReport tauberian;  // transform/tail comparison on <M>

  std::optional<MeanOneResult> mean_one;
  std::optional<SandwichCheckResult> sandwich;
  std::vector<BdgRatioPoint> bdg_ratios;
  std::optional<EnvelopeEstimate> envelopes;

  ClassDVerdict verdict = ClassDVerdict::Inconclusive;

  // Timing is reporting-only and excluded from the determinism digest.
  double wall_seconds = 0.0;
  double paths_per_second = 0.0;
};

// Full report as pretty JSON, timing included.
std::string report_to_json(const ExperimentReport& report);

// Hash of the numeric payload (everything except timing). Equal digests
// across runs and worker counts are the determinism contract.
std::string report_payload_digest(const ExperimentReport& report);

// Writes tails_qvpred.csv, tails_qvopt.csv, tails_supneg.csv, laplace.csv
// and report.json into output_dir (created if needed).
void write_artifacts(const ExperimentReport& report,
                     const std::string& output_dir);

}  // namespace martlab
