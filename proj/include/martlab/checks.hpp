#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "martlab/models.hpp"

// Verification suite for the identities and inequalities the estimators
// lean on. Each check draws its own sample set from a caller-supplied seed
// and reports enough detail to diagnose a failure, not just a boolean.

namespace martlab {

struct MeanOneResult {
  double mean = 0.0;
  double std_error = 0.0;
  double z_score = 0.0;
  std::size_t n_paths = 0;
  double lambda = 0.0;
};

// Mean of the terminal exponential density e^{lambda M - log E} over
// n_paths. The density is a mean-one martingale evaluated at the stopping
// time; all catalog models stop a.s. and are constant afterwards, so the
// terminal value stands in for the limit. Censored paths contribute the
// density at the cap, which keeps the identity exact (bounded stopping).
MeanOneResult mean_one_density_check(const ModelSpec& model, double lambda,
                                     std::size_t n_paths,
                                     std::uint64_t master_seed);

struct BdgRatioPoint {
  double horizon = 0.0;
  double ratio = 0.0;        // sup_l2_mean / (K^2 * qv_mean)
  double sup_l2_mean = 0.0;  // mean over paths of sup_{s<=t} L_s^2
  double qv_mean = 0.0;      // mean predictable quadratic variation at t
};

// Burkholder-Gundy-type ratio for the bracket discrepancy L = [M,M] - <M>
// on the unstopped process over a fixed horizon. Only jumps move L, so the
// simulation is event-driven even for the jump diffusion. Models without
// jumps are rejected: K = 0 makes the inequality vacuous.
BdgRatioPoint bdg_ratio_check(const ModelSpec& model, double horizon,
                              std::size_t n_paths, std::uint64_t master_seed);

// Convenience sweep over several horizons with a shared master seed. A
// bounded constant in the inequality shows up as a flat ratio profile.
std::vector<BdgRatioPoint> bdg_ratio_sweep(const ModelSpec& model,
                                           std::span<const double> horizons,
                                           std::size_t n_paths,
                                           std::uint64_t master_seed);

struct SandwichViolation {
  std::size_t path_index = 0;
  double lambda = 0.0;
  double log_exponential = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  TerminalSample sample;
};

struct SandwichCheckResult {
  double fraction = 0.0;  // satisfied / valid pairs; must be exactly 1.0
  std::size_t n_pairs = 0;
  std::size_t n_satisfied = 0;
  std::size_t n_invalid = 0;  // pairs where the bounds do not apply
  std::vector<SandwichViolation> violations;
};

// Pathwise deterministic inequality: lower <= log E <= upper for every
// (path, lambda) pair where the bounds are valid. Any violation is a
// defect, so the offending pairs are returned with their full sample data.
SandwichCheckResult sandwich_check(const ModelSpec& model,
                                   std::span<const double> lambdas,
                                   std::size_t n_paths,
                                   std::uint64_t master_seed);

struct EnvelopeEstimate {
  double lower_mean = 0.0;  // per-path max over lambda of (1 - r)^+ / lambda
  double lower_max = 0.0;
  double upper_mean = 0.0;  // per-path max over lambda of (r - 1)^+ / lambda
  double upper_max = 0.0;
  std::size_t n_paths = 0;
  std::size_t n_excluded = 0;  // paths with zero quadratic variation
};

// Small-lambda envelope of the ratio r = log E / ((lambda^2/2) <M>). The
// tail asymptotics need r -> 1 with an O(lambda) error controlled by a
// single random envelope pair valid across the whole small-lambda grid,
// hence the max over the grid rather than a per-lambda family. Sample
// means stand in as the integrability proxy; the max is the worst path.
EnvelopeEstimate small_lambda_envelope_check(const ModelSpec& model,
                                             std::span<const double> lambdas,
                                             std::size_t n_paths,
                                             std::uint64_t master_seed);

}  // namespace martlab
