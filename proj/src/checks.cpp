#include "martlab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "martlab/rng.hpp"
#include "martlab/stats.hpp"
#include "martlab/stochexp.hpp"

namespace martlab {

namespace {

void require_paths(std::size_t n_paths) {
  if (n_paths < 2) {
    throw std::invalid_argument("check needs at least 2 paths");
  }
}

// Piecewise-linear |L| tracker: L drifts down at a constant rate and jumps
// at event times, so the running sup only needs the segment endpoints.
struct SupAbsTracker {
  double sup_abs = 0.0;
  void visit(double value) { sup_abs = std::max(sup_abs, std::abs(value)); }
};

// sup_{s<=t} |L_s| for one unstopped path of a jump model. The diffusion
// part of the jump diffusion cancels inside L exactly, so only the Poisson
// stream is simulated.
double sup_abs_discrepancy(const ModelSpec& model, double horizon,
                           RngStream& rng) {
  const double rate = model.jump_rate;
  const double k = model.jump_bound;
  const bool unit_jumps = model.kind == ModelKind::CompensatedPoissonUpper;
  const double slope = unit_jumps ? rate : rate * k * k / 3.0;

  SupAbsTracker sup;
  double t = 0.0;
  double l = 0.0;
  while (true) {
    double wait = rng.exponential(rate);
    if (t + wait >= horizon) {
      sup.visit(l - slope * (horizon - t));
      return sup.sup_abs;
    }
    t += wait;
    l -= slope * wait;
    sup.visit(l);  // just before the jump, the low point of the segment
    double z = unit_jumps ? 1.0 : rng.uniform(-k, k);
    l += z * z;
    sup.visit(l);
  }
}

}  // namespace

MeanOneResult mean_one_density_check(const ModelSpec& model, double lambda,
                                     std::size_t n_paths,
                                     std::uint64_t master_seed) {
  require_paths(n_paths);
  MeanAccumulator acc;
  for (std::size_t i = 0; i < n_paths; ++i) {
    TerminalSample s = sample_terminal(model, Seed{master_seed, i});
    acc.add(terminal_density(model, lambda, s));
  }
  MeanOneResult out;
  out.mean = acc.mean();
  out.std_error = acc.std_error();
  out.n_paths = n_paths;
  out.lambda = lambda;
  if (out.std_error > 0.0) {
    out.z_score = (out.mean - 1.0) / out.std_error;
  } else if (out.mean == 1.0) {
    out.z_score = 0.0;  // lambda = 0 gives the constant density 1
  } else {
    out.z_score = std::copysign(std::numeric_limits<double>::infinity(),
                                out.mean - 1.0);
  }
  return out;
}

BdgRatioPoint bdg_ratio_check(const ModelSpec& model, double horizon,
                              std::size_t n_paths,
                              std::uint64_t master_seed) {
  model.validate();
  require_paths(n_paths);
  if (!model.has_jumps() || model.jump_bound <= 0.0) {
    throw std::invalid_argument(
        "bdg_ratio_check needs a jump model: without jumps the bracket "
        "discrepancy vanishes identically");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("bdg_ratio_check needs a finite horizon > 0");
  }

  BdgRatioPoint out;
  out.horizon = horizon;
  if (model.kind == ModelKind::RandomWalkUpper) {
    // Unit steps net to zero against their compensator at every atom, so
    // L is identically zero; the ratio is exactly 0 with no sampling.
    out.qv_mean = std::floor(horizon);
    out.sup_l2_mean = 0.0;
    out.ratio = 0.0;
    return out;
  }

  MeanAccumulator acc;
  for (std::size_t i = 0; i < n_paths; ++i) {
    RngStream rng(master_seed, i);
    double s = sup_abs_discrepancy(model, horizon, rng);
    acc.add(s * s);
  }
  out.sup_l2_mean = acc.mean();
  // The predictable quadratic variation of the unstopped process is
  // deterministic for every catalog model, so no estimate is needed.
  out.qv_mean = model.qv_rate() * horizon;
  out.ratio =
      out.sup_l2_mean / (model.jump_bound * model.jump_bound * out.qv_mean);
  return out;
}

std::vector<BdgRatioPoint> bdg_ratio_sweep(const ModelSpec& model,
                                           std::span<const double> horizons,
                                           std::size_t n_paths,
                                           std::uint64_t master_seed) {
  if (horizons.empty()) {
    throw std::invalid_argument("bdg_ratio_sweep needs horizons");
  }
  std::vector<BdgRatioPoint> out;
  out.reserve(horizons.size());
  std::uint64_t tag = 0;
  for (double t : horizons) {
    out.push_back(bdg_ratio_check(model, t, n_paths,
                                  derive_master(master_seed, tag++)));
  }
  return out;
}

SandwichCheckResult sandwich_check(const ModelSpec& model,
                                   std::span<const double> lambdas,
                                   std::size_t n_paths,
                                   std::uint64_t master_seed) {
  model.validate();
  require_paths(n_paths);
  if (lambdas.empty()) {
    throw std::invalid_argument("sandwich_check needs lambdas");
  }
  SandwichCheckResult out;
  const std::size_t kMaxRecorded = 16;
  for (std::size_t i = 0; i < n_paths; ++i) {
    TerminalSample s = sample_terminal(model, Seed{master_seed, i});
    for (double lambda : lambdas) {
      SandwichBound b = sandwich_bounds(lambda, model.jump_bound, s.qv_pred);
      if (!b.valid) {
        ++out.n_invalid;
        continue;
      }
      ++out.n_pairs;
      double log_e = terminal_log_exponential(model, lambda, s);
      if (b.lower <= log_e && log_e <= b.upper) {
        ++out.n_satisfied;
      } else if (out.violations.size() < kMaxRecorded) {
        out.violations.push_back({i, lambda, log_e, b.lower, b.upper, s});
      }
    }
  }
  out.fraction = out.n_pairs == 0
                     ? 0.0
                     : static_cast<double>(out.n_satisfied) /
                           static_cast<double>(out.n_pairs);
  return out;
}

EnvelopeEstimate small_lambda_envelope_check(const ModelSpec& model,
                                             std::span<const double> lambdas,
                                             std::size_t n_paths,
                                             std::uint64_t master_seed) {
  model.validate();
  require_paths(n_paths);
  if (lambdas.empty()) {
    throw std::invalid_argument("envelope check needs lambdas");
  }
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw std::invalid_argument("envelope lambdas must be positive finite");
    }
  }
  MeanAccumulator lower_acc, upper_acc;
  EnvelopeEstimate out;
  for (std::size_t i = 0; i < n_paths; ++i) {
    TerminalSample s = sample_terminal(model, Seed{master_seed, i});
    if (!(s.qv_pred > 0.0)) {
      ++out.n_excluded;
      continue;
    }
    double lower = 0.0, upper = 0.0;
    for (double lambda : lambdas) {
      double r = terminal_log_exponential(model, lambda, s) /
                 (0.5 * lambda * lambda * s.qv_pred);
      // One envelope pair must cover the whole grid, hence the max over
      // lambda; a side the ratio never crosses reports zero, matching the
      // nonnegativity of the envelopes.
      lower = std::max(lower, (1.0 - r) / lambda);
      upper = std::max(upper, (r - 1.0) / lambda);
    }
    lower_acc.add(lower);
    upper_acc.add(upper);
    out.lower_max = std::max(out.lower_max, lower);
    out.upper_max = std::max(out.upper_max, upper);
  }
  out.n_paths = n_paths;
  if (lower_acc.count() > 0) {
    out.lower_mean = lower_acc.mean();
    out.upper_mean = upper_acc.mean();
  }
  return out;
}

}  // namespace martlab
