#pragma once

#include "martlab/models.hpp"

namespace martlab {

// Split of the two quadratic variations into continuous and jump parts.
// The predictable side always comes from the model's closed-form
// compensator, never from the realized jumps, so the two sides stay
// independent measurements of the same quantity.
struct QVBreakdown {
  double qv_cont = 0.0;       // <M^c> contribution
  double qv_jump_pred = 0.0;  // integral of z^2 against the compensator
  double qv_opt_cont = 0.0;   // realized continuous QV on the grid
  double qv_jump_opt = 0.0;   // sum of squared jump sizes
  double qv_pred() const { return qv_cont + qv_jump_pred; }
  double qv_opt() const { return qv_opt_cont + qv_jump_opt; }
};

// <M> at the path's stop/cap time: sigma^2 * t plus the model's jump
// compensator mass. Rejects paths inconsistent with the model (jumps on a
// continuous model, jump sizes above the bound).
QVBreakdown predictable_qv(const PathRecord& path, const ModelSpec& model);

// [M,M]: realized variance of the continuous component over grid cells plus
// the sum of squared jumps. Compensated summation throughout.
QVBreakdown optional_qv(const PathRecord& path);

// The discrepancy martingale L = [M,M] - <M>, evaluated on the jump
// skeleton. The continuous contributions cancel exactly by construction
// (analytic <M^c> against exact <M^c>), so L is driven purely by jumps:
// it gains (jump size)^2 at each jump and bleeds at the compensator rate in
// between, with time atoms and their jumps settled net (per-atom change is
// (size^2 - atom mass), which is identically 0 for the random walk).
struct DiscrepancyResult {
  double terminal = 0.0;
  double sup_abs = 0.0;  // running sup of |L_t| up to the stop
};

DiscrepancyResult discrepancy(const PathRecord& path, const ModelSpec& model);

}  // namespace martlab
