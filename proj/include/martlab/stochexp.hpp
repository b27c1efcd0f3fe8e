#pragma once

#include <utility>
#include <vector>

#include "martlab/models.hpp"

namespace martlab {

// Cumulant of the jump compensator at parameter lambda up to time t:
// the integral of (e^{lambda z} - 1 - lambda z) against nu. Nonnegative
// integrand, so the continuous part and every atom are >= 0. Atoms occur
// only for the random walk (compensator mass at integer times); all other
// catalog models are quasi-left-continuous.
struct CumulantValue {
  double continuous_part = 0.0;
  std::vector<std::pair<double, double>> atoms;  // (time, atom value)
  double lambda = 0.0;
  double total() const {
    double s = continuous_part;
    for (const auto& a : atoms) s += a.second;
    return s;
  }
};

// Closed forms per model:
//   CompensatedPoisson: rho * t * (e^lambda - 1 - lambda)
//   JumpDiffusion:      rho * t * (sinh(lambda K)/(lambda K) - 1)
//   RandomWalk:         one atom of (cosh lambda - 1) per integer time <= t
//   Brownian models:    0
CumulantValue cumulant(const ModelSpec& model, double lambda, double t);

// Terminal log of the exponential supermartingale normalizer:
//   log E_t = (lambda^2/2) <M^c>_t + G_t(lambda)
//             + sum over atoms of [log(1 + dG) - dG].
// The atom sum telescopes to n * log(cosh lambda) for the random walk.
double stochastic_exponential(const PathRecord& path, const ModelSpec& model,
                              double lambda);

// Terminal density z = exp(lambda * M_t - log E_t); positive by
// construction and mean <= 1 at any stopping time (= 1 for these models,
// which stop almost surely with bounded terminal values).
double density(const PathRecord& path, const ModelSpec& model, double lambda);

// Deterministic two-sided bound on log E at the stop in terms of <M> alone:
//   upper factor  1 + (lambda/3) K e^{lambda K}
//   lower factor  Phi - (lambda^2/8) K^2 Phi^2,  Phi = 1 - lambda K e^{lambda K}
// both multiplying (lambda^2/2) <M>. valid=false flags lambda too large for
// the lower factor to stay positive; K = 0 collapses both to (lambda^2/2)<M>.
struct SandwichBound {
  double lower = 0.0;
  double upper = 0.0;
  double lambda = 0.0;
  double jump_bound = 0.0;
  double qv_pred = 0.0;
  bool valid = false;
};

SandwichBound sandwich_bounds(double lambda, double jump_bound, double qv_pred);

// log(1+x) - x with the leading cancellation removed for small x.
double log1p_minus(double x);

// Closed-form log E and density at a path's stopping data, equivalent to the
// PathRecord versions for every catalog model (their cumulants depend on the
// path only through elapsed time / atom count, both recoverable from
// qv_pred). This is what the large-n verification loops use.
double terminal_log_exponential(const ModelSpec& model, double lambda,
                                const TerminalSample& sample);
double terminal_density(const ModelSpec& model, double lambda,
                        const TerminalSample& sample);

}  // namespace martlab
