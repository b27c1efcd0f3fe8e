#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "martlab/rng.hpp"

namespace martlab {

// Model catalog. Every entry is a locally square-integrable martingale with
// jumps bounded by K, stopped at a barrier, so the terminal value, both
// quadratic variations and the running negative-part supremum all have
// well-defined laws that the estimators downstream can chase.
//
//   BrownianUpper(a)            M = W stopped at hitting +a. Terminal law is
//                               exact: <M> = [M,M] = a^2/Z^2 with Z standard
//                               normal, M_inf = a, and P(sup M^- > x) =
//                               a/(a+x) (gambler's ruin).
//   BrownianTwoSided(a,b)       W stopped at +a or -b; bounded, uniformly
//                               integrable, E M_inf = 0.
//   CompensatedPoissonUpper(a,rho)  N_t - rho*t with unit jumps (K = 1),
//                               stopped at first value >= a; event-driven
//                               exact simulation; <M> = rho*tau, [M,M] = N_tau.
//   JumpDiffusionTwoSided(sigma,rho,K,a,b)  sigma*dW plus jumps uniform on
//                               [-K,K] at rate rho (mean zero, so already
//                               compensated), stopped at +a or -b.
//   RandomWalkUpper(a)          +-1 steps at t = 1,2,3,..., stopped at +a
//                               (integer barrier, no overshoot). The jump
//                               compensator has time atoms, which is the one
//                               case exercising the discrete product term of
//                               the stochastic exponential.
enum class ModelKind {
  BrownianUpper,
  BrownianTwoSided,
  CompensatedPoissonUpper,
  JumpDiffusionTwoSided,
  RandomWalkUpper,
};

const char* model_kind_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

struct ModelSpec {
  ModelKind kind = ModelKind::BrownianUpper;
  double sigma = 1.0;       // diffusion coefficient (BrownianUpper/TwoSided, JumpDiffusion)
  double jump_rate = 0.0;   // Poisson intensity rho (CompensatedPoisson, JumpDiffusion)
  double jump_bound = 0.0;  // uniform bound K on |jump|; 0 iff continuous model
  double barrier_up = 1.0;  // a > 0
  std::optional<double> barrier_down;  // b > 0, two-sided models only
  double horizon_cap = 1e6;  // T_max: paths not stopped by then are censored
  double epsilon = 1.0;      // admissible |lambda| for exponential-moment work

  static ModelSpec brownian_upper(double a);
  static ModelSpec brownian_two_sided(double a, double b);
  static ModelSpec compensated_poisson_upper(double a, double rho);
  static ModelSpec jump_diffusion_two_sided(double sigma, double rho, double k,
                                            double a, double b);
  static ModelSpec random_walk_upper(double a);

  void validate() const;  // throws std::invalid_argument
  bool two_sided() const {
    return kind == ModelKind::BrownianTwoSided ||
           kind == ModelKind::JumpDiffusionTwoSided;
  }
  bool has_jumps() const { return jump_bound > 0.0; }
  // d<M>/dt for the time-homogeneous models; the random walk accrues 1 per
  // unit time as well (one +-1 atom per integer), so this is uniform.
  double qv_rate() const;
};

// Per-path summary. qv values on censored paths are the amounts accrued by
// the cap, i.e. lower bounds for the full-path values; tail indicators
// {sqrt(qv) > lambda} stay exact for lambda < sqrt(T_max).
struct TerminalSample {
  double m_inf = 0.0;    // M at stop (or at cap when censored)
  double qv_pred = 0.0;  // <M> at stop/cap
  double qv_opt = 0.0;   // [M,M] at stop/cap
  double sup_neg = 0.0;  // running sup of max(-M, 0) observed
  bool censored = false;
};

struct Jump {
  double time = 0.0;
  double size = 0.0;
};

// One simulated path: M on a non-decreasing time grid, its continuous part
// on the same grid, and the jump marks. The diffusion generator writes two
// entries at a jump time (left limit first, post-jump value second); the
// event-driven generators write the post-jump value only. values[i] always
// equals cont_values[i] plus the compensated jump contribution up to
// times[i].
struct PathRecord {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> cont_values;
  std::vector<Jump> jumps;
  double stop_time = 0.0;
  bool censored = false;
};

// Hard per-path event budget; paths hitting it are censored where they stand.
inline constexpr std::uint64_t kMaxEventsPerPath = 100000000ULL;

// Draws the terminal summary. Exact in law for BrownianUpper (hitting-time
// inversion), CompensatedPoissonUpper and RandomWalkUpper (event-driven);
// Euler grid with per-cell Brownian-bridge barrier correction for the
// two-sided diffusions.
//
// BrownianUpper couples sup_neg independently of the hitting time: both are
// drawn from their exact marginal laws (a^2/Z^2 and inverse-CDF of
// a/(a+x)). Every check in this project is a statement about marginals, so
// the missing joint dependence is deliberate and harmless; anything needing
// the joint law must go through generate_path.
TerminalSample sample_terminal(const ModelSpec& model, Seed seed);

// Same draw with an explicit cell width for the grid-based models; the
// event-driven models are exact and ignore it. The two-argument form uses
// the 1e-3 default.
TerminalSample sample_terminal(const ModelSpec& model, Seed seed, double step);

// Full path at step h (grid refinement for the continuous part; jump and
// atom times are always represented exactly).
PathRecord generate_path(const ModelSpec& model, Seed seed, double h);

enum class OracleQuery { QvTail, SupNegTail, Laplace, MeanTerminal };

// Closed-form ground truth where a model has one; nullopt means the model
// is verified against brute-force sampling instead.
std::optional<double> analytic_oracle(const ModelSpec& model, OracleQuery query,
                                      double lambda = 0.0);

}  // namespace martlab
