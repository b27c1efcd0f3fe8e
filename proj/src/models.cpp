#include "martlab/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "martlab/stats.hpp"

namespace martlab {

namespace {

// P(Brownian bridge from x1 to x2 over dt with variance rate sig2 touches
// level c above both endpoints) = exp(-2(c-x1)(c-x2)/(sig2*dt)).
inline double bridge_cross_up(double x1, double x2, double c, double sig2dt) {
  return std::exp(-2.0 * (c - x1) * (c - x2) / sig2dt);
}

inline double bridge_cross_down(double x1, double x2, double c, double sig2dt) {
  return std::exp(-2.0 * (x1 - c) * (x2 - c) / sig2dt);
}

struct StopState {
  double t = 0.0;
  double m = 0.0;
  double min_m = 0.0;
  bool stopped = false;
  bool censored = false;
};

}  // namespace

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::BrownianUpper: return "brownian_upper";
    case ModelKind::BrownianTwoSided: return "brownian_two_sided";
    case ModelKind::CompensatedPoissonUpper: return "compensated_poisson_upper";
    case ModelKind::JumpDiffusionTwoSided: return "jump_diffusion_two_sided";
    case ModelKind::RandomWalkUpper: return "random_walk_upper";
  }
  throw std::invalid_argument("unknown model kind");
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "brownian_upper") return ModelKind::BrownianUpper;
  if (name == "brownian_two_sided") return ModelKind::BrownianTwoSided;
  if (name == "compensated_poisson_upper") return ModelKind::CompensatedPoissonUpper;
  if (name == "jump_diffusion_two_sided") return ModelKind::JumpDiffusionTwoSided;
  if (name == "random_walk_upper") return ModelKind::RandomWalkUpper;
  throw std::invalid_argument("unknown model kind: " + name);
}

ModelSpec ModelSpec::brownian_upper(double a) {
  ModelSpec m;
  m.kind = ModelKind::BrownianUpper;
  m.sigma = 1.0;
  m.jump_rate = 0.0;
  m.jump_bound = 0.0;
  m.barrier_up = a;
  return m;
}

ModelSpec ModelSpec::brownian_two_sided(double a, double b) {
  ModelSpec m = brownian_upper(a);
  m.kind = ModelKind::BrownianTwoSided;
  m.barrier_down = b;
  return m;
}

ModelSpec ModelSpec::compensated_poisson_upper(double a, double rho) {
  ModelSpec m;
  m.kind = ModelKind::CompensatedPoissonUpper;
  m.sigma = 0.0;
  m.jump_rate = rho;
  m.jump_bound = 1.0;  // unit jumps by construction
  m.barrier_up = a;
  return m;
}

ModelSpec ModelSpec::jump_diffusion_two_sided(double sigma, double rho,
                                              double k, double a, double b) {
  ModelSpec m;
  m.kind = ModelKind::JumpDiffusionTwoSided;
  m.sigma = sigma;
  m.jump_rate = rho;
  m.jump_bound = k;
  m.barrier_up = a;
  m.barrier_down = b;
  return m;
}

ModelSpec ModelSpec::random_walk_upper(double a) {
  ModelSpec m;
  m.kind = ModelKind::RandomWalkUpper;
  m.sigma = 0.0;
  m.jump_rate = 0.0;
  m.jump_bound = 1.0;
  m.barrier_up = a;
  return m;
}

void ModelSpec::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(std::isfinite(barrier_up) && barrier_up > 0.0,
          "barrier_up must be positive");
  require(std::isfinite(horizon_cap) && horizon_cap > 0.0,
          "horizon_cap must be positive");
  require(std::isfinite(epsilon) && epsilon > 0.0, "epsilon must be positive");
  require(std::isfinite(sigma) && sigma >= 0.0, "sigma must be nonnegative");
  require(std::isfinite(jump_rate) && jump_rate >= 0.0,
          "jump_rate must be nonnegative");
  require(std::isfinite(jump_bound) && jump_bound >= 0.0,
          "jump_bound must be nonnegative");
  if (two_sided()) {
    require(barrier_down.has_value() && std::isfinite(*barrier_down) &&
                *barrier_down > 0.0,
            "two-sided models need a positive barrier_down");
  } else {
    require(!barrier_down.has_value(),
            "barrier_down only applies to two-sided models");
  }
  switch (kind) {
    case ModelKind::BrownianUpper:
    case ModelKind::BrownianTwoSided:
      require(sigma > 0.0, "continuous models need sigma > 0");
      require(jump_bound == 0.0 && jump_rate == 0.0,
              "continuous models cannot carry jumps");
      break;
    case ModelKind::CompensatedPoissonUpper:
      require(jump_rate > 0.0, "compensated_poisson_upper needs jump_rate > 0");
      require(jump_bound == 1.0, "compensated_poisson_upper has unit jumps");
      require(sigma == 0.0, "compensated_poisson_upper has no diffusion part");
      break;
    case ModelKind::JumpDiffusionTwoSided:
      require(jump_rate > 0.0 && jump_bound > 0.0,
              "jump_diffusion_two_sided needs jump_rate > 0 and jump_bound > 0");
      break;
    case ModelKind::RandomWalkUpper:
      require(jump_bound == 1.0, "random_walk_upper has unit steps");
      require(sigma == 0.0 && jump_rate == 0.0,
              "random_walk_upper has no diffusion or Poisson part");
      require(barrier_up == std::floor(barrier_up),
              "random_walk_upper barrier must be a positive integer");
      break;
  }
}

double ModelSpec::qv_rate() const {
  switch (kind) {
    case ModelKind::BrownianUpper:
    case ModelKind::BrownianTwoSided:
      return sigma * sigma;
    case ModelKind::CompensatedPoissonUpper:
      return jump_rate;  // unit jumps: integral of z^2 dnu = rho dt
    case ModelKind::JumpDiffusionTwoSided:
      // E z^2 = K^2/3 for z uniform on [-K,K]
      return sigma * sigma + jump_rate * jump_bound * jump_bound / 3.0;
    case ModelKind::RandomWalkUpper:
      return 1.0;  // one unit-variance atom per unit time
  }
  throw std::invalid_argument("unknown model kind");
}

// ===========================================================================
// Terminal samplers
// ===========================================================================

namespace {

TerminalSample terminal_brownian_upper(const ModelSpec& model, RngStream& rng) {
  TerminalSample out;
  const double a = model.barrier_up;
  double z = rng.standard_normal();
  // Hitting-time inversion: tau has the law of a^2/Z^2, and <M> at the stop
  // equals a^2/Z^2 regardless of sigma (sigma only rescales clock time).
  double qv = a * a / (z * z);
  out.censored = qv > model.qv_rate() * model.horizon_cap;
  if (out.censored) qv = model.qv_rate() * model.horizon_cap;
  // M_inf = a almost surely; on the few capped paths we still report a (the
  // eventual terminal value) and rely on the censored flag, since the value
  // at the cap itself is not resolved by this sampler.
  out.m_inf = a;
  out.qv_pred = qv;
  out.qv_opt = qv;
  // Exact marginal law P(sup M^- > x) = a/(a+x), drawn by inverse CDF,
  // independent of the hitting time (see header note).
  double u = rng.uniform01();
  out.sup_neg = a * u / (1.0 - u);
  return out;
}

// Shared two-sided diffusion stepper: advances the continuous part over one
// cell of width dt, settling barrier hits at the cell boundary via the
// bridge-crossing probability, which removes the O(sqrt(h)) hitting bias of
// a bare Euler grid.
void diffusion_cell(StopState* s, RngStream& rng, double dt, double sigma,
                    double up, double down) {
  const double sig2dt = sigma * sigma * dt;
  double x1 = s->m;
  double x2 = x1 + sigma * std::sqrt(dt) * rng.standard_normal();
  s->t += dt;
  if (x2 >= up) {  // crossed for sure; first touch is at the barrier
    s->m = up;
    s->stopped = true;
    return;
  }
  if (x2 <= -down) {
    s->m = -down;
    s->stopped = true;
    return;
  }
  double p_up = bridge_cross_up(x1, x2, up, sig2dt);
  double p_down = bridge_cross_down(x1, x2, -down, sig2dt);
  double u = rng.uniform01();
  if (u < p_up) {
    s->m = up;
    s->stopped = true;
    return;
  }
  if (u < p_up + p_down) {
    s->m = -down;
    s->stopped = true;
    return;
  }
  s->m = x2;
  if (x2 < s->min_m) s->min_m = x2;
}

TerminalSample terminal_two_sided_diffusion(const ModelSpec& model,
                                            RngStream& rng, double h) {
  const double up = model.barrier_up;
  const double down = *model.barrier_down;
  const bool with_jumps = model.kind == ModelKind::JumpDiffusionTwoSided;
  StopState s;
  std::uint64_t events = 0;
  double sum_jump_sq = 0.0;
  double next_jump = with_jumps ? rng.exponential(model.jump_rate)
                                : std::numeric_limits<double>::infinity();
  while (!s.stopped) {
    if (s.t >= model.horizon_cap || events >= kMaxEventsPerPath) {
      s.censored = true;
      break;
    }
    double cell_end = std::min(s.t + h, model.horizon_cap);
    bool jump_now = with_jumps && next_jump <= cell_end;
    if (jump_now) cell_end = next_jump;
    if (cell_end > s.t) {
      diffusion_cell(&s, rng, cell_end - s.t, model.sigma, up, down);
      ++events;
      if (s.stopped) break;
    } else {
      s.t = cell_end;
    }
    if (jump_now) {
      double z = rng.uniform(-model.jump_bound, model.jump_bound);
      s.m += z;
      sum_jump_sq += z * z;
      ++events;
      if (s.m < s.min_m) s.min_m = s.m;
      if (s.m >= up || s.m <= -down) s.stopped = true;  // overshoot retained
      next_jump += rng.exponential(model.jump_rate);
    }
  }
  if (s.m < s.min_m) s.min_m = s.m;  // bridge stops at -b bypass the tracker
  TerminalSample out;
  out.censored = s.censored;
  out.m_inf = s.m;
  out.qv_pred = model.qv_rate() * s.t;
  // Optional QV with the continuous part taken analytically (sigma^2 * t);
  // grid realized variance is a diagnostic of generate_path, not of the law.
  out.qv_opt = model.sigma * model.sigma * s.t + sum_jump_sq;
  out.sup_neg = std::max(0.0, -s.min_m);
  return out;
}

TerminalSample terminal_compensated_poisson(const ModelSpec& model,
                                            RngStream& rng) {
  const double a = model.barrier_up;
  const double rho = model.jump_rate;
  double t = 0.0;
  std::uint64_t k = 0;
  double min_m = 0.0;
  bool censored = false;
  double m = 0.0;
  while (true) {
    double w = rng.exponential(rho);
    if (t + w > model.horizon_cap || k + 1 > kMaxEventsPerPath) {
      // Drifts down until the cap; the minimum is attained there.
      t = model.horizon_cap;
      m = static_cast<double>(k) - rho * t;
      if (m < min_m) min_m = m;
      censored = true;
      break;
    }
    t += w;
    double pre = static_cast<double>(k) - rho * t;  // value just before jump
    if (pre < min_m) min_m = pre;
    ++k;
    m = pre + 1.0;
    if (m >= a) break;
  }
  TerminalSample out;
  out.censored = censored;
  out.m_inf = m;
  out.qv_pred = rho * t;
  out.qv_opt = static_cast<double>(k);
  out.sup_neg = std::max(0.0, -min_m);
  return out;
}

TerminalSample terminal_random_walk(const ModelSpec& model, RngStream& rng) {
  const long target = static_cast<long>(model.barrier_up);
  const std::uint64_t max_steps = static_cast<std::uint64_t>(std::min(
      model.horizon_cap, static_cast<double>(kMaxEventsPerPath)));
  long m = 0;
  long min_m = 0;
  std::uint64_t n = 0;
  bool censored = true;
  while (n < max_steps) {
    std::uint64_t bits = rng.next_u64();
    for (int b = 0; b < 64 && n < max_steps; ++b) {
      m += (bits & 1) ? 1 : -1;
      bits >>= 1;
      ++n;
      if (m < min_m) min_m = m;
      if (m >= target) break;
    }
    if (m >= target) {
      censored = false;
      break;
    }
  }
  TerminalSample out;
  out.censored = censored;
  out.m_inf = static_cast<double>(m);  // equals the barrier when uncensored
  out.qv_pred = static_cast<double>(n);
  out.qv_opt = static_cast<double>(n);
  out.sup_neg = static_cast<double>(std::max(0L, -min_m));
  return out;
}

}  // namespace

TerminalSample sample_terminal(const ModelSpec& model, Seed seed) {
  return sample_terminal(model, seed, 1e-3);
}

TerminalSample sample_terminal(const ModelSpec& model, Seed seed, double step) {
  model.validate();
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("step must be positive finite");
  }
  RngStream rng(seed);
  switch (model.kind) {
    case ModelKind::BrownianUpper:
      return terminal_brownian_upper(model, rng);
    case ModelKind::BrownianTwoSided:
    case ModelKind::JumpDiffusionTwoSided:
      return terminal_two_sided_diffusion(model, rng, step);
    case ModelKind::CompensatedPoissonUpper:
      return terminal_compensated_poisson(model, rng);
    case ModelKind::RandomWalkUpper:
      return terminal_random_walk(model, rng);
  }
  throw std::invalid_argument("unknown model kind");
}

// ===========================================================================
// Path generation
// ===========================================================================

namespace {

void path_push(PathRecord* p, double t, double m, double mc) {
  p->times.push_back(t);
  p->values.push_back(m);
  p->cont_values.push_back(mc);
}

PathRecord path_brownian(const ModelSpec& model, RngStream& rng, double h) {
  const double up = model.barrier_up;
  const double down = model.two_sided()
                          ? *model.barrier_down
                          : std::numeric_limits<double>::infinity();
  PathRecord p;
  StopState s;
  path_push(&p, 0.0, 0.0, 0.0);
  while (!s.stopped) {
    if (s.t >= model.horizon_cap) {
      p.censored = true;
      break;
    }
    double cell_end = std::min(s.t + h, model.horizon_cap);
    diffusion_cell(&s, rng, cell_end - s.t, model.sigma, up, down);
    path_push(&p, s.t, s.m, s.m);
  }
  p.stop_time = s.t;
  return p;
}

PathRecord path_jump_diffusion(const ModelSpec& model, RngStream& rng,
                               double h) {
  const double up = model.barrier_up;
  const double down = *model.barrier_down;
  PathRecord p;
  StopState s;
  double cont = 0.0;  // diffusion component alone
  path_push(&p, 0.0, 0.0, 0.0);
  double next_jump = rng.exponential(model.jump_rate);
  std::uint64_t events = 0;
  while (!s.stopped) {
    if (s.t >= model.horizon_cap || events >= kMaxEventsPerPath) {
      p.censored = true;
      break;
    }
    double cell_end = std::min(s.t + h, model.horizon_cap);
    bool jump_now = next_jump <= cell_end;
    if (jump_now) cell_end = next_jump;
    if (cell_end > s.t) {
      double before = s.m;
      diffusion_cell(&s, rng, cell_end - s.t, model.sigma, up, down);
      cont += s.m - before;
      path_push(&p, s.t, s.m, cont);
      ++events;
      if (s.stopped) break;
    } else {
      s.t = cell_end;
    }
    if (jump_now) {
      double z = rng.uniform(-model.jump_bound, model.jump_bound);
      s.m += z;
      p.jumps.push_back({s.t, z});
      path_push(&p, s.t, s.m, cont);
      ++events;
      if (s.m >= up || s.m <= -down) s.stopped = true;
      next_jump += rng.exponential(model.jump_rate);
    }
  }
  p.stop_time = s.t;
  return p;
}

PathRecord path_compensated_poisson(const ModelSpec& model, RngStream& rng) {
  const double a = model.barrier_up;
  const double rho = model.jump_rate;
  PathRecord p;
  path_push(&p, 0.0, 0.0, 0.0);
  double t = 0.0;
  std::uint64_t k = 0;
  while (true) {
    double w = rng.exponential(rho);
    if (t + w > model.horizon_cap || k + 1 > kMaxEventsPerPath) {
      t = model.horizon_cap;
      path_push(&p, t, static_cast<double>(k) - rho * t, 0.0);
      p.censored = true;
      break;
    }
    t += w;
    double m = static_cast<double>(k) + 1.0 - rho * t;
    ++k;
    p.jumps.push_back({t, 1.0});
    path_push(&p, t, m, 0.0);
    if (m >= a) break;
  }
  p.stop_time = t;
  return p;
}

PathRecord path_random_walk(const ModelSpec& model, RngStream& rng) {
  const long target = static_cast<long>(model.barrier_up);
  const std::uint64_t max_steps = static_cast<std::uint64_t>(std::min(
      model.horizon_cap, static_cast<double>(kMaxEventsPerPath)));
  PathRecord p;
  path_push(&p, 0.0, 0.0, 0.0);
  long m = 0;
  std::uint64_t n = 0;
  p.censored = true;
  while (n < max_steps) {
    double step = (rng.next_u64() & 1) ? 1.0 : -1.0;
    m += static_cast<long>(step);
    ++n;
    p.jumps.push_back({static_cast<double>(n), step});
    path_push(&p, static_cast<double>(n), static_cast<double>(m), 0.0);
    if (m >= target) {
      p.censored = false;
      break;
    }
  }
  p.stop_time = static_cast<double>(n);
  return p;
}

}  // namespace

PathRecord generate_path(const ModelSpec& model, Seed seed, double h) {
  model.validate();
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("step h must be positive finite");
  }
  if (h > model.horizon_cap) {
    throw std::invalid_argument("step h exceeds the horizon cap");
  }
  if (model.two_sided() || model.kind == ModelKind::BrownianUpper) {
    // A grid cell whose diffusion scale rivals the barrier gap would make
    // the bridge correction carry the whole stopping decision.
    double gap = model.barrier_up + (model.two_sided() ? *model.barrier_down : 0.0);
    if (model.sigma * std::sqrt(h) > 0.5 * gap) {
      throw std::invalid_argument("step h too coarse relative to barriers");
    }
  }
  RngStream rng(seed);
  switch (model.kind) {
    case ModelKind::BrownianUpper:
    case ModelKind::BrownianTwoSided:
      return path_brownian(model, rng, h);
    case ModelKind::JumpDiffusionTwoSided:
      return path_jump_diffusion(model, rng, h);
    case ModelKind::CompensatedPoissonUpper:
      return path_compensated_poisson(model, rng);
    case ModelKind::RandomWalkUpper:
      return path_random_walk(model, rng);
  }
  throw std::invalid_argument("unknown model kind");
}

// ===========================================================================
// Analytic oracles
// ===========================================================================

std::optional<double> analytic_oracle(const ModelSpec& model, OracleQuery query,
                                      double lambda) {
  model.validate();
  const bool needs_lambda = query != OracleQuery::MeanTerminal;
  if (needs_lambda && !(lambda > 0.0)) {
    throw std::invalid_argument("oracle query needs lambda > 0");
  }
  const double a = model.barrier_up;
  switch (model.kind) {
    case ModelKind::BrownianUpper:
      switch (query) {
        case OracleQuery::QvTail:
          // P(sqrt(<M>) > lambda) = P(a^2/Z^2 > lambda^2) = P(|Z| < a/lambda)
          return 2.0 * normal_cdf(a / lambda) - 1.0;
        case OracleQuery::SupNegTail:
          return a / (a + lambda);
        case OracleQuery::Laplace:
          // E exp(-lambda^2 <M>_inf / 2); <M> at the stop has the law of
          // the level-a hitting time of a standard Brownian motion.
          return std::exp(-a * lambda);
        case OracleQuery::MeanTerminal:
          return a;
      }
      break;
    case ModelKind::BrownianTwoSided:
      if (query == OracleQuery::SupNegTail && lambda >= *model.barrier_down) {
        return 0.0;  // sup M^- is capped at the lower barrier
      }
      if (query == OracleQuery::MeanTerminal) return 0.0;
      return std::nullopt;
    default:
      break;
  }
  return std::nullopt;
}

}  // namespace martlab
