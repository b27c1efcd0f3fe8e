#include "martlab/stochexp.hpp"

#include <cmath>
#include <stdexcept>

#include "martlab/stats.hpp"

namespace martlab {

namespace {

void check_lambda(const ModelSpec& model, double lambda) {
  if (!std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite");
  }
  if (std::abs(lambda) > model.epsilon) {
    throw std::invalid_argument(
        "lambda outside the model's documented exponential-moment range");
  }
}

// (e^{lambda z} - 1 - lambda z) integrated against the uniform density on
// [-K, K]: sinh(lambda K)/(lambda K) - 1, with the small-argument expansion
// x^2/6 + x^4/120 to dodge the 0/0.
double uniform_jump_cumulant(double lambda, double k) {
  double x = lambda * k;
  if (std::abs(x) < 1e-4) {
    double x2 = x * x;
    return x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sinh(x) / x - 1.0;
}

}  // namespace

double log1p_minus(double x) {
  if (x <= -1.0) {
    throw std::invalid_argument("log1p_minus needs x > -1");
  }
  if (std::abs(x) < 1e-4) {
    // log(1+x) - x = -x^2/2 + x^3/3 - x^4/4 + ...
    return x * x * (-0.5 + x * (1.0 / 3.0 + x * (-0.25 + x * 0.2)));
  }
  return std::log1p(x) - x;
}

CumulantValue cumulant(const ModelSpec& model, double lambda, double t) {
  model.validate();
  check_lambda(model, lambda);
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("cumulant time must be nonnegative finite");
  }
  CumulantValue out;
  out.lambda = lambda;
  switch (model.kind) {
    case ModelKind::BrownianUpper:
    case ModelKind::BrownianTwoSided:
      break;  // no jumps, G = 0
    case ModelKind::CompensatedPoissonUpper: {
      // unit jumps: e^lambda - 1 - lambda per unit compensator mass
      double per = std::expm1(lambda) - lambda;
      out.continuous_part = model.jump_rate * t * per;
      break;
    }
    case ModelKind::JumpDiffusionTwoSided:
      out.continuous_part =
          model.jump_rate * t * uniform_jump_cumulant(lambda, model.jump_bound);
      break;
    case ModelKind::RandomWalkUpper: {
      // one +-1 atom per integer time: cosh(lambda) - 1 each, computed as
      // 2 sinh^2(lambda/2) to keep small-lambda precision
      double sh = std::sinh(0.5 * lambda);
      double atom = 2.0 * sh * sh;
      auto n = static_cast<std::size_t>(std::floor(t));
      out.atoms.reserve(n);
      for (std::size_t i = 1; i <= n; ++i) {
        out.atoms.emplace_back(static_cast<double>(i), atom);
      }
      break;
    }
  }
  return out;
}

double stochastic_exponential(const PathRecord& path, const ModelSpec& model,
                              double lambda) {
  CumulantValue g = cumulant(model, lambda, path.stop_time);
  double log_e = 0.5 * lambda * lambda * model.sigma * model.sigma *
                 path.stop_time;
  log_e += g.continuous_part;
  KahanSum atom_terms;
  for (const auto& a : g.atoms) {
    // log(1 + dG) enters through e^G * prod (1+dG) e^{-dG}
    atom_terms.add(a.second + log1p_minus(a.second));
  }
  return log_e + atom_terms.value();
}

double density(const PathRecord& path, const ModelSpec& model, double lambda) {
  double m_terminal = path.values.empty() ? 0.0 : path.values.back();
  return std::exp(lambda * m_terminal -
                  stochastic_exponential(path, model, lambda));
}

SandwichBound sandwich_bounds(double lambda, double jump_bound,
                              double qv_pred) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("sandwich_bounds needs lambda > 0");
  }
  if (jump_bound < 0.0 || qv_pred < 0.0) {
    throw std::invalid_argument("jump bound and qv must be nonnegative");
  }
  SandwichBound out;
  out.lambda = lambda;
  out.jump_bound = jump_bound;
  out.qv_pred = qv_pred;
  double base = 0.5 * lambda * lambda * qv_pred;
  double lke = lambda * jump_bound * std::exp(lambda * jump_bound);
  double phi = 1.0 - lke;
  double lower_factor =
      phi - 0.125 * lambda * lambda * jump_bound * jump_bound * phi * phi;
  out.upper = base * (1.0 + lke / 3.0);
  out.lower = base * lower_factor;
  out.valid = phi > 0.0 && lower_factor > 0.0;
  return out;
}

double terminal_log_exponential(const ModelSpec& model, double lambda,
                                const TerminalSample& sample) {
  model.validate();
  check_lambda(model, lambda);
  const double l2h = 0.5 * lambda * lambda;
  switch (model.kind) {
    case ModelKind::BrownianUpper:
    case ModelKind::BrownianTwoSided:
      return l2h * sample.qv_pred;  // <M^c> is the whole of <M>
    case ModelKind::CompensatedPoissonUpper: {
      double t = sample.qv_pred / model.jump_rate;  // <M> = rho * t
      return model.jump_rate * t * (std::expm1(lambda) - lambda);
    }
    case ModelKind::JumpDiffusionTwoSided: {
      double t = sample.qv_pred / model.qv_rate();
      return l2h * model.sigma * model.sigma * t +
             model.jump_rate * t *
                 uniform_jump_cumulant(lambda, model.jump_bound);
    }
    case ModelKind::RandomWalkUpper: {
      // atom count = step count = <M>; log cosh via log1p(2 sinh^2(l/2))
      double sh = std::sinh(0.5 * lambda);
      return sample.qv_pred * std::log1p(2.0 * sh * sh);
    }
  }
  throw std::invalid_argument("unknown model kind");
}

double terminal_density(const ModelSpec& model, double lambda,
                        const TerminalSample& sample) {
  return std::exp(lambda * sample.m_inf -
                  terminal_log_exponential(model, lambda, sample));
}

}  // namespace martlab
