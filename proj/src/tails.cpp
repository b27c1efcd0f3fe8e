#include "martlab/tails.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "martlab/stats.hpp"

namespace martlab {

namespace {

std::vector<double> clean_grid(std::vector<double> lambdas) {
  if (lambdas.empty()) throw std::invalid_argument("lambda grid is empty");
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw std::invalid_argument("lambda grid must be positive finite");
    }
  }
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
  return lambdas;
}

// Standard error a curve point would have at a single count; used as the
// weighting floor so exact-zero points keep finite weight.
double se_floor(double lambda, std::size_t n) {
  double p1 = 1.0 / static_cast<double>(n);
  return lambda * std::sqrt(p1 * (1.0 - p1) / static_cast<double>(n));
}

ValueWithError weighted_plateau(const std::vector<double>& lambdas,
                                const std::vector<double>& values,
                                const std::vector<double>& errors,
                                std::size_t n_samples) {
  double sum_w = 0.0, sum_wv = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    double se = std::max(errors[i], se_floor(lambdas[i], n_samples));
    double w = 1.0 / (se * se);
    sum_w += w;
    sum_wv += w * values[i];
  }
  return {sum_wv / sum_w, std::sqrt(1.0 / sum_w)};
}

}  // namespace

const char* tail_mode_name(TailMode mode) {
  return mode == TailMode::SqrtTail ? "sqrt_tail" : "plain_tail";
}

TailCurve empirical_tail_curve(std::span<const double> samples,
                               std::vector<double> lambdas, TailMode mode) {
  if (samples.size() < 100) {
    throw std::invalid_argument("tail estimation needs at least 100 samples");
  }
  TailCurve curve;
  curve.mode = mode;
  curve.n_samples = samples.size();
  curve.lambdas = clean_grid(std::move(lambdas));
  // One sort of the transformed samples, then each grid point is a binary
  // search. Comparing against lambda^2 in sqrt mode avoids N square roots.
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  curve.values.reserve(curve.lambdas.size());
  curve.std_errors.reserve(curve.lambdas.size());
  for (double l : curve.lambdas) {
    double cut = mode == TailMode::SqrtTail ? l * l : l;
    auto it = std::upper_bound(xs.begin(), xs.end(), cut);
    double p = static_cast<double>(xs.end() - it) / n;
    curve.values.push_back(l * p);
    curve.std_errors.push_back(l * std::sqrt(p * (1.0 - p) / n));
  }
  return curve;
}

TailCurve sup_neg_tail_curve(std::span<const double> sup_neg_samples,
                             std::vector<double> lambdas) {
  return empirical_tail_curve(sup_neg_samples, std::move(lambdas),
                              TailMode::PlainTail);
}

ValueWithError laplace_side(std::span<const double> samples, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("laplace_side needs lambda > 0");
  }
  if (samples.empty()) {
    throw std::invalid_argument("laplace_side on empty sample set");
  }
  MeanAccumulator acc;
  const double c = -0.5 * lambda * lambda;
  for (double x : samples) acc.add(std::exp(c * x));
  return {(1.0 - acc.mean()) / lambda, acc.std_error() / lambda};
}

double laplace_censoring_bias(std::span<const double> censored_samples,
                              double lambda, std::size_t n_total) {
  if (!(lambda > 0.0) || n_total == 0) {
    throw std::invalid_argument("bad laplace bias arguments");
  }
  // A censored sample's true X exceeds its capped value, so the estimator
  // uses e^{-l^2 X_cap/2} where the truth is smaller; summing the capped
  // exponentials bounds the total understatement of the value.
  KahanSum s;
  const double c = -0.5 * lambda * lambda;
  for (double x : censored_samples) s.add(std::exp(c * x));
  return s.value() / (lambda * static_cast<double>(n_total));
}

ValueWithError laplace_extrapolate(std::span<const double> samples,
                                   std::span<const double> small_lambdas) {
  if (samples.empty()) {
    throw std::invalid_argument("laplace_extrapolate on empty sample set");
  }
  std::vector<double> grid(small_lambdas.begin(), small_lambdas.end());
  grid = clean_grid(std::move(grid));
  std::vector<double> c = ols_intercept_weights(grid);
  // The intercept is sum_i c_i * mean_j g_i(X_j) = mean_j h(X_j): average
  // of one per-sample statistic, so its SE needs no independence assumption
  // across grid points.
  MeanAccumulator acc;
  for (double x : samples) {
    double h = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double l = grid[i];
      h += c[i] * (-std::expm1(-0.5 * l * l * x)) / l;
    }
    acc.add(h);
  }
  return {acc.mean(), acc.std_error()};
}

ValueWithError plateau_estimate(const TailCurve& curve) {
  if (curve.lambdas.empty() || curve.n_samples == 0) {
    throw std::invalid_argument("plateau of an empty curve");
  }
  return weighted_plateau(curve.lambdas, curve.values, curve.std_errors,
                          curve.n_samples);
}

ValueWithError extrapolated_limit(const TailCurve& curve) {
  std::vector<double> inv(curve.lambdas.size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / curve.lambdas[i];
  std::vector<double> c = ols_intercept_weights(inv);
  double value = 0.0, var = 0.0;
  for (std::size_t i = 0; i < inv.size(); ++i) {
    value += c[i] * curve.values[i];
    // Grid points share samples, so treating them as independent makes
    // this SE approximate; the value itself is exact.
    double se = std::max(curve.std_errors[i],
                         se_floor(curve.lambdas[i], curve.n_samples));
    var += c[i] * c[i] * se * se;
  }
  return {value, std::sqrt(var)};
}

TauberianReport tauberian_compare(std::span<const TerminalSample> samples,
                                  std::span<const double> small_lambdas,
                                  std::span<const double> big_lambdas,
                                  bool use_optional_qv) {
  if (samples.empty()) {
    throw std::invalid_argument("tauberian_compare on empty sample set");
  }
  if (small_lambdas.empty() || big_lambdas.empty()) {
    throw std::invalid_argument("tauberian_compare needs nonempty grids");
  }
  std::vector<double> qv;
  qv.reserve(samples.size());
  std::vector<double> qv_censored;
  MeanAccumulator mean_term;
  for (const TerminalSample& s : samples) {
    double x = use_optional_qv ? s.qv_opt : s.qv_pred;
    qv.push_back(x);
    if (s.censored) {
      qv_censored.push_back(x);
    } else {
      mean_term.add(s.m_inf);
    }
  }

  TauberianReport out;
  out.mean_terminal = {mean_term.mean(), mean_term.std_error()};
  out.laplace_limit = laplace_extrapolate(qv, small_lambdas);
  std::vector<double> big(big_lambdas.begin(), big_lambdas.end());
  TailCurve curve = empirical_tail_curve(qv, big, TailMode::SqrtTail);
  out.tail_limit = plateau_estimate(curve);

  if (!qv_censored.empty()) {
    for (double l : small_lambdas) {
      out.laplace_bias_bound =
          std::max(out.laplace_bias_bound,
                   laplace_censoring_bias(qv_censored, l, samples.size()));
    }
  }

  const double kSqrt2OverPi = 0.79788456080286535588;
  double denom = kSqrt2OverPi * out.laplace_limit.value;
  if (denom > 0.0) {
    double r = out.tail_limit.value / denom;
    out.ratio = r;
    double rel_t = out.tail_limit.value != 0.0
                       ? out.tail_limit.std_error / out.tail_limit.value
                       : 0.0;
    double rel_l = out.laplace_limit.std_error / out.laplace_limit.value;
    out.ratio_std_error = std::abs(r) * std::sqrt(rel_t * rel_t + rel_l * rel_l);
  } else {
    // Both sides at zero (class-D models): the ratio is undetermined.
    out.ratio = std::numeric_limits<double>::quiet_NaN();
    out.ratio_std_error = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

const char* to_string(ClassDVerdict verdict) {
  switch (verdict) {
    case ClassDVerdict::ConsistentWithD: return "consistent_with_D";
    case ClassDVerdict::NotD: return "not_D";
    case ClassDVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

ClassDVerdict class_d_diagnostic(const TailCurve& qv_pred_curve,
                                 const TailCurve& qv_opt_curve,
                                 const TailCurve& sup_neg_curve,
                                 double sigma) {
  const TailCurve* curves[3] = {&qv_pred_curve, &qv_opt_curve, &sup_neg_curve};
  bool all_trend_zero = true;
  bool any_positive_plateau = false;
  for (const TailCurve* c : curves) {
    std::size_t n = c->lambdas.size();
    if (n < 3) return ClassDVerdict::Inconclusive;
    // Judge the trend on the trailing third of the grid, where a genuine
    // plateau has settled and a vanishing tail has vanished.
    std::size_t k = (n + 2) / 3;
    std::size_t from = n - k;
    std::vector<double> l(c->lambdas.begin() + from, c->lambdas.end());
    std::vector<double> v(c->values.begin() + from, c->values.end());
    std::vector<double> e(c->std_errors.begin() + from, c->std_errors.end());
    ValueWithError tail = weighted_plateau(l, v, e, c->n_samples);
    if (tail.value > sigma * tail.std_error) {
      any_positive_plateau = true;
      all_trend_zero = false;
    } else if (!(tail.value < sigma * tail.std_error)) {
      all_trend_zero = false;  // sits exactly on the threshold
    }
  }
  if (any_positive_plateau) return ClassDVerdict::NotD;
  if (all_trend_zero) return ClassDVerdict::ConsistentWithD;
  return ClassDVerdict::Inconclusive;
}

std::vector<double> default_big_lambdas(std::span<const double> samples,
                                        TailMode mode, double horizon_cap) {
  if (samples.empty()) {
    throw std::invalid_argument("default grid needs samples");
  }
  if (!(horizon_cap > 0.0)) {
    throw std::invalid_argument("default grid needs a positive horizon cap");
  }
  std::vector<double> xs(samples.begin(), samples.end());
  double med = sample_median(std::move(xs));
  if (mode == TailMode::SqrtTail) med = std::sqrt(std::max(med, 0.0));
  double hi = 0.3 * std::sqrt(horizon_cap);
  double lo = 5.0 * med;
  // Degenerate sample sets (all mass near zero) or very heavy medians still
  // get a usable geometric grid.
  lo = std::min(lo, hi / 10.0);
  lo = std::max(lo, hi * 1e-3);
  const int kPoints = 12;
  std::vector<double> grid(kPoints);
  double ratio = std::pow(hi / lo, 1.0 / (kPoints - 1));
  double v = lo;
  for (int i = 0; i < kPoints; ++i) {
    grid[i] = v;
    v *= ratio;
  }
  grid.back() = hi;
  return grid;
}

void write_tail_curve_csv(std::ostream& os, const TailCurve& curve) {
  os << "# martlab tail curve, schema v1\n";
  os << "lambda,value,std_error,n,mode\n";
  char buf[160];
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%zu,%s\n",
                  curve.lambdas[i], curve.values[i], curve.std_errors[i],
                  curve.n_samples, tail_mode_name(curve.mode));
    os << buf;
  }
}

}  // namespace martlab
