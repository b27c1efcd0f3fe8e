#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "martlab/models.hpp"
#include "martlab/tails.hpp"

using namespace martlab;

namespace {

std::vector<double> repeat_block(std::vector<double> block, std::size_t copies) {
  std::vector<double> out;
  out.reserve(block.size() * copies);
  for (std::size_t c = 0; c < copies; ++c) {
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

std::vector<TerminalSample> draw_terminals(const ModelSpec& model,
                                           std::size_t n,
                                           std::uint64_t master) {
  std::vector<TerminalSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = sample_terminal(model, Seed{master, i});
  }
  return out;
}

// Plain one-regressor OLS intercept, kept deliberately naive as an oracle
// for the weight-based implementations.
double ols_intercept(const std::vector<double>& xs,
                     const std::vector<double>& ys) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  double slope = sxy / sxx;
  return my - slope * mx;
}

}  // namespace

TEST_CASE("tail curve is an exact counting estimator") {
  // 25 copies of {1, 4, 9, 16}: percentages are exact quarters.
  std::vector<double> qv = repeat_block({1.0, 4.0, 9.0, 16.0}, 25);
  TailCurve curve =
      empirical_tail_curve(qv, {1.5, 2.0, 2.5, 4.5}, TailMode::SqrtTail);
  REQUIRE(curve.lambdas.size() == 4);
  CHECK(curve.n_samples == 100);
  CHECK(curve.mode == TailMode::SqrtTail);
  // sqrt mode counts qv strictly above lambda^2.
  CHECK(curve.values[0] == 1.5 * 0.75);
  CHECK(curve.values[1] == 2.0 * 0.50);  // qv == 4 is not above 4
  CHECK(curve.values[2] == 2.5 * 0.50);
  CHECK(curve.values[3] == 0.0);
  CHECK(curve.std_errors[0] ==
        doctest::Approx(1.5 * std::sqrt(0.75 * 0.25 / 100.0)).epsilon(1e-14));
  CHECK(curve.std_errors[3] == 0.0);

  // Plain mode thresholds the raw values.
  TailCurve plain = empirical_tail_curve(qv, {3.5}, TailMode::PlainTail);
  CHECK(plain.values[0] == 3.5 * 0.75);

  // The grid comes back sorted and deduplicated.
  TailCurve dedup =
      empirical_tail_curve(qv, {2.5, 1.5, 2.5}, TailMode::SqrtTail);
  REQUIRE(dedup.lambdas.size() == 2);
  CHECK(dedup.lambdas[0] == 1.5);
  CHECK(dedup.lambdas[1] == 2.5);
}

TEST_CASE("tail curve input validation") {
  std::vector<double> too_few(99, 1.0);
  CHECK_THROWS_AS(empirical_tail_curve(too_few, {1.0}, TailMode::SqrtTail),
                  std::invalid_argument);
  std::vector<double> enough(100, 1.0);
  CHECK_THROWS_AS(empirical_tail_curve(enough, {}, TailMode::SqrtTail),
                  std::invalid_argument);
  CHECK_THROWS_AS(empirical_tail_curve(enough, {0.0}, TailMode::SqrtTail),
                  std::invalid_argument);
  CHECK_THROWS_AS(empirical_tail_curve(enough, {-1.0}, TailMode::SqrtTail),
                  std::invalid_argument);
}

TEST_CASE("tail mode names") {
  CHECK(std::string(tail_mode_name(TailMode::SqrtTail)) == "sqrt_tail");
  CHECK(std::string(tail_mode_name(TailMode::PlainTail)) == "plain_tail");
}

TEST_CASE("hitting-time tails match the closed form") {
  ModelSpec a = ModelSpec::brownian_upper(1.0);
  std::vector<TerminalSample> samples = draw_terminals(a, 200000, 101);
  std::vector<double> qv, sup_neg;
  qv.reserve(samples.size());
  sup_neg.reserve(samples.size());
  for (const TerminalSample& s : samples) {
    qv.push_back(s.qv_pred);
    sup_neg.push_back(s.sup_neg);
  }

  // P(sqrt(qv) > l) = 2 Phi(1/l) - 1 = erf(1/(l sqrt(2))).
  TailCurve curve =
      empirical_tail_curve(qv, {10.0, 20.0, 50.0}, TailMode::SqrtTail);
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
    double l = curve.lambdas[i];
    double target = l * std::erf(1.0 / (l * std::sqrt(2.0)));
    CHECK(std::abs(curve.values[i] - target) <
          3.0 * curve.std_errors[i] + 1e-12);
    CHECK(curve.std_errors[i] > 0.0);
  }
  // Tail probability must fall with lambda even though the curve is flat.
  CHECK(curve.values[0] / curve.lambdas[0] > curve.values[1] / curve.lambdas[1]);
  CHECK(curve.values[1] / curve.lambdas[1] > curve.values[2] / curve.lambdas[2]);

  // P(sup M^- > l) = 1/(1+l), so the plain curve sits at l/(1+l).
  TailCurve neg = sup_neg_tail_curve(sup_neg, {9.0, 99.0});
  CHECK(std::abs(neg.values[0] - 0.9) < 3.0 * neg.std_errors[0]);
  CHECK(std::abs(neg.values[1] - 0.99) < 3.0 * neg.std_errors[1]);

  // Transform side: E e^{-l^2 qv / 2} = e^{-l}, value (1 - e^{-l}) / l.
  for (double l : {0.05, 0.1}) {
    ValueWithError v = laplace_side(qv, l);
    double target = -std::expm1(-l) / l;
    CHECK(std::abs(v.value - target) < 3.5 * v.std_error);
    CHECK(v.std_error > 0.0);
  }

  // The extrapolated intercept estimates the OLS intercept of the exact
  // values; compare against a naive OLS oracle on those exact values.
  std::vector<double> grid = {0.02, 0.05, 0.1, 0.2, 0.5};
  std::vector<double> exact;
  for (double l : grid) exact.push_back(-std::expm1(-l) / l);
  double exact_intercept = ols_intercept(grid, exact);
  ValueWithError lim = laplace_extrapolate(qv, grid);
  CHECK(std::abs(lim.value - exact_intercept) < 4.0 * lim.std_error);
  CHECK(lim.std_error > 0.0);
  CHECK(lim.std_error < 0.02);

  // Full two-sided comparison: the ratio has to sit near 1.
  TauberianReport rep = tauberian_compare(samples, grid, curve.lambdas, false);
  CHECK(rep.mean_terminal.value == 1.0);  // every uncensored path stops at 1
  CHECK(std::abs(rep.ratio - 1.0) < 0.05);
  CHECK(rep.ratio_std_error > 0.0);
  CHECK(rep.laplace_bias_bound >= 0.0);
  CHECK(rep.laplace_bias_bound < 1e-6);

  // Optional QV is the same process for a continuous martingale.
  TauberianReport rep_opt = tauberian_compare(samples, grid, curve.lambdas, true);
  CHECK(rep_opt.tail_limit.value == rep.tail_limit.value);
}

TEST_CASE("plateau estimate pools with inverse variance") {
  TailCurve curve;
  curve.mode = TailMode::SqrtTail;
  curve.n_samples = 10000;
  curve.lambdas = {1.0, 2.0};
  curve.values = {0.8, 0.8};
  curve.std_errors = {0.1, 0.1};
  ValueWithError v = plateau_estimate(curve);
  CHECK(v.value == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(v.std_error == doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-12));

  // Unequal errors pull the pooled value toward the sharper point.
  curve.values = {0.6, 0.9};
  curve.std_errors = {0.05, 0.1};
  ValueWithError w = plateau_estimate(curve);
  CHECK(w.value == doctest::Approx((0.6 / 0.0025 + 0.9 / 0.01) /
                                   (1.0 / 0.0025 + 1.0 / 0.01))
                       .epsilon(1e-12));

  TailCurve empty;
  CHECK_THROWS_AS(plateau_estimate(empty), std::invalid_argument);
}

TEST_CASE("extrapolated limit recovers an exact intercept") {
  TailCurve curve;
  curve.mode = TailMode::PlainTail;
  curve.n_samples = 10000;
  curve.lambdas = {2.0, 4.0, 8.0, 10.0};
  for (double l : curve.lambdas) {
    curve.values.push_back(1.0 - 1.0 / l);  // exactly linear in 1/lambda
    curve.std_errors.push_back(0.05);
  }
  ValueWithError v = extrapolated_limit(curve);
  CHECK(v.value == doctest::Approx(1.0).epsilon(1e-12));
  // Equal point errors give SE = se * sqrt(1/n + xbar^2 / Sxx) in x = 1/l.
  double xbar = 0.0, sxx = 0.0;
  std::vector<double> xs;
  for (double l : curve.lambdas) xs.push_back(1.0 / l);
  for (double x : xs) xbar += x;
  xbar /= static_cast<double>(xs.size());
  for (double x : xs) sxx += (x - xbar) * (x - xbar);
  double expected_se =
      0.05 * std::sqrt(1.0 / static_cast<double>(xs.size()) + xbar * xbar / sxx);
  CHECK(v.std_error == doctest::Approx(expected_se).epsilon(1e-12));
}

TEST_CASE("censoring bias bound is the capped exponential mass") {
  std::vector<double> censored = {2.0, 8.0};
  double expected =
      (std::exp(-0.125 * 2.0) + std::exp(-0.125 * 8.0)) / (0.5 * 10.0);
  CHECK(laplace_censoring_bias(censored, 0.5, 10) ==
        doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(laplace_censoring_bias(censored, 0.0, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(laplace_censoring_bias(censored, 0.5, 0),
                  std::invalid_argument);
}

TEST_CASE("class membership diagnostic") {
  // All-zero samples: every curve hugs zero, consistent with class D.
  std::vector<double> zeros(200, 0.0);
  TailCurve z1 = empirical_tail_curve(zeros, {1.0, 2.0, 3.0}, TailMode::SqrtTail);
  TailCurve z2 = empirical_tail_curve(zeros, {1.0, 2.0, 3.0}, TailMode::SqrtTail);
  TailCurve z3 = empirical_tail_curve(zeros, {1.0, 2.0, 3.0}, TailMode::PlainTail);
  CHECK(class_d_diagnostic(z1, z2, z3, 3.0) == ClassDVerdict::ConsistentWithD);

  // Hitting-time curves plateau well above zero: not class D.
  ModelSpec a = ModelSpec::brownian_upper(1.0);
  std::vector<TerminalSample> samples = draw_terminals(a, 20000, 102);
  std::vector<double> qv, sup_neg;
  for (const TerminalSample& s : samples) {
    qv.push_back(s.qv_pred);
    sup_neg.push_back(s.sup_neg);
  }
  TailCurve q = empirical_tail_curve(qv, {10.0, 20.0, 40.0}, TailMode::SqrtTail);
  TailCurve n = sup_neg_tail_curve(sup_neg, {10.0, 20.0, 40.0});
  CHECK(class_d_diagnostic(q, q, n, 3.0) == ClassDVerdict::NotD);

  // Too-short curves cannot show a trend.
  TailCurve s1 = empirical_tail_curve(zeros, {1.0, 2.0}, TailMode::SqrtTail);
  CHECK(class_d_diagnostic(s1, z2, z3, 3.0) == ClassDVerdict::Inconclusive);

  CHECK(std::string(to_string(ClassDVerdict::ConsistentWithD)) ==
        "consistent_with_D");
  CHECK(std::string(to_string(ClassDVerdict::NotD)) == "not_D");
  CHECK(std::string(to_string(ClassDVerdict::Inconclusive)) == "inconclusive");
}

TEST_CASE("default evaluation grid shape") {
  ModelSpec a = ModelSpec::brownian_upper(1.0);
  std::vector<TerminalSample> samples = draw_terminals(a, 20000, 103);
  std::vector<double> qv;
  for (const TerminalSample& s : samples) qv.push_back(s.qv_pred);
  std::vector<double> grid =
      default_big_lambdas(qv, TailMode::SqrtTail, 1e6);
  REQUIRE(grid.size() == 12);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(grid[i] > grid[i - 1]);
  }
  CHECK(grid.back() == 300.0);  // 0.3 * sqrt(horizon cap), exactly
  // Low end is 5x the median of sqrt(qv); the hitting-time median is
  // 1/Phi^{-1}(0.75) ~ 1.4826.
  CHECK(grid.front() > 6.5);
  CHECK(grid.front() < 8.5);
}

TEST_CASE("tail curve csv round-trips dyadic values exactly") {
  std::vector<double> qv;
  for (int i = 0; i < 128; ++i) qv.push_back(0.25);
  for (int i = 0; i < 128; ++i) qv.push_back(4.0);
  TailCurve curve = empirical_tail_curve(qv, {1.0, 2.0}, TailMode::SqrtTail);
  std::ostringstream os;
  write_tail_curve_csv(os, curve);
  CHECK(os.str() ==
        "# martlab tail curve, schema v1\n"
        "lambda,value,std_error,n,mode\n"
        "1,0.5,0.03125,256,sqrt_tail\n"
        "2,0,0,256,sqrt_tail\n");
}
