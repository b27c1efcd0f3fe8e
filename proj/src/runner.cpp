#include "martlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "martlab/checks.hpp"
#include "martlab/rng.hpp"
#include "martlab/stats.hpp"
#include "martlab/tails.hpp"

namespace martlab {

namespace {

// Seed-space tags for the check sample sets, so checks never share streams
// with the main run or with each other.
constexpr std::uint64_t kMeanOneTag = 0x6d65616e5f6f6e65ULL;
constexpr std::uint64_t kSandwichTag = 0x73616e6477696368ULL;
constexpr std::uint64_t kBdgTag = 0x6264675f72617469ULL;
constexpr std::uint64_t kEnvelopeTag = 0x656e76656c6f7065ULL;

bool check_enabled(const ExperimentConfig& config, const char* name) {
  return std::find(config.checks_enabled.begin(), config.checks_enabled.end(),
                   name) != config.checks_enabled.end();
}

}  // namespace

std::vector<TerminalSample> sample_terminals(const ModelSpec& model,
                                             std::size_t n,
                                             std::uint64_t master,
                                             unsigned threads, double step) {
  model.validate();
  std::vector<TerminalSample> out(n);
  if (n == 0) return out;
  std::size_t n_workers = std::max(1u, threads);
  n_workers = std::min<std::size_t>(n_workers, n);

  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = sample_terminal(model, Seed{master, i}, step);
    }
  };
  if (n_workers == 1) {
    fill(0, n);
    return out;
  }

  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(n_workers);
  std::size_t chunk = (n + n_workers - 1) / n_workers;
  for (std::size_t w = 0; w < n_workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        fill(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  auto t0 = std::chrono::steady_clock::now();

  ExperimentReport report;
  report.model = config.model;
  report.n_paths = config.n_paths;
  report.master_seed = config.master_seed;
  report.threads = config.threads;
  report.step = config.step;

  std::vector<TerminalSample> samples =
      sample_terminals(config.model, config.n_paths, config.master_seed,
                       config.threads, config.step);

  // All reductions below run single-threaded in index order; together with
  // the pure per-index sampling this pins every reported digit.
  std::vector<double> qv_pred(samples.size());
  std::vector<double> qv_opt(samples.size());
  std::vector<double> sup_neg(samples.size());
  std::vector<double> qv_pred_censored;
  MeanAccumulator mean_term;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const TerminalSample& s = samples[i];
    qv_pred[i] = s.qv_pred;
    qv_opt[i] = s.qv_opt;
    sup_neg[i] = s.sup_neg;
    if (s.censored) {
      ++report.n_censored;
      qv_pred_censored.push_back(s.qv_pred);
    } else {
      mean_term.add(s.m_inf);
    }
  }
  double censor_fraction = static_cast<double>(report.n_censored) /
                           static_cast<double>(config.n_paths);
  report.censor_warning = censor_fraction > config.censor_warn_fraction;
  if (mean_term.count() > 0) {
    report.mean_terminal = {mean_term.mean(), mean_term.std_error()};
  }

  auto big_grid_for = [&](const std::vector<double>& xs, TailMode mode) {
    if (!config.big_lambdas.empty()) return config.big_lambdas;
    return default_big_lambdas(xs, mode, config.model.horizon_cap);
  };
  report.qv_pred_curve = empirical_tail_curve(
      qv_pred, big_grid_for(qv_pred, TailMode::SqrtTail), TailMode::SqrtTail);
  report.qv_opt_curve = empirical_tail_curve(
      qv_opt, big_grid_for(qv_opt, TailMode::SqrtTail), TailMode::SqrtTail);
  report.sup_neg_curve =
      sup_neg_tail_curve(sup_neg, big_grid_for(sup_neg, TailMode::PlainTail));

  report.qv_pred_plateau = plateau_estimate(report.qv_pred_curve);
  report.qv_opt_plateau = plateau_estimate(report.qv_opt_curve);
  report.sup_neg_limit = extrapolated_limit(report.sup_neg_curve);

  std::vector<double> small = config.small_lambdas;
  std::sort(small.begin(), small.end());
  small.erase(std::unique(small.begin(), small.end()), small.end());
  report.laplace.n_samples = qv_pred.size();
  for (double l : small) {
    ValueWithError v = laplace_side(qv_pred, l);
    report.laplace.lambdas.push_back(l);
    report.laplace.values.push_back(v.value);
    report.laplace.std_errors.push_back(v.std_error);
    if (!qv_pred_censored.empty()) {
      report.laplace_bias_bound = std::max(
          report.laplace_bias_bound,
          laplace_censoring_bias(qv_pred_censored, l, qv_pred.size()));
    }
  }
  report.laplace_limit = laplace_extrapolate(qv_pred, small);

  report.tauberian =
      tauberian_compare(samples, small, report.qv_pred_curve.lambdas, false);

  report.verdict =
      class_d_diagnostic(report.qv_pred_curve, report.qv_opt_curve,
                         report.sup_neg_curve, config.verdict_sigma);

  if (check_enabled(config, "mean_one")) {
    double lambda = std::min(small.back(), config.model.epsilon);
    report.mean_one = mean_one_density_check(
        config.model, lambda, config.check_paths,
        derive_master(config.master_seed, kMeanOneTag));
  }
  if (check_enabled(config, "sandwich")) {
    report.sandwich =
        sandwich_check(config.model, small, config.check_paths,
                       derive_master(config.master_seed, kSandwichTag));
  }
  if (check_enabled(config, "bdg_ratio") && config.model.has_jumps()) {
    // Continuous models carry no bracket discrepancy; the sweep is skipped
    // rather than rejected so one config template fits every model.
    report.bdg_ratios =
        bdg_ratio_sweep(config.model, config.bdg_horizons, config.check_paths,
                        derive_master(config.master_seed, kBdgTag));
  }
  if (check_enabled(config, "envelope")) {
    report.envelopes = small_lambda_envelope_check(
        config.model, small, config.check_paths,
        derive_master(config.master_seed, kEnvelopeTag));
  }

  auto t1 = std::chrono::steady_clock::now();
  report.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  report.paths_per_second =
      report.wall_seconds > 0.0
          ? static_cast<double>(config.n_paths) / report.wall_seconds
          : 0.0;
  return report;
}

}  // namespace martlab
