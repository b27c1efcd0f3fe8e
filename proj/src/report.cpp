#include "martlab/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace martlab {

namespace {

using nlohmann::json;

json to_json(const ValueWithError& v) {
  return json{{"value", v.value}, {"std_error", v.std_error}};
}

json to_json(const TailCurve& c) {
  return json{{"mode", tail_mode_name(c.mode)},
              {"n_samples", c.n_samples},
              {"lambdas", c.lambdas},
              {"values", c.values},
              {"std_errors", c.std_errors}};
}

json payload_json(const ExperimentReport& r) {
  json model{{"kind", model_kind_name(r.model.kind)},
             {"sigma", r.model.sigma},
             {"jump_rate", r.model.jump_rate},
             {"jump_bound", r.model.jump_bound},
             {"barrier_up", r.model.barrier_up},
             {"barrier_down", r.model.barrier_down
                                  ? json(*r.model.barrier_down)
                                  : json(nullptr)},
             {"horizon_cap", r.model.horizon_cap},
             {"epsilon", r.model.epsilon}};

  json laplace{{"lambdas", r.laplace.lambdas},
               {"values", r.laplace.values},
               {"std_errors", r.laplace.std_errors},
               {"n_samples", r.laplace.n_samples},
               {"extrapolated", to_json(r.laplace_limit)},
               {"censoring_bias_bound", r.laplace_bias_bound}};

  json tauberian{{"laplace_limit", to_json(r.tauberian.laplace_limit)},
                 {"tail_limit", to_json(r.tauberian.tail_limit)},
                 {"mean_terminal", to_json(r.tauberian.mean_terminal)},
                 {"ratio", r.tauberian.ratio},
                 {"ratio_std_error", r.tauberian.ratio_std_error},
                 {"laplace_bias_bound", r.tauberian.laplace_bias_bound}};

  json checks;
  if (r.mean_one) {
    checks["mean_one"] = json{{"lambda", r.mean_one->lambda},
                              {"mean", r.mean_one->mean},
                              {"std_error", r.mean_one->std_error},
                              {"z_score", r.mean_one->z_score},
                              {"n_paths", r.mean_one->n_paths}};
  } else {
    checks["mean_one"] = nullptr;
  }
  if (r.sandwich) {
    json violations = json::array();
    for (const SandwichViolation& v : r.sandwich->violations) {
      violations.push_back(json{{"path_index", v.path_index},
                                {"lambda", v.lambda},
                                {"log_exponential", v.log_exponential},
                                {"lower", v.lower},
                                {"upper", v.upper},
                                {"m_inf", v.sample.m_inf},
                                {"qv_pred", v.sample.qv_pred},
                                {"qv_opt", v.sample.qv_opt}});
    }
    checks["sandwich"] = json{{"fraction", r.sandwich->fraction},
                              {"n_pairs", r.sandwich->n_pairs},
                              {"n_satisfied", r.sandwich->n_satisfied},
                              {"n_invalid", r.sandwich->n_invalid},
                              {"violations", violations}};
  } else {
    checks["sandwich"] = nullptr;
  }
  json bdg = json::array();
  for (const BdgRatioPoint& p : r.bdg_ratios) {
    bdg.push_back(json{{"horizon", p.horizon},
                       {"ratio", p.ratio},
                       {"sup_l2_mean", p.sup_l2_mean},
                       {"qv_mean", p.qv_mean}});
  }
  checks["bdg_ratio"] = bdg;
  if (r.envelopes) {
    checks["envelope"] = json{{"lower_mean", r.envelopes->lower_mean},
                              {"lower_max", r.envelopes->lower_max},
                              {"upper_mean", r.envelopes->upper_mean},
                              {"upper_max", r.envelopes->upper_max},
                              {"n_paths", r.envelopes->n_paths},
                              {"n_excluded", r.envelopes->n_excluded}};
  } else {
    checks["envelope"] = nullptr;
  }

  double censor_fraction =
      r.n_paths == 0 ? 0.0
                     : static_cast<double>(r.n_censored) /
                           static_cast<double>(r.n_paths);

  return json{
      {"schema", "martlab report v1"},
      {"model", model},
      {"run",
       {{"n_paths", r.n_paths},
        {"master_seed", r.master_seed},
        {"step", r.step}}},
      {"samples",
       {{"total", r.n_paths},
        {"censored", r.n_censored},
        {"censor_fraction", censor_fraction},
        {"censor_warning", r.censor_warning}}},
      {"mean_terminal", to_json(r.mean_terminal)},
      {"curves",
       {{"qv_pred", to_json(r.qv_pred_curve)},
        {"qv_opt", to_json(r.qv_opt_curve)},
        {"sup_neg", to_json(r.sup_neg_curve)}}},
      {"limits",
       {{"qv_pred_plateau", to_json(r.qv_pred_plateau)},
        {"qv_opt_plateau", to_json(r.qv_opt_plateau)},
        {"sup_neg_extrapolated", to_json(r.sup_neg_limit)}}},
      {"laplace", laplace},
      {"tauberian", tauberian},
      {"checks", checks},
      {"verdict", to_string(r.verdict)}};
}

// FNV-1a, enough to witness byte-identical payloads across runs.
std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << body;
  out.flush();
  if (!out.good()) {
    throw IoError("cannot write '" + path.string() + "'");
  }
}

std::string laplace_csv(const ExperimentReport& r) {
  std::string body = "# martlab laplace curve, schema v1\n";
  body += "lambda,value,std_error,n\n";
  char buf[160];
  for (std::size_t i = 0; i < r.laplace.lambdas.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%zu\n",
                  r.laplace.lambdas[i], r.laplace.values[i],
                  r.laplace.std_errors[i], r.laplace.n_samples);
    body += buf;
  }
  // The extrapolated limit is the curve's value at lambda = 0.
  std::snprintf(buf, sizeof(buf), "0,%.17g,%.17g,%zu\n",
                r.laplace_limit.value, r.laplace_limit.std_error,
                r.laplace.n_samples);
  body += buf;
  return body;
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
  json j = payload_json(report);
  // Worker count and timing describe the run, not the results; both stay
  // out of the determinism digest.
  j["run"]["threads"] = report.threads;
  j["timing"] = json{{"wall_seconds", report.wall_seconds},
                     {"paths_per_second", report.paths_per_second}};
  return j.dump(2) + "\n";
}

std::string report_payload_digest(const ExperimentReport& report) {
  return fnv1a_hex(payload_json(report).dump());
}

void write_artifacts(const ExperimentReport& report,
                     const std::string& output_dir) {
  std::filesystem::path dir(output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output dir '" + output_dir +
                  "': " + ec.message());
  }

  auto curve_csv = [](const TailCurve& c) {
    std::ostringstream os;
    write_tail_curve_csv(os, c);
    return os.str();
  };
  write_file(dir / "tails_qvpred.csv", curve_csv(report.qv_pred_curve));
  write_file(dir / "tails_qvopt.csv", curve_csv(report.qv_opt_curve));
  write_file(dir / "tails_supneg.csv", curve_csv(report.sup_neg_curve));
  write_file(dir / "laplace.csv", laplace_csv(report));
  write_file(dir / "report.json", report_to_json(report));
}

}  // namespace martlab
