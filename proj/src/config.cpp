#include "martlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace martlab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            const char* expected) {
  std::ostringstream os;
  os << "config key '" << key << "': cannot parse '" << value << "' as "
     << expected;
  throw ConfigError(os.str());
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(),
                                   out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    bad_value(key, value, "a real number");
  }
  return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(),
                                   out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    bad_value(key, value, "an unsigned integer");
  }
  return out;
}

std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> out;
  while (true) {
    std::size_t comma = value.find(',');
    out.push_back(trim(value.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<double> parse_double_list(std::string_view key,
                                      std::string_view value) {
  std::vector<double> out;
  for (std::string_view item : split_list(value)) {
    out.push_back(parse_double(key, item));
  }
  return out;
}

ModelSpec preset_for(ModelKind kind) {
  switch (kind) {
    case ModelKind::BrownianUpper:
      return ModelSpec::brownian_upper(1.0);
    case ModelKind::BrownianTwoSided:
      return ModelSpec::brownian_two_sided(1.0, 2.0);
    case ModelKind::CompensatedPoissonUpper:
      return ModelSpec::compensated_poisson_upper(1.0, 1.0);
    case ModelKind::JumpDiffusionTwoSided:
      return ModelSpec::jump_diffusion_two_sided(1.0, 2.0, 1.0, 1.0, 1.0);
    case ModelKind::RandomWalkUpper:
      return ModelSpec::random_walk_upper(1.0);
  }
  throw ConfigError("unhandled model kind");
}

const char* const kKnownChecks[] = {"mean_one", "sandwich", "bdg_ratio",
                                    "envelope"};

}  // namespace

void apply_key(ExperimentConfig& config, std::string_view raw_key,
               std::string_view raw_value) {
  std::string_view key = trim(raw_key);
  std::string_view value = trim(raw_value);
  if (key.empty()) throw ConfigError("empty config key");

  if (key == "model.kind") {
    try {
      config.model = preset_for(parse_model_kind(std::string(value)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "model.sigma") {
    config.model.sigma = parse_double(key, value);
  } else if (key == "model.jump_rate") {
    config.model.jump_rate = parse_double(key, value);
  } else if (key == "model.jump_bound") {
    config.model.jump_bound = parse_double(key, value);
  } else if (key == "model.barrier_up") {
    config.model.barrier_up = parse_double(key, value);
  } else if (key == "model.barrier_down") {
    if (value == "none") {
      config.model.barrier_down.reset();
    } else {
      config.model.barrier_down = parse_double(key, value);
    }
  } else if (key == "model.horizon_cap") {
    config.model.horizon_cap = parse_double(key, value);
  } else if (key == "model.epsilon") {
    config.model.epsilon = parse_double(key, value);
  } else if (key == "n_paths") {
    config.n_paths = parse_u64(key, value);
  } else if (key == "master_seed") {
    config.master_seed = parse_u64(key, value);
  } else if (key == "lambdas.small") {
    config.small_lambdas = parse_double_list(key, value);
  } else if (key == "lambdas.big") {
    config.big_lambdas = parse_double_list(key, value);
  } else if (key == "step") {
    config.step = parse_double(key, value);
  } else if (key == "checks") {
    config.checks_enabled.clear();
    if (value != "none") {
      for (std::string_view item : split_list(value)) {
        config.checks_enabled.emplace_back(item);
      }
    }
  } else if (key == "check_paths") {
    config.check_paths = parse_u64(key, value);
  } else if (key == "bdg.horizons") {
    config.bdg_horizons = parse_double_list(key, value);
  } else if (key == "output_dir") {
    config.output_dir = std::string(value);
  } else if (key == "threads") {
    std::uint64_t t = parse_u64(key, value);
    if (t == 0 || t > 4096) bad_value(key, value, "a worker count in [1, 4096]");
    config.threads = static_cast<unsigned>(t);
  } else if (key == "censor_warn_fraction") {
    config.censor_warn_fraction = parse_double(key, value);
  } else if (key == "verdict_sigma") {
    config.verdict_sigma = parse_double(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;

    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    apply_key(config, line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void ExperimentConfig::validate() const {
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (n_paths < 1000) {
    throw ConfigError("tail estimation needs n_paths >= 1000");
  }
  if (small_lambdas.empty()) {
    throw ConfigError("lambdas.small must not be empty");
  }
  for (double l : small_lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw ConfigError("lambdas.small entries must be positive finite");
    }
  }
  for (double l : big_lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw ConfigError("lambdas.big entries must be positive finite");
    }
  }
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw ConfigError("step must be positive finite");
  }
  if (check_paths < 2) {
    throw ConfigError("check_paths must be at least 2");
  }
  if (bdg_horizons.empty()) {
    throw ConfigError("bdg.horizons must not be empty");
  }
  for (double t : bdg_horizons) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw ConfigError("bdg.horizons entries must be positive finite");
    }
  }
  if (threads == 0) throw ConfigError("threads must be at least 1");
  if (!(censor_warn_fraction >= 0.0 && censor_warn_fraction <= 1.0)) {
    throw ConfigError("censor_warn_fraction must lie in [0, 1]");
  }
  if (!(verdict_sigma > 0.0)) {
    throw ConfigError("verdict_sigma must be positive");
  }
  for (const std::string& name : checks_enabled) {
    if (std::find(std::begin(kKnownChecks), std::end(kKnownChecks), name) ==
        std::end(kKnownChecks)) {
      throw ConfigError("unknown check '" + name + "'");
    }
  }
}

}  // namespace martlab
