#include "fracflow/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fracflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

using Sections = std::map<std::string, std::map<std::string, std::string>>;

Sections parse_sections(const std::string& text) {
  Sections out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out[section][key] = value;
  }
  return out;
}

double parse_double(const std::string& section, const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config field [" + section + "] " + key + ": not a number: " + v);
  }
}

int parse_int(const std::string& section, const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config field [" + section + "] " + key + ": not an integer: " + v);
  }
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw ConfigError("config field [" + section + "] " + key + ": not a boolean: " + v);
}

std::vector<double> parse_list(const std::string& section, const std::string& key,
                               const std::string& v) {
  std::vector<double> out;
  std::istringstream in(v);
  std::string tok;
  while (in >> tok) out.push_back(parse_double(section, key, tok));
  return out;
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text) {
  const Sections sec = parse_sections(text);
  ScenarioConfig cfg;

  auto get = [&](const std::string& s, const std::string& k) -> const std::string* {
    auto its = sec.find(s);
    if (its == sec.end()) return nullptr;
    auto itk = its->second.find(k);
    if (itk == its->second.end()) return nullptr;
    return &itk->second;
  };

  if (auto v = get("scenario", "name")) cfg.name = *v;
  if (auto v = get("scenario", "alpha")) {
    const double a = parse_double("scenario", "alpha", *v);
    if (!(a > 0.0) || !(a <= 1.0))
      throw ConfigError("config field [scenario] alpha: must lie in (0, 1], got " + *v);
    cfg.flow.alpha = FractionalOrder(a);
  }

  if (auto v = get("chart", "n")) cfg.n = parse_int("chart", "n", *v);
  if (auto v = get("chart", "m")) cfg.m = parse_int("chart", "m", *v);
  if (cfg.n < 1 || cfg.m < 1) throw ConfigError("config field [chart] n/m: need n >= 1, m >= 1");
  for (int d = 0; d < cfg.n + cfg.m; ++d) {
    const std::string key = "axis" + std::to_string(d);
    auto v = get("chart", key);
    if (!v) throw ConfigError("config field [chart] " + key + ": missing axis spec");
    const std::vector<double> parts = parse_list("chart", key, *v);
    if (parts.size() != 3)
      throw ConfigError("config field [chart] " + key + ": expected 'lower upper count'");
    const int count = static_cast<int>(parts[2]);
    if (count < 3 || parts[2] != count)
      throw ConfigError("config field [chart] " + key + ": count must be an integer >= 3");
    if (!(parts[1] > parts[0]))
      throw ConfigError("config field [chart] " + key + ": need upper > lower");
    cfg.axes.emplace_back(parts[0], parts[1], count);
  }

  if (auto v = get("metric", "preset")) cfg.metric_preset = *v;
  if (cfg.metric_preset != "flat" && cfg.metric_preset != "sphere-h" &&
      cfg.metric_preset != "custom")
    throw ConfigError("config field [metric] preset: unknown preset " + cfg.metric_preset);
  if (auto v = get("metric", "radius")) cfg.sphere_radius = parse_double("metric", "radius", *v);
  if (auto v = get("metric", "h")) cfg.custom_h = parse_list("metric", "h", *v);
  if (auto v = get("metric", "v")) cfg.custom_v = parse_list("metric", "v", *v);

  if (auto v = get("nconnection", "preset")) cfg.n_preset = *v;
  if (cfg.n_preset != "zero" && cfg.n_preset != "constant" && cfg.n_preset != "polynomial")
    throw ConfigError("config field [nconnection] preset: unknown preset " + cfg.n_preset);
  if (auto v = get("nconnection", "constant"))
    cfg.n_constant = parse_list("nconnection", "constant", *v);
  if (auto v = get("nconnection", "linear"))
    cfg.n_linear = parse_list("nconnection", "linear", *v);

  if (auto v = get("flow", "mode")) {
    if (*v == "canonical")
      cfg.flow.mode = ConnectionMode::canonical;
    else if (*v == "levi-civita")
      cfg.flow.mode = ConnectionMode::levi_civita;
    else
      throw ConfigError("config field [flow] mode: unknown mode " + *v);
  }
  if (auto v = get("flow", "normalization")) {
    if (*v == "none")
      cfg.flow.normalization = LambdaMode::none;
    else if (*v == "paper-fixed")
      cfg.flow.normalization = LambdaMode::paper_fixed;
    else if (*v == "dimension")
      cfg.flow.normalization = LambdaMode::dimension;
    else
      throw ConfigError("config field [flow] normalization: unknown mode " + *v);
  }
  if (auto v = get("flow", "step")) {
    cfg.flow.step = parse_double("flow", "step", *v);
    if (!(cfg.flow.step > 0.0))
      throw ConfigError("config field [flow] step: must be positive");
  }
  if (auto v = get("flow", "steps")) {
    cfg.flow.steps = parse_int("flow", "steps", *v);
    if (cfg.flow.steps < 1) throw ConfigError("config field [flow] steps: must be >= 1");
  }
  if (auto v = get("flow", "coupled")) cfg.flow.coupled_potential = parse_bool("flow", "coupled", *v);
  if (auto v = get("flow", "w-mode")) cfg.flow.w_mode = parse_bool("flow", "w-mode", *v);
  if (auto v = get("flow", "w-norm-squared"))
    cfg.flow.w_norm_squared = parse_bool("flow", "w-norm-squared", *v);
  if (auto v = get("flow", "tau")) {
    cfg.tau0 = parse_double("flow", "tau", *v);
    if (!(cfg.tau0 > 0.0)) throw ConfigError("config field [flow] tau: must be positive");
  }

  if (auto v = get("output", "path")) cfg.output_path = *v;
  if (auto v = get("output", "format")) {
    if (*v != "csv" && *v != "json-lines")
      throw ConfigError("config field [output] format: unknown format " + *v);
    cfg.format = *v;
  }
  return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not readable: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

FlowState build_initial_state(const ScenarioConfig& cfg, bool for_flow) {
  if (for_flow) {
    for (std::size_t d = 0; d < cfg.axes.size(); ++d)
      if (cfg.axes[d].count < 8)
        throw ConfigError("config field [chart] axis" + std::to_string(d) +
                          ": flow runs need count >= 8");
  }
  GridChart chart(cfg.n, cfg.m, cfg.axes);
  FlowState state(chart);
  state.tau = cfg.tau0;

  const int n = chart.n, m = chart.m;
  if (cfg.metric_preset == "sphere-h") {
    if (n != 2)
      throw ConfigError("config field [metric] preset: sphere-h requires n = 2");
    const double r2 = cfg.sphere_radius * cfg.sphere_radius;
    for (std::size_t p = 0; p < chart.node_count(); ++p) {
      const auto u = chart.coords(chart.unflatten(p));
      const double st = std::sin(u[0]);
      if (!(st * st > 1e-12))
        throw ConfigError("config field [chart] axis0: sphere-h polar range touches the poles");
      state.g.hat(p, 0, 0) = r2;
      state.g.hat(p, 1, 1) = r2 * st * st;
    }
  } else if (cfg.metric_preset == "custom") {
    if (static_cast<int>(cfg.custom_h.size()) != n * n)
      throw ConfigError("config field [metric] h: expected " + std::to_string(n * n) +
                        " entries");
    if (static_cast<int>(cfg.custom_v.size()) != m * m)
      throw ConfigError("config field [metric] v: expected " + std::to_string(m * m) +
                        " entries");
    for (std::size_t p = 0; p < chart.node_count(); ++p) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) state.g.hat(p, i, j) = cfg.custom_h[i * n + j];
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) state.g.vat(p, a, b) = cfg.custom_v[a * m + b];
    }
  }
  // flat: already identity blocks.

  if (cfg.n_preset == "constant" || cfg.n_preset == "polynomial") {
    if (static_cast<int>(cfg.n_constant.size()) != n * m)
      throw ConfigError("config field [nconnection] constant: expected " +
                        std::to_string(n * m) + " entries");
    const int d = chart.dim();
    if (cfg.n_preset == "polynomial" &&
        static_cast<int>(cfg.n_linear.size()) != n * m * d)
      throw ConfigError("config field [nconnection] linear: expected " +
                        std::to_string(n * m * d) + " entries");
    for (std::size_t p = 0; p < chart.node_count(); ++p) {
      const auto u = chart.coords(chart.unflatten(p));
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a) {
          double val = cfg.n_constant[i * m + a];
          if (cfg.n_preset == "polynomial")
            for (int k = 0; k < d; ++k) val += cfg.n_linear[(i * m + a) * d + k] * u[k];
          state.N.at(p, i, a) = val;
        }
    }
  }
  return state;
}

}  // namespace fracflow
