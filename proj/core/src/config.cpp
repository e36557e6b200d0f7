#include "geocloud/config.hpp"

#include <fstream>
#include <initializer_list>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <sstream>

#include "geocloud/error.hpp"

namespace geocloud {

using nlohmann::json;

namespace {

// Read-only view of one JSON object that rejects keys it was not told about.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where() + " must be an object");
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    const std::set<std::string_view> allowed(keys);
    for (const auto& item : node_.items()) {
      if (!allowed.contains(item.key())) throw ConfigError("unknown key '" + key_path(item.key()) + "'");
    }
  }

  bool has(std::string_view key) const {
    auto it = node_.find(std::string(key));
    return it != node_.end() && !it->is_null();
  }

  const json& raw(std::string_view key) const { return node_.at(std::string(key)); }
  std::string key_path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  template <typename T>
  std::optional<T> get(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    const json& v = raw(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("'" + key_path(key) + "' must be a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("'" + key_path(key) + "' must be a string");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError("'" + key_path(key) + "' must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
          throw ConfigError("'" + key_path(key) + "' must be non-negative");
        }
      }
    } else {
      if (!v.is_number()) throw ConfigError("'" + key_path(key) + "' must be a number");
    }
    return v.get<T>();
  }

  template <typename T>
  T require(std::string_view key) const {
    auto v = get<T>(key);
    if (!v) throw ConfigError("missing required key '" + key_path(key) + "'");
    return *v;
  }

  Section child(std::string_view key) const { return {raw(key), key_path(key)}; }

 private:
  std::string where() const { return path_.empty() ? "config" : "'" + path_ + "'"; }

  const json& node_;
  std::string path_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path;
}

Location parse_location(const Section& s, const std::filesystem::path& base) {
  s.allow({"id", "timezone_offset_h", "mean_price", "mean_temp", "trace_file"});
  Location loc;
  loc.id = s.require<std::string>("id");
  loc.timezone_offset_h = s.get<int>("timezone_offset_h").value_or(0);
  loc.mean_price = s.require<double>("mean_price");
  loc.mean_temp = s.get<double>("mean_temp").value_or(15.0);
  if (!(loc.mean_price > 0.0)) throw ConfigError("'" + s.key_path("mean_price") + "' must be positive");
  if (auto file = s.get<std::string>("trace_file")) {
    loc.trace_file = resolve(base, *file);
    if (!std::filesystem::exists(*loc.trace_file)) {
      throw ConfigError("'" + s.key_path("trace_file") + "': trace file not found: " +
                        loc.trace_file->string());
    }
  }
  return loc;
}

PowerModel parse_power_model(const Section& s) {
  s.allow({"architecture", "f_min_ghz", "f_max_ghz", "f_step_ghz", "max_cores", "coefficients",
           "gamma", "synthetic_max_power_w", "synthetic"});
  const Architecture arch = parse_architecture(s.require<std::string>("architecture"));
  const FrequencyLadder defaults = arch == Architecture::arm ? FrequencyLadder::arm() : FrequencyLadder::intel();
  try {
    const FrequencyLadder ladder(s.get<double>("f_min_ghz").value_or(defaults.f_min()),
                                 s.get<double>("f_max_ghz").value_or(defaults.f_max()),
                                 s.get<double>("f_step_ghz").value_or(defaults.f_step()));
    const int max_cores = s.get<int>("max_cores").value_or(4);

    PowerCoefficients coeffs;
    bool synthetic = false;
    if (s.has("coefficients")) {
      if (s.has("synthetic_max_power_w")) {
        throw ConfigError("'" + s.key_path("synthetic_max_power_w") +
                          "' only applies when coefficients are omitted");
      }
      const Section c = s.child("coefficients");
      c.allow({"p00", "p10", "p01", "p20", "p11", "p30", "p21"});
      coeffs = {c.require<double>("p00"), c.require<double>("p10"), c.require<double>("p01"),
                c.require<double>("p20"), c.require<double>("p11"), c.require<double>("p30"),
                c.require<double>("p21")};
    } else if (arch == Architecture::arm) {
      if (s.has("synthetic_max_power_w")) {
        throw ConfigError("'" + s.key_path("synthetic_max_power_w") + "' only applies to intel");
      }
      coeffs = PowerCoefficients::arm();
    } else {
      coeffs = synthetic_intel_coefficients(s.get<double>("synthetic_max_power_w").value_or(95.0));
      synthetic = true;
    }

    GammaCoefficients gamma;
    if (s.has("gamma")) {
      const Section g = s.child("gamma");
      g.allow({"g0", "g1", "g2", "p_max"});
      gamma = GammaCoefficients::normalized(g.require<double>("g0"), g.require<double>("g1"),
                                            g.require<double>("g2"));
      if (auto p_max = g.get<double>("p_max")) gamma.p_max = *p_max;
    }
    synthetic = s.get<bool>("synthetic").value_or(synthetic);
    return PowerModel(arch, ladder, coeffs, gamma, max_cores, synthetic);
  } catch (const InvariantViolation& e) {
    throw ConfigError("'" + s.key_path("") + "': " + e.what());
  }
}

void parse_pricing(const Section& s, Scenario& sc, std::optional<double>& arch_scale) {
  s.allow({"scheme", "mode", "c_base", "c_cpu", "c_ram", "ramsize_base", "arch_scale"});
  const auto mode = parse_pricing_mode(s.get<std::string>("mode").value_or("perceived_performance"));
  PricingScheme p = PricingScheme::preset(s.get<std::string>("scheme").value_or("cloudsigma"), mode);
  if (auto v = s.get<double>("c_base")) p.c_base = *v;
  if (auto v = s.get<double>("c_cpu")) p.c_cpu = *v;
  if (auto v = s.get<double>("c_ram")) p.c_ram = *v;
  if (auto v = s.get<double>("ramsize_base")) p.ramsize_base = *v;
  arch_scale = s.get<double>("arch_scale");
  sc.pricing = p;
}

void parse_traces(const Section& s, Scenario& sc) {
  s.allow({"mode", "price_amplitude", "price_trough_hour", "price_noise", "price_floor",
           "temp_amplitude", "temp_peak_hour", "temp_noise"});
  if (auto m = s.get<std::string>("mode")) sc.trace_mode = parse_trace_mode(*m);
  auto& p = sc.synth;
  p.price_amplitude = s.get<double>("price_amplitude").value_or(p.price_amplitude);
  p.price_trough_hour = s.get<double>("price_trough_hour").value_or(p.price_trough_hour);
  p.price_noise = s.get<double>("price_noise").value_or(p.price_noise);
  p.price_floor = s.get<double>("price_floor").value_or(p.price_floor);
  p.temp_amplitude = s.get<double>("temp_amplitude").value_or(p.temp_amplitude);
  p.temp_peak_hour = s.get<double>("temp_peak_hour").value_or(p.temp_peak_hour);
  p.temp_noise = s.get<double>("temp_noise").value_or(p.temp_noise);
  if (p.price_amplitude < 0.0 || p.price_noise < 0.0 || p.temp_noise < 0.0 || p.price_floor <= 0.0) {
    throw ConfigError("'" + s.key_path("") + "' amplitudes, noise and floor must be non-negative");
  }
}

void parse_workload(const Section& s, Scenario& sc, const std::filesystem::path& base) {
  s.allow({"n_vms", "beta_rate", "fixed_beta", "beta_csv"});
  sc.n_vms = s.get<std::size_t>("n_vms").value_or(sc.n_vms);
  if (s.has("fixed_beta") && s.has("beta_csv")) {
    throw ConfigError("'" + s.key_path("fixed_beta") + "' and '" + s.key_path("beta_csv") +
                      "' are mutually exclusive");
  }
  if (auto b = s.get<double>("fixed_beta")) {
    if (!(*b >= 0.0 && *b <= 1.0)) throw ConfigError("'" + s.key_path("fixed_beta") + "' outside [0, 1]");
    sc.betas = FixedBeta{*b};
  } else if (auto csv = s.get<std::string>("beta_csv")) {
    const auto path = resolve(base, *csv);
    if (!std::filesystem::exists(path)) {
      throw ConfigError("'" + s.key_path("beta_csv") + "': file not found: " + path.string());
    }
    try {
      sc.betas = EmpiricalBeta{load_planetlab_betas(path), path};
    } catch (const ParseError& e) {
      throw ConfigError("'" + s.key_path("beta_csv") + "': " + e.what());
    }
  } else {
    const double rate = s.get<double>("beta_rate").value_or(BetaDistribution{}.rate);
    if (!(rate > 0.0)) throw ConfigError("'" + s.key_path("beta_rate") + "' must be positive");
    sc.betas = BetaDistribution{rate};
  }
}

void parse_scenario(const Section& s, Scenario& sc) {
  s.allow({"controller", "horizon_steps", "step_h", "seed", "underutil_threshold", "prune"});
  if (auto c = s.get<std::string>("controller")) sc.controller = parse_controller(*c);
  sc.horizon_steps = s.get<int>("horizon_steps").value_or(sc.horizon_steps);
  sc.step_h = s.get<double>("step_h").value_or(sc.step_h);
  sc.seed = s.get<std::uint64_t>("seed").value_or(sc.seed);
  sc.options.underutil_threshold =
      s.get<double>("underutil_threshold").value_or(sc.options.underutil_threshold);
  sc.options.prune = s.get<bool>("prune").value_or(sc.options.prune);
}

}  // namespace

Config default_config() { return Config{}; }

Config parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  Config cfg = default_config();
  Scenario& sc = cfg.scenario;
  const Section top(root, "");
  top.allow({"schema", "output_dir", "locations", "power_models", "pricing", "fleet", "workload",
             "traces", "scenario"});
  if (top.require<std::string>("schema") != kConfigSchema) {
    throw ConfigError("'schema' must be \"" + std::string(kConfigSchema) + "\"");
  }
  if (auto out = top.get<std::string>("output_dir")) cfg.output_dir = *out;

  if (top.has("locations")) {
    const json& list = top.raw("locations");
    if (!list.is_array() || list.empty()) throw ConfigError("'locations' must be a non-empty array");
    sc.locations.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      sc.locations.push_back(parse_location(Section(list[i], "locations[" + std::to_string(i) + "]"), base_dir));
    }
  }

  if (top.has("power_models")) {
    const json& list = top.raw("power_models");
    if (!list.is_array()) throw ConfigError("'power_models' must be an array");
    std::vector<PowerModel> models;
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto model = parse_power_model(Section(list[i], "power_models[" + std::to_string(i) + "]"));
      for (const auto& m : models) {
        if (m.architecture() == model.architecture()) {
          throw ConfigError("'power_models[" + std::to_string(i) + "]' duplicates architecture '" +
                            std::string(to_string(model.architecture())) + "'");
        }
      }
      models.push_back(std::move(model));
    }
    sc.power_models = std::move(models);
  }

  if (top.has("fleet")) {
    const Section f = top.child("fleet");
    f.allow({"n_pms", "architecture"});
    sc.n_pms = f.get<std::size_t>("n_pms").value_or(sc.n_pms);
    if (auto a = f.get<std::string>("architecture")) sc.architecture = parse_architecture(*a);
  }
  // The stock profile set only carries ARM; supply the synthetic Intel one on demand.
  if (!top.has("power_models") && sc.architecture == Architecture::intel) {
    sc.power_models.push_back(PowerModel::intel());
  }

  std::optional<double> arch_scale;
  if (top.has("pricing")) parse_pricing(top.child("pricing"), sc, arch_scale);
  sc.pricing.arch_scale = arch_scale.value_or(arch_price_scale(sc.architecture));

  if (top.has("workload")) parse_workload(top.child("workload"), sc, base_dir);
  if (top.has("traces")) parse_traces(top.child("traces"), sc);
  if (top.has("scenario")) parse_scenario(top.child("scenario"), sc);

  sc.validate();
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::string dump_config(const Config& config) {
  const Scenario& sc = config.scenario;
  json root;
  root["schema"] = kConfigSchema;
  root["output_dir"] = config.output_dir.string();

  root["locations"] = json::array();
  for (const auto& loc : sc.locations) {
    json l{{"id", loc.id},
           {"timezone_offset_h", loc.timezone_offset_h},
           {"mean_price", loc.mean_price},
           {"mean_temp", loc.mean_temp}};
    if (loc.trace_file) l["trace_file"] = loc.trace_file->string();
    root["locations"].push_back(l);
  }

  root["power_models"] = json::array();
  for (const auto& m : sc.power_models) {
    const auto& k = m.coefficients();
    const auto& g = m.gamma_coefficients();
    root["power_models"].push_back(
        {{"architecture", to_string(m.architecture())},
         {"f_min_ghz", m.ladder().f_min()},
         {"f_max_ghz", m.ladder().f_max()},
         {"f_step_ghz", m.ladder().f_step()},
         {"max_cores", m.core_count_max()},
         {"coefficients",
          {{"p00", k.p00}, {"p10", k.p10}, {"p01", k.p01}, {"p20", k.p20},
           {"p11", k.p11}, {"p30", k.p30}, {"p21", k.p21}}},
         {"gamma", {{"g0", g.g0}, {"g1", g.g1}, {"g2", g.g2}, {"p_max", g.p_max}}},
         {"synthetic", m.synthetic()}});
  }

  root["pricing"] = {{"scheme", sc.pricing.name},      {"mode", to_string(sc.pricing.mode)},
                     {"c_base", sc.pricing.c_base},    {"c_cpu", sc.pricing.c_cpu},
                     {"c_ram", sc.pricing.c_ram},      {"ramsize_base", sc.pricing.ramsize_base},
                     {"arch_scale", sc.pricing.arch_scale}};
  root["fleet"] = {{"n_pms", sc.n_pms}, {"architecture", to_string(sc.architecture)}};

  json workload{{"n_vms", sc.n_vms}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BetaDistribution>) {
          workload["beta_rate"] = m.rate;
        } else if constexpr (std::is_same_v<T, FixedBeta>) {
          workload["fixed_beta"] = m.beta;
        } else {
          workload["beta_csv"] = m.source.string();
        }
      },
      sc.betas);
  root["workload"] = workload;

  root["traces"] = {{"mode", to_string(sc.trace_mode)},
                    {"price_amplitude", sc.synth.price_amplitude},
                    {"price_trough_hour", sc.synth.price_trough_hour},
                    {"price_noise", sc.synth.price_noise},
                    {"price_floor", sc.synth.price_floor},
                    {"temp_amplitude", sc.synth.temp_amplitude},
                    {"temp_peak_hour", sc.synth.temp_peak_hour},
                    {"temp_noise", sc.synth.temp_noise}};
  root["scenario"] = {{"controller", to_string(sc.controller)},
                      {"horizon_steps", sc.horizon_steps},
                      {"step_h", sc.step_h},
                      {"seed", sc.seed},
                      {"underutil_threshold", sc.options.underutil_threshold},
                      {"prune", sc.options.prune}};
  return root.dump(2) + "\n";
}

}  // namespace geocloud
