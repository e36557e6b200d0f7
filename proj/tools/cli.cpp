#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "geocloud/config.hpp"
#include "geocloud/error.hpp"
#include "geocloud/report_io.hpp"
#include "geocloud/simulator.hpp"
#include "geocloud/surface_fit.hpp"

namespace geocloud::cli {

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool no_prune = false;
};

Config load(const CommonOptions& opts) {
  Config cfg = opts.config_path.empty() ? default_config() : load_config(opts.config_path);
  if (opts.seed) cfg.scenario.seed = *opts.seed;
  if (opts.no_prune) cfg.scenario.options.prune = false;
  if (!opts.out_dir.empty()) {
    cfg.output_dir = opts.out_dir;
  } else if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    cfg.output_dir = env;
  }
  return cfg;
}

std::vector<ControllerKind> parse_controller_list(const std::string& list) {
  std::vector<ControllerKind> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_controller(item));
  }
  if (out.empty()) throw ConfigError("--controllers needs at least one controller");
  return out;
}

int cmd_simulate(const CommonOptions& opts, const std::string& controller, std::ostream& out) {
  Config cfg = load(opts);
  if (!controller.empty()) cfg.scenario.controller = parse_controller(controller);
  const RunResult result = run(cfg.scenario);
  write_run_outputs(cfg.output_dir, cfg.scenario, result);

  const auto& t = result.report.totals;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%s: IT energy %.3f kWh, total energy %.3f kWh, total cost $%.4f, revenue $%.4f, "
                "%lld migrations\n",
                result.report.controller.c_str(), t.it_energy_kwh, t.total_energy_kwh, t.total_cost,
                t.service_revenue, t.migrations);
  out << buf;
  if (result.report.synthetic_power_model) {
    out << "note: the power model profile is synthetic (no measured coefficients)\n";
  }
  out << "wrote " << (cfg.output_dir / "report.json").string() << '\n';
  return kExitOk;
}

int cmd_compare(const CommonOptions& opts, const std::string& controllers, std::ostream& out) {
  const Config cfg = load(opts);
  const auto kinds = parse_controller_list(controllers);
  const ComparisonReport report = compare(cfg.scenario, kinds);
  write_comparison_outputs(cfg.output_dir, cfg.scenario, report);
  out << comparison_table(report);
  out << "wrote " << (cfg.output_dir / "comparison.json").string() << '\n';
  return kExitOk;
}

int cmd_gen_traces(const CommonOptions& opts, const std::string& mode, int hours, std::ostream& out) {
  const Config cfg = load(opts);
  const TraceMode trace_mode = mode.empty() ? cfg.scenario.trace_mode : parse_trace_mode(mode);
  const int n = hours > 0 ? hours : cfg.scenario.horizon_steps;
  std::filesystem::create_directories(cfg.output_dir);
  for (const auto& loc : cfg.scenario.locations) {
    const auto trace = synth_trace(loc, n, trace_mode, cfg.scenario.seed, cfg.scenario.synth);
    const auto path = cfg.output_dir / (loc.id + ".csv");
    write_trace(path, trace);
    out << "wrote " << path.string() << '\n';
  }
  return kExitOk;
}

int cmd_fit(const std::string& input, std::ostream& out) {
  const auto samples = load_power_samples(input);
  const SurfaceFit fit = fit_power_surface(samples);
  const auto& k = fit.coefficients;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "p00 = %.10g\np10 = %.10g\np01 = %.10g\np20 = %.10g\np11 = %.10g\np30 = %.10g\n"
                "p21 = %.10g\nsamples: %zu\nmaximum deviation: %.2f%%\naverage deviation: %.2f%%\n",
                k.p00, k.p10, k.p01, k.p20, k.p11, k.p30, k.p21, fit.sample_count,
                100.0 * fit.max_relative_deviation, 100.0 * fit.mean_relative_deviation);
  out << buf;
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"geocloud: geo-distributed cloud energy and revenue simulator"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string controller;
  std::string controllers = "bfd,bcf,bcffs";
  std::string mode;
  int hours = 0;
  std::string input;

  auto add_common = [&](CLI::App* cmd, bool with_prune) {
    cmd->add_option("-c,--config", common.config_path, "JSON config file (default: built-in)");
    cmd->add_option("--seed", common.seed, "Override the scenario seed");
    cmd->add_option("-o,--out", common.out_dir, "Output directory (overrides $GEOCLOUD_OUT_DIR)");
    if (with_prune) cmd->add_flag("--no-prune", common.no_prune, "Disable frequency-stage pruning");
  };

  auto* simulate = app.add_subcommand("simulate", "Run one scenario and write report files");
  add_common(simulate, true);
  simulate->add_option("--controller", controller, "bfd | bcf | bcffs");

  auto* cmp = app.add_subcommand("compare", "Run several controllers on the same inputs");
  add_common(cmp, true);
  cmp->add_option("--controllers", controllers, "Comma-separated list")->capture_default_str();

  auto* gen = app.add_subcommand("gen-traces", "Write one synthetic trace CSV per location");
  add_common(gen, false);
  gen->add_option("--mode", mode, "fixed | rtep (default: config)");
  gen->add_option("--hours", hours, "Trace length (default: horizon)")->check(CLI::PositiveNumber);

  auto* fit = app.add_subcommand("fit", "Least-squares fit of the power surface");
  fit->add_option("-i,--input", input, "CSV with header q,c,power_w")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(common, controller, out);
    if (cmp->parsed()) return cmd_compare(common, controllers, out);
    if (gen->parsed()) return cmd_gen_traces(common, mode, hours, out);
    if (fit->parsed()) return cmd_fit(input, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const RankDeficient& e) {
    err << "fit error (rank deficient): " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitRuntimeError;
}

}  // namespace geocloud::cli
