#include "sitesel_cli/app.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sitesel/errors.hpp"
#include "sitesel_cli/run.hpp"

namespace sitesel::cli {

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int simulate(const std::string& scenario, const std::string& config_path,
             const std::optional<std::uint64_t>& seed, const std::string& out,
             bool validate_only, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario s = parse_scenario(scenario);
  const std::string text = read_text(config_path);
  RunConfig cfg = parse_config(text, std::filesystem::path(config_path).parent_path(), s);
  if (seed) cfg.seed = *seed;
  if (validate_only) {
    log << "config OK: scenario " << scenario_name(cfg.scenario) << ", seed " << cfg.seed << "\n";
    return exit_ok;
  }
  const RunResult result = run_scenario(cfg);
  const std::filesystem::path dir = out.empty() ? std::filesystem::path("out") / scenario : std::filesystem::path(out);
  ManifestInfo info;
  info.config_text = text;
  info.origin = "simulate " + scenario;
  info.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto manifest = write_run(result, {{"config", cfg}}, info, dir);
  log << "wrote " << result.files.size() << " files; manifest " << manifest.string() << "\n";
  return exit_ok;
}

int reproduce(const std::string& tag, const std::string& out, bool validate_only,
              std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto configs = figure_configs(tag);
  for (const auto& nc : configs) validate(nc.config);
  if (validate_only) {
    log << "figure " << tag << ": " << configs.size() << " canned config(s) OK\n";
    return exit_ok;
  }
  const RunResult result = reproduce_figure(tag);
  const std::filesystem::path dir = out.empty() ? std::filesystem::path("out") / tag : std::filesystem::path(out);
  ManifestInfo info;
  info.origin = "reproduce " + tag;
  info.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto manifest = write_run(result, configs, info, dir);
  log << "wrote " << result.files.size() << " files; manifest " << manifest.string() << "\n";
  return exit_ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& log, std::ostream& err) {
  CLI::App app{"Spectroscopic site selection of lattice-trapped atoms: simulation harness",
               "sitesel"};
  app.set_version_flag("--version", std::string("sitesel ") + software_version());
  app.require_subcommand(1);

  std::string scenario, config_path, out, tag;
  std::optional<std::uint64_t> seed;
  bool validate_only = false;

  std::string scenario_help = "one of:";
  for (const auto& n : scenario_names()) scenario_help += " " + n;
  auto* sim = app.add_subcommand("simulate", "run one scenario from a YAML config");
  sim->add_option("scenario", scenario, scenario_help)->required();
  sim->add_option("--config", config_path, "YAML config file")->required();
  sim->add_option("--seed", seed, "override the config seed");
  sim->add_option("--out", out, "output directory (default out/<scenario>)");
  sim->add_flag("--validate-only", validate_only, "parse and validate, write nothing");

  std::string tag_help = "one of:";
  for (const auto& t : figure_tags()) tag_help += " " + t;
  auto* rep = app.add_subcommand("reproduce", "emit the plot data for a figure");
  rep->add_option("figure-tag", tag, tag_help)->required();
  rep->add_option("--out", out, "output directory (default out/<figure-tag>)");
  rep->add_flag("--validate-only", validate_only, "validate the canned configs, write nothing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, log, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, log, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, log, err);
    return exit_config;
  }

  try {
    if (*sim) return simulate(scenario, config_path, seed, out, validate_only, log);
    return reproduce(tag, out, validate_only, log);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return exit_numeric;
  } catch (const Error& e) {
    err << "physics error: " << e.what() << "\n";
    return exit_physics;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_failure;
  }
}

}  // namespace sitesel::cli
