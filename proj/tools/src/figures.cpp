#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "sitesel/errors.hpp"
#include "sitesel_cli/run.hpp"

#ifndef SITESEL_VERSION
#define SITESEL_VERSION "0.0.0"
#endif

namespace sitesel::cli {

namespace {

constexpr double kOmegaM0Hz = 2.04e3;
constexpr double kStarkHz = 32.7e3;
// Offset of the selection pulses for the spectroscopy runs; positive means
// the same sign as the Stark shift.
constexpr double kSpectroscopyOffsetHz = 2.7e3;

std::vector<PulseConfig> pulses(std::size_t n, double rabi_hz, double detuning_hz) {
  return std::vector<PulseConfig>(n, PulseConfig{rabi_hz, detuning_hz, kStarkHz});
}

RunConfig base(Scenario s) {
  RunConfig c;
  c.scenario = s;
  c.seed = 20170101;
  return c;
}

RunConfig tradeoff(double detuning_fraction, std::vector<CurveConfig> curves) {
  RunConfig c = base(Scenario::tradeoff);
  c.tradeoff.detuning_fraction = detuning_fraction;
  c.tradeoff.curves = std::move(curves);
  return c;
}

RunConfig spectrum(double probe_rabi_hz, double stark_hz, std::size_t selections) {
  RunConfig c = base(Scenario::spectrum);
  c.spectrum.probe_rabi_hz = probe_rabi_hz;
  c.spectrum.stark_hz = stark_hz;
  c.spectrum.selected = selections > 0;
  c.selection.pulses = pulses(std::max<std::size_t>(selections, 1), kOmegaM0Hz, kSpectroscopyOffsetHz);
  return c;
}

RunConfig optomech(Scenario s) {
  RunConfig c = base(s);
  c.selection.pulses = pulses(2, 0.08 * kStarkHz, 0.0);
  return c;
}

CsvTable window_table() {
  const std::vector<double> ratios = {0.02, 0.05, 0.1, 0.2, 0.5};
  CsvTable t({"ratio", "eta", "flip_probability"});
  t.add_meta("eta_c", 0.0);
  constexpr std::size_t n = 401;
  for (double r : ratios)
    for (std::size_t i = 0; i < n; ++i) {
      const double eta = static_cast<double>(i) / static_cast<double>(n - 1);
      // Stark fraction s = 1 - eta; the eta_c = 0 window sits at eta = 1.
      t.row() << r << eta << transfer_probability(0.0, 1.0 - eta, r, 1.0);
    }
  return t;
}

void append(RunResult& into, const std::string& prefix, RunResult from) {
  for (auto& f : from.files) into.files.push_back({prefix + f.name, std::move(f.content)});
  for (auto& n : from.notes) into.notes.push_back(prefix + n);
}

const std::string& file_named(const RunResult& r, const std::string& name) {
  for (const auto& f : r.files)
    if (f.name == name) return f.content;
  throw std::logic_error("missing output " + name);
}

}  // namespace

const char* software_version() { return SITESEL_VERSION; }

const std::vector<std::string>& figure_tags() {
  static const std::vector<std::string> tags = {"fig2a", "fig2b", "fig2c", "fig2d",
                                                "fig3a", "fig3b", "fig3c", "fig3d",
                                                "fig4b", "fig4c", "fig4d-inset"};
  return tags;
}

std::vector<NamedConfig> figure_configs(const std::string& tag) {
  if (tag == "fig2a" || tag == "fig2b") return {{"tradeoff", tradeoff(0.0, TradeoffConfig{}.curves)}};
  if (tag == "fig2c") return {};
  if (tag == "fig2d")
    return {{"tradeoff", tradeoff(0.5, {{"1 pulse", {1.0}},
                                        {"2 pulses", {1.0, 1.0}},
                                        {"3 pulses", {1.0, 1.0, 1.0}}})}};
  if (tag == "fig3a")
    return {{"stark_on", spectrum(kOmegaM0Hz, kStarkHz, 0)},
            {"stark_off", spectrum(kOmegaM0Hz, 0.0, 0)}};
  if (tag == "fig3b") return {{"stark_on", spectrum(kOmegaM0Hz, kStarkHz, 0)}};
  if (tag == "fig3c") {
    auto sel1 = spectrum(170.0, kStarkHz, 1);
    auto sel2 = spectrum(170.0, kStarkHz, 2);
    auto stats1 = sel1;
    auto stats2 = sel2;
    stats1.scenario = stats2.scenario = Scenario::selection;
    return {{"one_selection", sel1},
            {"two_selections", sel2},
            {"one_selection_stats", stats1},
            {"two_selections_stats", stats2}};
  }
  if (tag == "fig3d") {
    RunConfig c = base(Scenario::fluorescence);
    c.selection.pulses = pulses(1, kOmegaM0Hz, kSpectroscopyOffsetHz);
    return {{"fluorescence", c}};
  }
  if (tag == "fig4b") {
    auto baseline = optomech(Scenario::optomech_toggle);
    auto offset = baseline;
    for (auto& p : offset.selection.pulses) p.detuning_hz = 2.0e3;
    return {{"baseline", baseline}, {"offset_2khz", offset}};
  }
  if (tag == "fig4c") return {{"scan", optomech(Scenario::position_scan)}};
  if (tag == "fig4d-inset") {
    auto c = optomech(Scenario::radial);
    c.pipeline = Pipeline::particles;
    c.ensemble.atoms = 20000;
    c.ensemble.radial_sigma_m = 0.0;
    c.radial.duration_s = 10e-3;
    c.radial.samples = 4096;
    c.radial.measured_ratio = 0.32;
    return {{"radial", c}};
  }
  throw ConfigError("unknown figure tag '" + tag + "'");
}

RunResult reproduce_figure(const std::string& tag) {
  const auto configs = figure_configs(tag);
  RunResult out;
  if (tag == "fig2c") {
    out.files.push_back({"window.csv", window_table().str()});
    out.notes.push_back("flip probability of a pi-pulse at eta_c = 0 versus eta");
    return out;
  }
  for (const auto& nc : configs) {
    RunResult r = run_scenario(nc.config);
    if (nc.config.scenario == Scenario::tradeoff) {
      const auto& table = file_named(r, "tradeoff.csv");
      r.files.push_back({"fits.csv", fit_tradeoff_table(parse_csv(table), FitConfig{}).str()});
    }
    if (tag == "fig3c" && nc.config.scenario == Scenario::spectrum) {
      const auto [density, summary] = invert_spectrum_text(file_named(r, "spectrum.csv"),
                                                           nc.config.invert);
      r.files.push_back({"inverted_density.csv", density});
      r.files.push_back({"inversion_summary.csv", summary});
    }
    append(out, configs.size() > 1 ? nc.name + "_" : "", std::move(r));
  }
  return out;
}

std::filesystem::path write_run(const RunResult& result, const std::vector<NamedConfig>& configs,
                                const ManifestInfo& info, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
  auto write = [&](const std::string& name, const std::string& content) {
    const auto path = out_dir / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << content;
    f.close();
    if (!f) throw std::runtime_error("failed writing '" + path.string() + "'");
    outputs.push_back({{"file", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
  };

  nlohmann::ordered_json resolved = nlohmann::ordered_json::object();
  for (const auto& nc : configs) {
    const std::string yaml = to_yaml(nc.config);
    write(nc.name + ".resolved.yaml", yaml);
    resolved[nc.name] = yaml;
  }
  for (const auto& f : result.files) write(f.name, f.content);

  nlohmann::ordered_json m;
  m["software"] = {{"name", "sitesel"}, {"version", software_version()}};
  m["origin"] = info.origin;
  if (configs.size() == 1) {
    m["scenario"] = scenario_name(configs.front().config.scenario);
    m["seed"] = configs.front().config.seed;
  } else {
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const auto& nc : configs)
      runs.push_back({{"name", nc.name},
                      {"scenario", scenario_name(nc.config.scenario)},
                      {"seed", nc.config.seed}});
    m["runs"] = runs;
  }
  m["config_echo"] = info.config_text;
  m["resolved_config"] = resolved;
  m["units"] = "frequencies in Hz (cycles per second), lengths in m, times in s";
  m["notes"] = result.notes;
  m["duration_s"] = info.duration_s;
  m["outputs"] = outputs;

  const auto path = out_dir / "manifest.json";
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << m.dump(2) << "\n";
  return path;
}

}  // namespace sitesel::cli
