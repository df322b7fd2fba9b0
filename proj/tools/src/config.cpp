#include "sitesel_cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sitesel/constants.hpp"
#include "sitesel/errors.hpp"

namespace sitesel::cli {

namespace {

std::string with_line(const std::string& msg, int line) {
  if (line < 0) return msg;
  return "line " + std::to_string(line) + ": " + msg;
}

int line_of(const YAML::Node& n) {
  const auto m = n.Mark();
  return m.line >= 0 ? m.line + 1 : -1;
}

// A mapping node whose keys are checked off as they are read; anything left
// over at the end is an unknown key.
class Section {
 public:
  Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap())
      throw ConfigError("'" + path_ + "' must be a mapping", line_of(node_));
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }

  YAML::Node get(const std::string& key) {
    used_.insert(key);
    if (!node_ || !node_.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    return node_[key];
  }

  template <class T>
  void read(const std::string& key, T& out) {
    const YAML::Node n = get(key);
    if (!n) return;
    out = convert<T>(n, key);
  }

  template <class T>
  T convert(const YAML::Node& n, const std::string& key) const {
    try {
      if (!n.IsScalar()) throw YAML::Exception(n.Mark(), "expected a scalar");
      return n.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError("'" + qualified(key) + "' has an invalid value", line_of(n));
    }
  }

  void read_list(const std::string& key, std::vector<double>& out) {
    const YAML::Node n = get(key);
    if (!n) return;
    if (!n.IsSequence()) throw ConfigError("'" + qualified(key) + "' must be a list", line_of(n));
    out.clear();
    for (const auto& item : n) out.push_back(convert<double>(item, key));
  }

  template <class E>
  void read_enum(const std::string& key, E& out, const std::map<std::string, E>& names) {
    const YAML::Node n = get(key);
    if (!n) return;
    const auto s = convert<std::string>(n, key);
    const auto it = names.find(s);
    if (it == names.end()) {
      std::string allowed;
      for (const auto& [name, value] : names) allowed += (allowed.empty() ? "" : ", ") + name;
      throw ConfigError("'" + qualified(key) + "' must be one of: " + allowed, line_of(n));
    }
    out = it->second;
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!used_.count(key))
        throw ConfigError("unknown key '" + qualified(key) + "'", line_of(kv.first));
    }
  }

  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  int line() const { return node_ ? line_of(node_) : -1; }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

const std::map<std::string, Pipeline> kPipelines = {{"density", Pipeline::density},
                                                    {"particles", Pipeline::particles}};
const std::map<std::string, StarkModeSign> kStarkModes = {{"plus", StarkModeSign::plus},
                                                          {"minus", StarkModeSign::minus}};
const std::map<std::string, ModeSymmetry> kSymmetries = {
    {"probe_antinode", ModeSymmetry::probe_antinode},
    {"stark_antinode", ModeSymmetry::stark_antinode}};
const std::map<std::string, AxialProfile> kProfiles = {{"uniform", AxialProfile::uniform},
                                                       {"gaussian", AxialProfile::gaussian}};
const std::map<std::string, DisplacementMethod> kMethods = {
    {"newton", DisplacementMethod::newton}, {"linearized", DisplacementMethod::linearized}};
const std::map<std::string, PhaseSpace> kPhaseSpaces = {
    {"average", PhaseSpace::thermal_average}, {"sampled", PhaseSpace::sampled}};
const std::map<std::string, Composition> kCompositions = {
    {"rss", Composition::root_sum_square}, {"coherent", Composition::coherent}};

template <class E>
std::string enum_name(E v, const std::map<std::string, E>& names) {
  for (const auto& [name, value] : names)
    if (value == v) return name;
  return "?";
}

// Line numbers of the sections, so range errors found after parsing can
// still point somewhere useful.
struct Lines {
  std::map<std::string, int> at;
  int operator()(const std::string& key) const {
    const auto it = at.find(key);
    return it == at.end() ? -1 : it->second;
  }
};

void parse_geometry(Section s, GeometryConfig& g) {
  s.read("lattice_wavelength_m", g.lattice_wavelength_m);
  s.read("probe_wavelength_m", g.probe_wavelength_m);
  s.read("atomic_wavelength_m", g.atomic_wavelength_m);
  s.read("free_spectral_range_hz", g.free_spectral_range_hz);
  s.read("hyperfine_splitting_hz", g.hyperfine_splitting_hz);
  s.read("probe_detuning_hz", g.probe_detuning_hz);
  s.read("stark_detuning_hz", g.stark_detuning_hz);
  s.read("peak_coupling_hz", g.peak_coupling_hz);
  s.read("mode_waist_m", g.mode_waist_m);
  s.read_enum("stark_mode", g.stark_mode, kStarkModes);
  s.read_enum("symmetry", g.symmetry, kSymmetries);
  s.finish();
}

void parse_ensemble(Section s, EnsembleConfig& e) {
  s.read("atoms", e.atoms);
  s.read("extent_m", e.extent_m);
  s.read("z_offset_m", e.z_offset_m);
  s.read_enum("profile", e.profile, kProfiles);
  s.read("radial_sigma_m", e.radial_sigma_m);
  s.finish();
}

void parse_selection(Section s, SelectionConfig& sel) {
  const bool explicit_pulses = s.has("pulses");
  const bool shorthand = s.has("count") || s.has("rabi_hz") || s.has("detuning_hz") ||
                         s.has("stark_hz") || s.has("rabi_scale");
  if (explicit_pulses && shorthand)
    throw ConfigError("'selection.pulses' cannot be combined with count/rabi_hz/detuning_hz/"
                      "stark_hz/rabi_scale",
                      s.line());
  if (explicit_pulses) {
    const YAML::Node list = s.get("pulses");
    if (!list.IsSequence())
      throw ConfigError("'selection.pulses' must be a list", line_of(list));
    sel.pulses.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      Section p(list[i], "selection.pulses[" + std::to_string(i) + "]");
      PulseConfig pc;
      p.read("rabi_hz", pc.rabi_hz);
      p.read("detuning_hz", pc.detuning_hz);
      p.read("stark_hz", pc.stark_hz);
      p.finish();
      sel.pulses.push_back(pc);
    }
  } else if (shorthand) {
    PulseConfig base;
    std::size_t count = 1;
    std::vector<double> scale;
    s.read("rabi_hz", base.rabi_hz);
    s.read("detuning_hz", base.detuning_hz);
    s.read("stark_hz", base.stark_hz);
    s.read("count", count);
    s.read_list("rabi_scale", scale);
    if (s.has("count") && s.has("rabi_scale") && scale.size() != count)
      throw ConfigError("'selection.rabi_scale' length does not match 'selection.count'",
                        s.line());
    if (scale.empty()) scale.assign(count, 1.0);
    sel.pulses.clear();
    for (double f : scale) {
      PulseConfig pc = base;
      pc.rabi_hz = base.rabi_hz * f;
      sel.pulses.push_back(pc);
    }
  }
  s.read("repump_between", sel.repump_between);
  s.read("blow_away_survival", sel.blow_away_survival);
  s.read("repump_loss", sel.repump_loss);
  s.read("floor", sel.floor);
  s.finish();
}

void parse_tradeoff(Section s, TradeoffConfig& t) {
  s.read("ratio_min", t.ratio_min);
  s.read("ratio_max", t.ratio_max);
  s.read("ratio_points", t.ratio_points);
  s.read("detuning_fraction", t.detuning_fraction);
  s.read("stark_hz", t.stark_hz);
  const YAML::Node curves = s.get("curves");
  if (curves) {
    if (!curves.IsSequence()) throw ConfigError("'tradeoff.curves' must be a list", line_of(curves));
    t.curves.clear();
    for (std::size_t i = 0; i < curves.size(); ++i) {
      Section c(curves[i], "tradeoff.curves[" + std::to_string(i) + "]");
      CurveConfig cc;
      c.read("label", cc.label);
      c.read_list("rabi_scale", cc.rabi_scale);
      if (c.has("pulses")) {
        std::size_t n = 0;
        c.read("pulses", n);
        if (c.has("rabi_scale") && cc.rabi_scale.size() != n)
          throw ConfigError("rabi_scale length does not match pulses", line_of(curves[i]));
        if (cc.rabi_scale.empty()) cc.rabi_scale.assign(n, 1.0);
      }
      c.finish();
      if (cc.label.empty()) cc.label = std::to_string(cc.rabi_scale.size()) + " pulses";
      t.curves.push_back(cc);
    }
  }
  s.finish();
}

void parse_spectrum(Section s, SpectrumConfig& sp) {
  s.read("probe_rabi_hz", sp.probe_rabi_hz);
  s.read("stark_hz", sp.stark_hz);
  s.read("points", sp.points);
  s.read("lo", sp.lo);
  s.read("hi", sp.hi);
  s.read("detuning_offset_hz", sp.detuning_offset_hz);
  s.read("selected", sp.selected);
  s.finish();
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

void parse_invert(Section s, InvertConfig& inv, const std::filesystem::path& base) {
  std::string input;
  s.read("input", input);
  if (!input.empty()) inv.input = resolve(input, base);
  s.read("truncation_lo", inv.truncation_lo);
  s.read("truncation_hi", inv.truncation_hi);
  s.finish();
}

void parse_fluorescence(Section s, FluorescenceConfig& f) {
  s.read_list("atom_count_grid", f.atom_count_grid);
  s.read("counts_per_atom", f.counts_per_atom);
  s.read("relative_noise", f.relative_noise);
  s.read("fit_intercept", f.fit_intercept);
  s.finish();
}

void parse_optomech(Section s, OptomechConfig& o) {
  s.read("axial_frequency_hz", o.axial_frequency_hz);
  s.read("radial_frequency_hz", o.radial_frequency_hz);
  s.read("probe_depth_ratio", o.probe_depth_ratio);
  s.read("temperature_k", o.temperature_k);
  s.read("power_ratio", o.power_ratio);
  s.read("window_s", o.window_s);
  s.read("cycles", o.cycles);
  s.read("sample_interval_s", o.sample_interval_s);
  s.read("lowpass_hz", o.lowpass_hz);
  s.read_enum("method", o.method, kMethods);
  s.finish();
}

void parse_scan(Section s, ScanConfig& sc) {
  s.read_list("offsets_m", sc.offsets_m);
  s.read("offset_min_m", sc.offset_min_m);
  s.read("offset_max_m", sc.offset_max_m);
  s.read("points", sc.points);
  s.read("position_nodes", sc.position_nodes);
  s.finish();
}

void parse_radial(Section s, RadialConfig& r) {
  s.read("duration_s", r.duration_s);
  s.read("samples", r.samples);
  s.read("depth_ratio_before", r.depth_ratio_before);
  s.read("depth_ratio_after", r.depth_ratio_after);
  s.read("dephasing_time_s", r.dephasing_time_s);
  s.read_enum("phase_space", r.phase_space, kPhaseSpaces);
  s.read_enum("composition", r.composition, kCompositions);
  s.read("measured_ratio", r.measured_ratio);
  s.finish();
}

void parse_fit(Section s, FitConfig& f, const std::filesystem::path& base) {
  std::string input;
  s.read("input", input);
  if (!input.empty()) f.input = resolve(input, base);
  s.read("range_min", f.range_min);
  s.read("range_max", f.range_max);
  s.read("weighted", f.weighted);
  s.finish();
}

void validate_with_lines(const RunConfig& c, const Lines& lines);

}  // namespace

ConfigError::ConfigError(const std::string& msg, int line)
    : std::runtime_error(with_line(msg, line)), line_(line) {}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "selection", "tradeoff",      "spectrum", "invert", "fluorescence",
      "optomech-toggle", "position-scan", "radial", "fit"};
  return names;
}

const char* scenario_name(Scenario s) {
  return scenario_names()[static_cast<std::size_t>(s)].c_str();
}

Scenario parse_scenario(const std::string& name) {
  const auto& names = scenario_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ConfigError("unknown scenario '" + name + "'");
  return static_cast<Scenario>(it - names.begin());
}

CavityGeometry GeometryConfig::build() const {
  CavityGeometry g;
  g.lattice_wavelength = lattice_wavelength_m;
  g.probe_wavelength = probe_wavelength_m;
  g.atomic_wavelength = atomic_wavelength_m;
  g.free_spectral_range_hz = free_spectral_range_hz;
  g.hyperfine_splitting_hz = hyperfine_splitting_hz;
  g.probe_detuning = angular_from_hz(probe_detuning_hz);
  g.stark_detuning = angular_from_hz(stark_detuning_hz);
  g.peak_coupling = angular_from_hz(peak_coupling_hz);
  g.mode_waist = mode_waist_m;
  g.stark_sign = stark_mode;
  g.symmetry = symmetry;
  return g;
}

SampleOptions EnsembleConfig::build(std::uint64_t seed) const {
  SampleOptions o;
  o.atoms = atoms;
  o.extent = extent_m;
  o.z_offset = z_offset_m;
  o.profile = profile;
  o.radial_sigma = radial_sigma_m;
  o.seed = seed;
  return o;
}

SelectionSequence SelectionConfig::build() const {
  SelectionSequence seq;
  for (const auto& p : pulses)
    seq.pulses.push_back({angular_from_hz(p.rabi_hz), angular_from_hz(p.detuning_hz),
                          angular_from_hz(p.stark_hz)});
  seq.repump_between = repump_between;
  seq.blow_away_survival = blow_away_survival;
  seq.repump_loss = repump_loss;
  return seq;
}

TrapModel OptomechConfig::trap() const {
  TrapModel t;
  t.axial_frequency_hz = axial_frequency_hz;
  t.radial_frequency_hz = radial_frequency_hz;
  t.probe_depth_ratio = probe_depth_ratio;
  t.radial_temperature = temperature_k;
  return t;
}

ToggleOptions OptomechConfig::toggle() const {
  ToggleOptions o;
  o.power_ratio = power_ratio;
  o.window = window_s;
  o.cycles = cycles;
  o.sample_interval = sample_interval_s;
  o.lowpass_bandwidth_hz = lowpass_hz;
  o.method = method;
  return o;
}

std::vector<double> ScanConfig::offsets() const {
  if (!offsets_m.empty()) return offsets_m;
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = points == 1 ? offset_min_m
                         : offset_min_m + (offset_max_m - offset_min_m) * static_cast<double>(i) /
                                              static_cast<double>(points - 1);
  return out;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                       std::optional<Scenario> expected) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("YAML syntax error: " + e.msg, e.mark.line >= 0 ? e.mark.line + 1 : -1);
  }
  RunConfig c;
  if (expected) c.scenario = *expected;
  if (!root || root.IsNull()) {
    validate(c);
    return c;
  }
  Section top(root, "");
  Lines lines;
  auto section = [&](const std::string& key) {
    const YAML::Node n = top.get(key);
    if (n) lines.at[key] = line_of(n);
    return Section(n, key);
  };

  if (top.has("scenario")) {
    std::string name;
    top.read("scenario", name);
    const int line = line_of(root["scenario"]);
    Scenario named;
    try {
      named = parse_scenario(name);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), line);
    }
    if (expected && named != *expected)
      throw ConfigError("config is for scenario '" + name + "' but '" +
                            scenario_name(*expected) + "' was requested",
                        line);
    c.scenario = named;
  }
  top.read("seed", c.seed);
  top.read_enum("pipeline", c.pipeline, kPipelines);
  top.read("bootstrap_resamples", c.bootstrap_resamples);
  parse_geometry(section("geometry"), c.geometry);
  parse_ensemble(section("ensemble"), c.ensemble);
  parse_selection(section("selection"), c.selection);
  parse_tradeoff(section("tradeoff"), c.tradeoff);
  parse_spectrum(section("spectrum"), c.spectrum);
  parse_invert(section("invert"), c.invert, base_dir);
  parse_fluorescence(section("fluorescence"), c.fluorescence);
  parse_optomech(section("optomech"), c.optomech);
  parse_scan(section("scan"), c.scan);
  parse_radial(section("radial"), c.radial);
  parse_fit(section("fit"), c.fit, base_dir);
  top.finish();
  validate_with_lines(c, lines);
  return c;
}

RunConfig load_config(const std::filesystem::path& path, std::optional<Scenario> expected) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path(), expected);
}

void validate(const RunConfig& cfg) { validate_with_lines(cfg, Lines{}); }

namespace {

void validate_with_lines(const RunConfig& c, const Lines& lines) {
  auto require = [&](bool ok, const std::string& section, const std::string& msg) {
    if (!ok) throw ConfigError(section + ": " + msg, lines(section));
  };
  auto core = [&](const std::string& section, auto&& fn) {
    try {
      fn();
    } catch (const sitesel::Error& e) {
      throw ConfigError(section + ": " + e.what(), lines(section));
    }
  };

  core("geometry", [&] { c.geometry.build().validate(); });

  require(c.ensemble.atoms >= 1, "ensemble", "atoms must be at least 1");
  require(c.ensemble.extent_m > 0.0, "ensemble", "extent_m must be positive");
  require(c.ensemble.radial_sigma_m >= 0.0, "ensemble", "radial_sigma_m must be >= 0");
  require(std::abs(c.ensemble.z_offset_m) <= 0.5 * c.geometry.build().cavity_length(), "ensemble",
          "z_offset_m lies outside the cavity");

  if (!c.selection.pulses.empty()) core("selection", [&] { c.selection.build().validate(); });
  for (const auto& p : c.selection.pulses) {
    require(p.rabi_hz > 0.0, "selection", "rabi_hz must be positive");
    require(p.stark_hz >= 0.0, "selection", "stark_hz must be non-negative");
  }
  require(c.selection.blow_away_survival >= 0.0 && c.selection.blow_away_survival <= 1.0,
          "selection", "blow_away_survival must be in [0, 1]");
  require(c.selection.repump_loss >= 0.0 && c.selection.repump_loss <= 1.0, "selection",
          "repump_loss must be in [0, 1]");
  require(c.selection.floor > 0.0 && c.selection.floor < 1.0, "selection",
          "floor must be in (0, 1)");
  require(c.bootstrap_resamples >= 2, "bootstrap_resamples", "must be at least 2");

  const auto& t = c.tradeoff;
  require(t.ratio_min > 0.0 && t.ratio_max >= t.ratio_min, "tradeoff",
          "need 0 < ratio_min <= ratio_max");
  require(t.ratio_points >= 1, "tradeoff", "ratio_points must be at least 1");
  require(t.stark_hz > 0.0, "tradeoff", "stark_hz must be positive");
  require(!t.curves.empty(), "tradeoff", "at least one curve is required");
  for (const auto& cc : t.curves) {
    require(!cc.rabi_scale.empty(), "tradeoff", "curve '" + cc.label + "' has no pulses");
    require(cc.label.find_first_of(",\"\n") == std::string::npos, "tradeoff",
            "curve labels may not contain commas, quotes or newlines");
    for (double f : cc.rabi_scale)
      require(f > 0.0, "tradeoff", "rabi_scale entries must be positive");
  }

  const auto& sp = c.spectrum;
  require(sp.probe_rabi_hz > 0.0, "spectrum", "probe_rabi_hz must be positive");
  require(sp.stark_hz >= 0.0, "spectrum", "stark_hz must be non-negative");
  require(sp.points >= 2, "spectrum", "points must be at least 2");
  require(sp.hi > sp.lo, "spectrum", "hi must exceed lo");

  require(c.invert.truncation_lo >= 0.0 && c.invert.truncation_hi <= 1.0 &&
              c.invert.truncation_hi > c.invert.truncation_lo,
          "invert", "need 0 <= truncation_lo < truncation_hi <= 1");

  const auto& f = c.fluorescence;
  require(f.atom_count_grid.size() >= 2, "fluorescence", "atom_count_grid needs 2+ entries");
  for (double v : f.atom_count_grid)
    require(v > 0.0 && v <= 1.0, "fluorescence", "atom_count_grid entries must be in (0, 1]");
  require(f.counts_per_atom > 0.0, "fluorescence", "counts_per_atom must be positive");
  require(f.relative_noise >= 0.0, "fluorescence", "relative_noise must be >= 0");

  const auto& o = c.optomech;
  core("optomech", [&] { o.trap().validate(); });
  require(o.power_ratio > 0.0, "optomech", "power_ratio must be positive");
  require(o.window_s > 0.0 && o.sample_interval_s > 0.0 && o.sample_interval_s <= o.window_s,
          "optomech", "need 0 < sample_interval_s <= window_s");
  require(o.cycles >= 1, "optomech", "cycles must be at least 1");
  require(o.lowpass_hz >= 0.0, "optomech", "lowpass_hz must be >= 0");
  require(o.probe_depth_ratio * o.power_ratio < 0.5, "optomech",
          "probe_depth_ratio * power_ratio must stay below 0.5");

  const auto& sc = c.scan;
  require(sc.points >= 1, "scan", "points must be at least 1");
  require(sc.position_nodes >= 1, "scan", "position_nodes must be at least 1");
  const double half = 0.5 * c.geometry.build().cavity_length();
  for (double z : sc.offsets())
    require(std::abs(z) <= half, "scan", "offsets must lie within the cavity");

  const auto& r = c.radial;
  require(r.duration_s > 0.0, "radial", "duration_s must be positive");
  require(r.samples >= 4, "radial", "samples must be at least 4");
  require(r.dephasing_time_s >= 0.0, "radial", "dephasing_time_s must be >= 0");
  require(r.measured_ratio >= 0.0, "radial", "measured_ratio must be >= 0");

  require(c.fit.range_min > 0.0 && c.fit.range_max > c.fit.range_min, "fit",
          "need 0 < range_min < range_max");

  if (c.scenario == Scenario::invert)
    require(!c.invert.input.empty(), "invert", "the invert scenario needs 'invert.input'");
  if (c.scenario == Scenario::fit)
    require(!c.fit.input.empty(), "fit", "the fit scenario needs 'fit.input'");
  if (c.scenario == Scenario::selection || c.scenario == Scenario::optomech_toggle ||
      c.scenario == Scenario::position_scan || c.scenario == Scenario::fluorescence)
    require(!c.selection.pulses.empty(), "selection", "this scenario needs at least one pulse");
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_yaml(const RunConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  auto kv = [&](const char* k, const auto& v) { e << YAML::Key << k << YAML::Value << v; };
  auto kd = [&](const char* k, double v) { e << YAML::Key << k << YAML::Value << num(v); };
  auto list = [&](const char* k, const std::vector<double>& v) {
    e << YAML::Key << k << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double x : v) e << num(x);
    e << YAML::EndSeq;
  };

  e << YAML::BeginMap;
  kv("scenario", scenario_name(c.scenario));
  kv("seed", c.seed);
  kv("pipeline", enum_name(c.pipeline, kPipelines));
  kv("bootstrap_resamples", c.bootstrap_resamples);

  e << YAML::Key << "geometry" << YAML::Value << YAML::BeginMap;
  const auto& g = c.geometry;
  kd("lattice_wavelength_m", g.lattice_wavelength_m);
  kd("probe_wavelength_m", g.probe_wavelength_m);
  kd("atomic_wavelength_m", g.atomic_wavelength_m);
  kd("free_spectral_range_hz", g.free_spectral_range_hz);
  kd("hyperfine_splitting_hz", g.hyperfine_splitting_hz);
  kd("probe_detuning_hz", g.probe_detuning_hz);
  kd("stark_detuning_hz", g.stark_detuning_hz);
  kd("peak_coupling_hz", g.peak_coupling_hz);
  kd("mode_waist_m", g.mode_waist_m);
  kv("stark_mode", enum_name(g.stark_mode, kStarkModes));
  kv("symmetry", enum_name(g.symmetry, kSymmetries));
  e << YAML::EndMap;

  e << YAML::Key << "ensemble" << YAML::Value << YAML::BeginMap;
  kv("atoms", c.ensemble.atoms);
  kd("extent_m", c.ensemble.extent_m);
  kd("z_offset_m", c.ensemble.z_offset_m);
  kv("profile", enum_name(c.ensemble.profile, kProfiles));
  kd("radial_sigma_m", c.ensemble.radial_sigma_m);
  e << YAML::EndMap;

  e << YAML::Key << "selection" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "pulses" << YAML::Value << YAML::BeginSeq;
  for (const auto& p : c.selection.pulses) {
    e << YAML::Flow << YAML::BeginMap;
    kd("rabi_hz", p.rabi_hz);
    kd("detuning_hz", p.detuning_hz);
    kd("stark_hz", p.stark_hz);
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;
  kv("repump_between", c.selection.repump_between);
  kd("blow_away_survival", c.selection.blow_away_survival);
  kd("repump_loss", c.selection.repump_loss);
  kd("floor", c.selection.floor);
  e << YAML::EndMap;

  e << YAML::Key << "tradeoff" << YAML::Value << YAML::BeginMap;
  kd("ratio_min", c.tradeoff.ratio_min);
  kd("ratio_max", c.tradeoff.ratio_max);
  kv("ratio_points", c.tradeoff.ratio_points);
  kd("detuning_fraction", c.tradeoff.detuning_fraction);
  kd("stark_hz", c.tradeoff.stark_hz);
  e << YAML::Key << "curves" << YAML::Value << YAML::BeginSeq;
  for (const auto& cc : c.tradeoff.curves) {
    e << YAML::Flow << YAML::BeginMap;
    kv("label", cc.label);
    list("rabi_scale", cc.rabi_scale);
    e << YAML::EndMap;
  }
  e << YAML::EndSeq << YAML::EndMap;

  e << YAML::Key << "spectrum" << YAML::Value << YAML::BeginMap;
  kd("probe_rabi_hz", c.spectrum.probe_rabi_hz);
  kd("stark_hz", c.spectrum.stark_hz);
  kv("points", c.spectrum.points);
  kd("lo", c.spectrum.lo);
  kd("hi", c.spectrum.hi);
  kd("detuning_offset_hz", c.spectrum.detuning_offset_hz);
  kv("selected", c.spectrum.selected);
  e << YAML::EndMap;

  e << YAML::Key << "invert" << YAML::Value << YAML::BeginMap;
  if (!c.invert.input.empty()) kv("input", c.invert.input.string());
  kd("truncation_lo", c.invert.truncation_lo);
  kd("truncation_hi", c.invert.truncation_hi);
  e << YAML::EndMap;

  e << YAML::Key << "fluorescence" << YAML::Value << YAML::BeginMap;
  list("atom_count_grid", c.fluorescence.atom_count_grid);
  kd("counts_per_atom", c.fluorescence.counts_per_atom);
  kd("relative_noise", c.fluorescence.relative_noise);
  kv("fit_intercept", c.fluorescence.fit_intercept);
  e << YAML::EndMap;

  e << YAML::Key << "optomech" << YAML::Value << YAML::BeginMap;
  const auto& o = c.optomech;
  kd("axial_frequency_hz", o.axial_frequency_hz);
  kd("radial_frequency_hz", o.radial_frequency_hz);
  kd("probe_depth_ratio", o.probe_depth_ratio);
  kd("temperature_k", o.temperature_k);
  kd("power_ratio", o.power_ratio);
  kd("window_s", o.window_s);
  kv("cycles", o.cycles);
  kd("sample_interval_s", o.sample_interval_s);
  kd("lowpass_hz", o.lowpass_hz);
  kv("method", enum_name(o.method, kMethods));
  e << YAML::EndMap;

  e << YAML::Key << "scan" << YAML::Value << YAML::BeginMap;
  if (!c.scan.offsets_m.empty()) list("offsets_m", c.scan.offsets_m);
  kd("offset_min_m", c.scan.offset_min_m);
  kd("offset_max_m", c.scan.offset_max_m);
  kv("points", c.scan.points);
  kv("position_nodes", c.scan.position_nodes);
  e << YAML::EndMap;

  e << YAML::Key << "radial" << YAML::Value << YAML::BeginMap;
  kd("duration_s", c.radial.duration_s);
  kv("samples", c.radial.samples);
  kd("depth_ratio_before", c.radial.depth_ratio_before);
  kd("depth_ratio_after", c.radial.depth_ratio_after);
  kd("dephasing_time_s", c.radial.dephasing_time_s);
  kv("phase_space", enum_name(c.radial.phase_space, kPhaseSpaces));
  kv("composition", enum_name(c.radial.composition, kCompositions));
  kd("measured_ratio", c.radial.measured_ratio);
  e << YAML::EndMap;

  e << YAML::Key << "fit" << YAML::Value << YAML::BeginMap;
  if (!c.fit.input.empty()) kv("input", c.fit.input.string());
  kd("range_min", c.fit.range_min);
  kd("range_max", c.fit.range_max);
  kv("weighted", c.fit.weighted);
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace sitesel::cli
