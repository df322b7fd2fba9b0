#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "sitesel_cli/app.hpp"
#include "sitesel_cli/config.hpp"
#include "sitesel_cli/output.hpp"
#include "sitesel_cli/run.hpp"

namespace fs = std::filesystem;
using namespace sitesel::cli;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("sitesel_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sitesel");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kSmallSelection = R"(scenario: selection
seed: 5
pipeline: particles
ensemble:
  atoms: 400
selection:
  count: 2
  rabi_hz: 2040
)";

}  // namespace

TEST_CASE("version and usage") {
  const auto v = cli({"--version"});
  CHECK(v.code == exit_ok);
  CHECK(v.out.find(software_version()) != std::string::npos);
  CHECK(cli({}).code == exit_config);
  CHECK(cli({"simulate", "selection"}).code == exit_config);
  CHECK(cli({"reproduce", "fig9z"}).code == exit_config);
}

TEST_CASE("negative Rabi frequency is a config error and writes nothing") {
  TempDir t;
  const auto cfg = t.write("bad.yaml", "scenario: selection\nselection:\n  rabi_hz: -2040\n");
  const auto r = cli({"simulate", "selection", "--config", cfg.string(), "--out",
                      (t.path / "out").string()});
  CHECK(r.code == exit_config);
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK_FALSE(fs::exists(t.path / "out"));
}

TEST_CASE("unknown keys are rejected with a line number") {
  TempDir t;
  const auto cfg = t.write("bad.yaml", "scenario: selection\nselection:\n  count: 1\n  rabbi_hz: 3\n");
  const auto r = cli({"simulate", "selection", "--config", cfg.string()});
  CHECK(r.code == exit_config);
  CHECK(r.err.find("line 4") != std::string::npos);
  CHECK(r.err.find("rabbi_hz") != std::string::npos);

  CHECK(cli({"simulate", "selection", "--config", (t.path / "missing.yaml").string()}).code ==
        exit_config);
  const auto wrong = t.write("w.yaml", "scenario: tradeoff\n");
  CHECK(cli({"simulate", "selection", "--config", wrong.string()}).code == exit_config);
  const auto typo = t.write("typo.yaml", "scenario: selection\nseed: many\n");
  CHECK(cli({"simulate", "selection", "--config", typo.string()}).code == exit_config);
}

TEST_CASE("physics and numeric failures map to their exit codes") {
  TempDir t;
  const auto degenerate = t.write("d.yaml",
                                  "scenario: selection\nselection:\n  count: 1\n  rabi_hz: 2040\n"
                                  "  floor: 0.9\n");
  CHECK(cli({"simulate", "selection", "--config", degenerate.string(), "--out",
             (t.path / "d").string()})
            .code == exit_physics);
  const auto narrow = t.write("n.yaml", "scenario: selection\nselection:\n  rabi_hz: 1e-5\n");
  CHECK(cli({"simulate", "selection", "--config", narrow.string(), "--out",
             (t.path / "n").string()})
            .code == exit_numeric);
}

TEST_CASE("validate-only writes nothing") {
  TempDir t;
  const auto cfg = t.write("c.yaml", kSmallSelection);
  const auto r = cli({"simulate", "selection", "--config", cfg.string(), "--validate-only", "--out",
                      (t.path / "o").string()});
  CHECK(r.code == exit_ok);
  CHECK_FALSE(fs::exists(t.path / "o"));
  CHECK(cli({"reproduce", "fig4b", "--validate-only"}).code == exit_ok);
}

TEST_CASE("single atom gives a single row") {
  TempDir t;
  const auto cfg =
      t.write("c.yaml", "scenario: selection\npipeline: particles\nensemble:\n  atoms: 1\n");
  REQUIRE(cli({"simulate", "selection", "--config", cfg.string(), "--out", (t.path / "a").string()})
              .code == exit_ok);
  REQUIRE(cli({"simulate", "selection", "--config", cfg.string(), "--out", (t.path / "b").string()})
              .code == exit_ok);
  const auto atoms = read_csv(t.path / "a" / "atoms.csv");
  CHECK(atoms.rows.size() == 1);
  CHECK(slurp(t.path / "a" / "atoms.csv") == slurp(t.path / "b" / "atoms.csv"));
}

TEST_CASE("reruns and manifests") {
  TempDir t;
  const auto cfg = t.write("c.yaml", kSmallSelection);
  const auto a = t.path / "a", b = t.path / "b", c = t.path / "c";
  REQUIRE(cli({"simulate", "selection", "--config", cfg.string(), "--out", a.string()}).code == 0);
  REQUIRE(cli({"simulate", "selection", "--config", cfg.string(), "--out", b.string()}).code == 0);
  REQUIRE(cli({"simulate", "selection", "--config", cfg.string(), "--seed", "6", "--out",
               c.string()})
              .code == 0);
  CHECK(slurp(a / "atoms.csv") == slurp(b / "atoms.csv"));
  CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
  CHECK(slurp(a / "atoms.csv") != slurp(c / "atoms.csv"));

  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["seed"] == 5);
  CHECK(m["scenario"] == "selection");
  CHECK(m["config_echo"] == kSmallSelection);
  CHECK(m["software"]["version"] == software_version());
  std::size_t listed = 0;
  for (const auto& o : m["outputs"]) {
    const std::string name = o["file"];
    CHECK(o["sha256"] == sha256_file(a / name));
    ++listed;
  }
  std::size_t on_disk = 0;
  for (const auto& e : fs::directory_iterator(a))
    if (e.path().filename() != "manifest.json") ++on_disk;
  CHECK(listed == on_disk);

  // The resolved config re-runs to the same outputs.
  REQUIRE(cli({"simulate", "selection", "--config", (a / "config.resolved.yaml").string(), "--out",
               (t.path / "r").string()})
              .code == 0);
  CHECK(slurp(a / "atoms.csv") == slurp(t.path / "r" / "atoms.csv"));
}

TEST_CASE("resolved config round-trips") {
  RunConfig c;
  c.scenario = Scenario::radial;
  c.seed = 123456789012345ULL;
  c.geometry.mode_waist_m = 65.5e-6;
  c.selection.pulses = {{1000.0, 250.0, 30e3}, {1100.0, -5.0, 31e3}};
  c.radial.phase_space = sitesel::PhaseSpace::sampled;
  c.optomech.probe_depth_ratio = 0.0123456789012345;
  const std::string y = to_yaml(c);
  const RunConfig back = parse_config(y);
  CHECK(to_yaml(back) == y);
  CHECK(back.seed == c.seed);
  CHECK(back.optomech.probe_depth_ratio == c.optomech.probe_depth_ratio);
  CHECK(back.selection.pulses.size() == 2);
}

TEST_CASE("csv units and parsing") {
  CsvTable t({"freq_hz", "label"});
  t.add_meta("note", 1.5);
  t.row() << 1e3 << "x";
  t.row() << -0.0 << "y";
  const auto d = parse_csv(t.str());
  CHECK(d.meta_number("note") == 1.5);
  CHECK(d.number(0, d.column("freq_hz")) == 1000.0);
  CHECK(d.rows[1][0] == "0");
  CHECK_THROWS_AS(d.column("nope"), ConfigError);
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("fit and invert read earlier outputs") {
  TempDir t;
  const auto tcfg = t.write("t.yaml",
                            "scenario: tradeoff\ntradeoff:\n  ratio_points: 20\n  curves:\n"
                            "    - label: one\n      rabi_scale: [1.0]\n");
  REQUIRE(cli({"simulate", "tradeoff", "--config", tcfg.string(), "--out", (t.path / "t").string()})
              .code == 0);
  const auto fcfg = t.write("f.yaml", "scenario: fit\nfit:\n  input: t/tradeoff.csv\n");
  REQUIRE(cli({"simulate", "fit", "--config", fcfg.string(), "--out", (t.path / "f").string()})
              .code == 0);
  const auto fits = read_csv(t.path / "f" / "fits.csv");
  CHECK(fits.rows.size() == 2);
  CHECK(fits.number(0, fits.column("exponent")) == doctest::Approx(2.0).epsilon(0.05));

  const auto scfg = t.write("s.yaml", "scenario: spectrum\nspectrum:\n  selected: false\n");
  REQUIRE(cli({"simulate", "spectrum", "--config", scfg.string(), "--out", (t.path / "s").string()})
              .code == 0);
  const auto spec = read_csv(t.path / "s" / "spectrum.csv");
  CHECK(spec.has_column("detuning_hz"));
  CHECK(spec.has_column("cavity_shift_hz"));
  const auto icfg = t.write("i.yaml", "scenario: invert\ninvert:\n  input: s/spectrum.csv\n");
  REQUIRE(cli({"simulate", "invert", "--config", icfg.string(), "--out", (t.path / "i").string()})
              .code == 0);
  CHECK(read_csv(t.path / "i" / "inverted_density.csv").rows.size() > 10);

  const auto wrong = t.write("w.yaml", "scenario: fit\nfit:\n  input: s/spectrum.csv\n");
  CHECK(cli({"simulate", "fit", "--config", wrong.string()}).code == exit_config);
}

TEST_CASE("every figure tag has a canned config") {
  for (const auto& tag : figure_tags()) {
    INFO(tag);
    CHECK(cli({"reproduce", tag, "--validate-only"}).code == exit_ok);
  }
}
