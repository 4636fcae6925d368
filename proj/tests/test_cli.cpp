#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "biphoton/cli/count_io.hpp"
#include "biphoton/cli/ini.hpp"
#include "biphoton/cli/pipeline.hpp"
#include "biphoton/cli/report.hpp"
#include "biphoton/cli/scenario.hpp"
#include "biphoton/parallel.hpp"

using namespace biphoton;
using namespace biphoton::cli;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("biphoton_test_" + name);
  fs::remove_all(p);
  return p;
}

Scenario quick(const std::string& name) {
  Scenario s = preset(name);
  s.mc_trials = 50;
  return s;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("ini parsing errors carry line numbers") {
  CHECK(error_of([] { parse_ini("[state]\nsigma_s = 1\nsigma_s = 2\n", "a.ini"); }).find("a.ini:3") != std::string::npos);
  CHECK(error_of([] { parse_ini("sigma_s = 1\n", "b.ini"); }).find("b.ini:1") != std::string::npos);
  CHECK(error_of([] { parse_ini("[state]\n\nnot a pair\n", "c.ini"); }).find("c.ini:3") != std::string::npos);
  const IniDocument d = parse_ini("# top\n[state] ; trailing\nrho = -0.5  # note\n", "d.ini");
  CHECK(d.sections.at("state").at("rho").text == "-0.5");
  CHECK(d.sections.at("state").at("rho").line == 3);
}

TEST_CASE("scenario loading") {
  const std::string empty = error_of([] { scenario_from_ini(parse_ini("", "empty.ini")); });
  CHECK(empty.find("missing required keys") != std::string::npos);
  for (const char* key : {"sigma_s", "rho", "tau_g", "spectral_res_s_nm", "total_counts", "seed"}) {
    CHECK(empty.find(key) != std::string::npos);
  }

  const std::string unknown = error_of([] {
    const Scenario base = preset("table1");
    scenario_from_ini(parse_ini("[state]\n\nsigma_x = 3\n", "u.ini"), &base);
  });
  CHECK(unknown.find("u.ini:3") != std::string::npos);
  CHECK(unknown.find("sigma_x") != std::string::npos);

  const std::string bad = error_of([] {
    const Scenario base = preset("table1");
    scenario_from_ini(parse_ini("[state]\nrho = 1.5\n", "r.ini"), &base);
  });
  CHECK(bad.find("r.ini:2") != std::string::npos);

  const std::string both = error_of([] {
    const Scenario base = preset("table1");
    scenario_from_ini(parse_ini("[state]\nchirp_s = 0.01\ndisplacement_s_mm = 2\n", "x.ini"), &base);
  });
  CHECK(both.find("not both") != std::string::npos);

  const Scenario base = preset("table1");
  const Scenario moved = scenario_from_ini(parse_ini("[state]\ndisplacement_s_mm = 28.4\n", "m.ini"), &base);
  CHECK(moved.chirp_s == doctest::Approx(0.0373).epsilon(2e-3));
  CHECK(moved.sigma_s == base.sigma_s);

  CHECK_THROWS_AS(load_scenario("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("presets") {
  const auto names = preset_names();
  CHECK(names == std::vector<std::string>{"table1", "fig4a", "fig4b", "fig4c", "fig4d"});
  const Scenario t = preset("table1");
  CHECK(t.sigma_s == 10.56);
  CHECK(t.sigma_i == 9.69);
  CHECK(t.rho == -0.9951);
  CHECK(t.tau_g == 0.120);
  CHECK(t.spectral_res_s_nm == 0.081);
  CHECK(t.spectral_res_i_nm == 0.135);
  CHECK(t.chirp_s == 0.0);
  CHECK(t.total_counts == 1e6);
  const Scenario d = preset("fig4d");
  CHECK(d.chirp_s == 0.0373);
  CHECK(d.chirp_i == -0.0359);
  CHECK(preset("fig4b").chirp_i == 0.0);
  CHECK(preset("fig4c").chirp_s == 0.0);
  CHECK_THROWS_AS(preset("fig5"), ConfigError);

  for (const auto& n : names) {
    const Scenario s = preset(n);
    const Scenario back = scenario_from_ini(parse_ini(to_ini(s), "roundtrip"));
    CHECK(to_ini(back) == to_ini(s));
    CHECK(back.state() == s.state());
  }
}

TEST_CASE("count grid CSV round trip") {
  const auto plans = plan_distributions(preset("table1"));
  const CountGrid c = simulate_distribution(plans[2], 1e5);
  std::stringstream ss;
  write_counts_csv(ss, c);
  const CountGrid back = read_counts_csv(ss, "mem");
  CHECK(back.grid == c.grid);
  CHECK(back.counts == c.counts);
  CHECK(back.total_expected == c.total_expected);
  CHECK(back.seed == c.seed);
  CHECK(back.generator == c.generator);
  std::stringstream again;
  write_counts_csv(again, back);
  CHECK(again.str() == ss.str());

  std::string text = ss.str();
  const auto bad_header = std::string("# colour: blue\n") + text;
  std::istringstream in1(bad_header);
  CHECK(error_of([&] { read_counts_csv(in1, "h.csv"); }).find("h.csv:1") != std::string::npos);

  std::string broken = text;
  broken.replace(broken.rfind(','), 1, ",x");
  std::istringstream in2(broken);
  CHECK_THROWS_AS(read_counts_csv(in2, "b.csv"), ConfigError);

  std::string short_rows = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  std::istringstream in3(short_rows);
  CHECK_THROWS_AS(read_counts_csv(in3, "s.csv"), ConfigError);
}

TEST_CASE("plans") {
  const auto t = plan_distributions(preset("table1"));
  REQUIRE(t.size() == 4);
  CHECK(t[0].name == "joint_spectrum");
  CHECK(t[1].removed_response.res_s == 0.120);
  CHECK(t[2].simulated_response.res_s == 0.0);
  CHECK(t[2].removed_response.res_s == 0.120);
  CHECK(t[3].grid.idler.kind == AxisKind::Time);
  CHECK(t[0].draw_seed != t[1].draw_seed);
  const auto d = plan_distributions(preset("fig4d"));
  REQUIRE(d.size() == 5);
  CHECK(d[4].name == "joint_temporal_unchirped");
  CHECK_FALSE(d[4].state.chirped());
  CHECK(plan_distributions(preset("fig4b")).size() == 4);
}

TEST_CASE("witness exit codes") {
  CHECK(witness_exit_code({}) == kExitOk);
  CHECK(witness_exit_code({make_report("a", 0.5, 0.01, 1.0, 3.0), make_report("b", 2.0, 0.01, 1.0, 3.0)}) == kExitOk);
  CHECK(witness_exit_code({make_report("a", 0.5, 0.01, 1.0, 3.0), make_report("b", 0.99, 0.01, 1.0, 3.0)}) == kExitInconclusive);
}

TEST_CASE("run: outputs, schema and determinism") {
  const Scenario s = quick("table1");
  const fs::path a = scratch("run_a"), b = scratch("run_b"), c = scratch("run_c");
  std::ostringstream log;
  const unsigned saved = thread_count();
  set_thread_count(1);
  CHECK(run(s, Mode::All, a, log) == kExitOk);
  set_thread_count(4);
  CHECK(run(s, Mode::All, b, log) == kExitOk);
  set_thread_count(saved);

  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
  }
  CHECK(files == 18);  // 4 grids, 12 histograms (no rotated ones for time-frequency), 2 reports
  for (const char* f : {"counts_joint_spectrum.csv", "hist_joint_temporal_difference.csv",
                        "hist_signal_time_idler_frequency_marginal_idler.csv", "report.json", "report.txt"}) {
    CHECK(fs::exists(a / f));
  }

  const auto j = nlohmann::json::parse(slurp(a / "report.json"));
  CHECK(j["schema"] == kReportSchema);
  CHECK(j["provenance"]["seed"] == s.seed);
  for (const auto& d : j["distributions"]) {
    for (const auto& [name, w] : d["widths"].items()) {
      CAPTURE(name);
      CHECK(w.contains("raw"));
      CHECK(w.contains("deconvolved"));
      CHECK(w.contains("error"));
      CHECK(w.contains("unit"));
    }
  }

  // Simulate then analyze separately reproduces the combined run.
  CHECK(run(s, Mode::Simulate, c, log) == kExitOk);
  CHECK_FALSE(fs::exists(c / "report.json"));
  CHECK(run(s, Mode::Analyze, c, log) == kExitOk);
  CHECK(slurp(c / "report.json") == slurp(a / "report.json"));

  CHECK(run(s, Mode::Witness, c, log) == kExitOk);
  const auto w = nlohmann::json::parse(slurp(c / "witnesses.json"));
  CHECK(w.dump().find("joint_uncertainty_raw") != std::string::npos);
  CHECK(run(s, Mode::Witness, c, log, 1e9) == kExitInconclusive);

  const Report parsed = parse_report_json(slurp(a / "report.json"), "report.json");
  CHECK(report_json(parsed).size() > 0);
  REQUIRE(parsed.find("joint_spectrum") != nullptr);
  CHECK(parsed.find("joint_spectrum")->fit.deconvolved.rho == doctest::Approx(-0.9951).epsilon(1e-3));
  CHECK(compute_witnesses(parsed, 3.0).size() == 8);
  CHECK_THROWS_AS(parse_report_json("{\"schema\": \"other\"}", "x"), ConfigError);
  for (const fs::path& p : {a, b, c}) fs::remove_all(p);
}

TEST_CASE("external analysis") {
  Scenario s = quick("table1");
  s.n = 64;
  const auto plans = plan_distributions(s);
  const fs::path dir = scratch("external");
  fs::create_directories(dir);
  write_counts_file(dir / "grid.csv", simulate_distribution(plans[0], s.total_counts));
  std::ostringstream log;
  ExternalOptions opt;
  opt.response = s.spectral_response();
  opt.mc_trials = 50;
  CHECK(analyze_external(dir / "grid.csv", opt, dir / "out", log) == kExitOk);
  const Report r = parse_report_json(slurp(dir / "out" / "report.json"), "r");
  REQUIRE(r.distributions.size() == 1);
  CHECK(r.distributions[0].fit.deconvolved.rho == doctest::Approx(-0.9951).epsilon(5e-3));

  opt.response = {30.0, 30.0};
  const std::string msg = error_of([&] { analyze_external(dir / "grid.csv", opt, dir / "out2", log); });
  CHECK(msg.find("resolution-limited") != std::string::npos);
  fs::remove_all(dir);
}

}  // TEST_SUITE
