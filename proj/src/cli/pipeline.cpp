#include "biphoton/cli/pipeline.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "biphoton/cli/count_io.hpp"
#include "biphoton/random.hpp"

#ifndef BIPHOTON_VERSION
#define BIPHOTON_VERSION "0"
#endif

namespace biphoton::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kPlotDrawDomain = 0x506c6f7444726177ULL;
constexpr std::uint64_t kPlotErrorDomain = 0x506c6f744d436172ULL;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path counts_path(const fs::path& dir, const std::string& name) {
  return dir / ("counts_" + name + ".csv");
}

void write_histograms(const fs::path& dir, const std::string& name, const CountGrid& counts) {
  auto put = [&](const std::string& suffix, const Hist1D& h) {
    std::ostringstream s;
    write_hist_csv(s, h);
    write_text(dir / ("hist_" + name + "_" + suffix + ".csv"), s.str());
  };
  put("marginal_signal", marginal_hist(counts, Photon::Signal));
  put("marginal_idler", marginal_hist(counts, Photon::Idler));
  if (counts.grid.signal.kind == counts.grid.idler.kind) {
    put("sum", rotated_hist(counts, RotatedAxis::Sum));
    put("difference", rotated_hist(counts, RotatedAxis::Difference));
  }
}

DistributionResult describe(const std::string& name, const CountGrid& grid,
                            const InstrumentResponse& response, FitSummary fit) {
  DistributionResult d;
  d.name = name;
  d.grid = grid.grid;
  d.total_counts = grid.total();
  d.total_expected = grid.total_expected;
  d.seed = grid.seed;
  d.generator = grid.generator;
  d.response = response;
  d.fit = std::move(fit);
  return d;
}

Measured raw_of(const DistributionResult& d, std::optional<double> MomentSummary::*field) {
  return {*(d.fit.raw.*field), *(d.fit.raw_error.*field)};
}

Measured dec_of(const DistributionResult& d, std::optional<double> MomentSummary::*field) {
  return {*(d.fit.deconvolved.*field), *(d.fit.deconvolved_error.*field)};
}

WitnessReport renamed(WitnessReport w, const std::string& name) {
  w.name = name;
  return w;
}

void finish_report(Report& report, const fs::path& out_dir, std::ostream& log) {
  write_text(out_dir / "report.json", report_json(report));
  const std::string table = report_table(report);
  write_text(out_dir / "report.txt", table);
  log << table;
}

}  // namespace

std::string version() { return BIPHOTON_VERSION; }

Mode mode_from_string(const std::string& s) {
  if (s == "simulate") return Mode::Simulate;
  if (s == "analyze") return Mode::Analyze;
  if (s == "witness") return Mode::Witness;
  if (s == "all") return Mode::All;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

std::vector<PlannedDistribution> plan_distributions(const Scenario& sc) {
  const BiphotonState state = sc.state();
  const GatePulse gate = sc.gate();
  const InstrumentResponse spectral = sc.spectral_response();
  const double tg = sc.tau_g;

  std::vector<PlannedDistribution> plans;
  auto add = [&](const std::string& name, Measurement m, const BiphotonState& st,
                 InstrumentResponse simulated, InstrumentResponse removed) {
    const Grid2D grid = is_time_frequency(m)
                            ? make_grid(st, gate, gated_side(m), sc.half_span, sc.n)
                            : with_shared_step(make_grid(st, m, sc.half_span, sc.n));
    const auto index = plans.size();
    plans.push_back({name, m, st, gate, grid, simulated, removed,
                     derive_seed(sc.seed, kPlotDrawDomain, index),
                     derive_seed(sc.seed, kPlotErrorDomain, index)});
  };

  add("joint_spectrum", Measurement::JointSpectrum, state, spectral, spectral);
  add("joint_temporal", Measurement::JointTemporal, state, {tg, tg}, {tg, tg});
  add("signal_time_idler_frequency", Measurement::SignalTimeIdlerFrequency, state,
      {0.0, spectral.res_i}, {tg, spectral.res_i});
  add("signal_frequency_idler_time", Measurement::SignalFrequencyIdlerTime, state,
      {spectral.res_s, 0.0}, {spectral.res_s, tg});
  if (sc.chirp_s * sc.chirp_i < 0.0) {
    add("joint_temporal_unchirped", Measurement::JointTemporal, state.with_chirps(0.0, 0.0),
        {tg, tg}, {tg, tg});
  }
  return plans;
}

CountGrid simulate_distribution(const PlannedDistribution& plan, double total_counts) {
  const Intensity2D intensity =
      observed_intensity(plan.state, plan.gate, plan.measurement, plan.grid, plan.simulated_response);
  return draw_counts(intensity, total_counts, plan.draw_seed);
}

std::vector<WitnessReport> compute_witnesses(const Report& report, double k) {
  std::vector<WitnessReport> out;
  const DistributionResult* js = report.find("joint_spectrum");
  const DistributionResult* jt = report.find("joint_temporal");
  if (js && jt && js->fit.raw.width_sum && jt->fit.raw.width_diff) {
    out.push_back(renamed(uncertainty_witness(raw_of(*js, &MomentSummary::width_sum),
                                              raw_of(*jt, &MomentSummary::width_diff), k),
                          "joint_uncertainty_raw"));
    out.push_back(renamed(uncertainty_witness(dec_of(*js, &MomentSummary::width_sum),
                                              dec_of(*jt, &MomentSummary::width_diff), k),
                          "joint_uncertainty_deconvolved"));
    out.push_back(renamed(mirrored_uncertainty_witness(raw_of(*js, &MomentSummary::width_diff),
                                                       raw_of(*jt, &MomentSummary::width_sum), k),
                          "mirrored_uncertainty_raw"));
    out.push_back(renamed(mirrored_uncertainty_witness(dec_of(*js, &MomentSummary::width_diff),
                                                       dec_of(*jt, &MomentSummary::width_sum), k),
                          "mirrored_uncertainty_deconvolved"));
  }
  if (js && jt) {
    for (Photon p : {Photon::Signal, Photon::Idler}) {
      const auto field = p == Photon::Signal ? &MomentSummary::heralded_s : &MomentSummary::heralded_i;
      const std::string side = p == Photon::Signal ? "signal" : "idler";
      out.push_back(renamed(heralded_tbp_witness({js->fit.raw.*field, js->fit.raw_error.*field},
                                                 {jt->fit.raw.*field, jt->fit.raw_error.*field}, k),
                            "heralded_tbp_" + side + "_raw"));
      out.push_back(renamed(
          heralded_tbp_witness({js->fit.deconvolved.*field, js->fit.deconvolved_error.*field},
                               {jt->fit.deconvolved.*field, jt->fit.deconvolved_error.*field}, k),
          "heralded_tbp_" + side + "_deconvolved"));
    }
  }
  const DistributionResult* ref = report.find("joint_temporal_unchirped");
  if (jt && ref && report.dispersion_chirp && jt->fit.raw.width_diff && ref->fit.raw.width_diff) {
    out.push_back(renamed(dispersion_witness(raw_of(*jt, &MomentSummary::width_diff),
                                             raw_of(*ref, &MomentSummary::width_diff),
                                             *report.dispersion_chirp, k),
                          "dispersion_cancellation_raw"));
  }
  return out;
}

int witness_exit_code(const std::vector<WitnessReport>& witnesses) {
  for (const auto& w : witnesses) {
    if (w.verdict == Verdict::Inconclusive) return kExitInconclusive;
  }
  return kExitOk;
}

Report analyze_distributions(const Scenario& sc, const std::vector<PlannedDistribution>& plans,
                             const std::vector<CountGrid>& grids) {
  if (plans.size() != grids.size()) throw std::invalid_argument("one grid per planned plot");
  Report report;
  report.scenario = sc;
  report.k_sigma = sc.k_sigma;
  report.seed = sc.seed;
  report.generator = kGeneratorName;
  report.version = version();
  for (std::size_t d = 0; d < plans.size(); ++d) {
    AnalysisOptions options{sc.policy, sc.mc_trials, plans[d].mc_seed};
    FitSummary fit;
    try {
      fit = analyze_distribution(grids[d], plans[d].removed_response, options);
    } catch (const std::exception& e) {
      throw std::runtime_error(plans[d].name + ": " + e.what());
    }
    report.distributions.push_back(
        describe(plans[d].name, grids[d], plans[d].removed_response, std::move(fit)));
  }
  if (sc.chirp_s * sc.chirp_i < 0.0) {
    report.dispersion_chirp = 0.5 * (std::abs(sc.chirp_s) + std::abs(sc.chirp_i));
  }
  report.witnesses = compute_witnesses(report, sc.k_sigma);
  return report;
}

int run(const Scenario& sc, Mode mode, const fs::path& out_dir, std::ostream& log,
        std::optional<double> k_override) {
  fs::create_directories(out_dir);
  const std::vector<PlannedDistribution> plans = plan_distributions(sc);

  if (mode == Mode::Witness) {
    Report report = parse_report_json(read_text(out_dir / "report.json"),
                                      (out_dir / "report.json").string());
    const double k = k_override.value_or(report.k_sigma);
    const auto witnesses = compute_witnesses(report, k);
    write_text(out_dir / "witnesses.json", witnesses_json(witnesses));
    log << witness_table(witnesses);
    return witness_exit_code(witnesses);
  }

  std::vector<CountGrid> grids;
  if (mode == Mode::Simulate || mode == Mode::All) {
    for (const auto& p : plans) {
      grids.push_back(simulate_distribution(p, sc.total_counts));
      write_counts_file(counts_path(out_dir, p.name), grids.back());
      fmt::print(log, "wrote {} ({} counts)\n", counts_path(out_dir, p.name).string(),
                 grids.back().total());
    }
    if (mode == Mode::Simulate) return kExitOk;
  } else {
    for (const auto& p : plans) grids.push_back(read_counts_file(counts_path(out_dir, p.name)));
  }

  Scenario effective = sc;
  if (k_override) effective.k_sigma = *k_override;
  Report report = analyze_distributions(effective, plans, grids);
  for (std::size_t d = 0; d < plans.size(); ++d) write_histograms(out_dir, plans[d].name, grids[d]);
  finish_report(report, out_dir, log);
  return witness_exit_code(report.witnesses);
}

int analyze_external(const fs::path& counts_csv, const ExternalOptions& options,
                     const fs::path& out_dir, std::ostream& log) {
  fs::create_directories(out_dir);
  const CountGrid grid = read_counts_file(counts_csv);
  const FitSummary fit =
      analyze_distribution(grid, options.response, {options.policy, options.mc_trials, options.seed});
  Report report;
  report.k_sigma = options.k_sigma;
  report.seed = options.seed;
  report.generator = grid.generator;
  report.version = version();
  const std::string name = counts_csv.stem().string();
  report.distributions.push_back(describe(name, grid, options.response, fit));
  write_histograms(out_dir, name, grid);
  finish_report(report, out_dir, log);
  return kExitOk;
}

}  // namespace biphoton::cli
