#include "biphoton/cli/report.hpp"

#include <fmt/format.h>

#include <nlohmann/json.hpp>

namespace biphoton::cli {

using nlohmann::ordered_json;

namespace {

ordered_json axis_json(const Axis& a) {
  return {{"kind", to_string(a.kind)}, {"unit", unit_of(a.kind)}, {"center", a.center},
          {"step", a.step},            {"n", a.n}};
}

Axis axis_from_json(const ordered_json& j) {
  Axis a;
  a.kind = axis_kind_from_string(j.at("kind").get<std::string>());
  a.center = j.at("center").get<double>();
  a.step = j.at("step").get<double>();
  a.n = j.at("n").get<int>();
  return a;
}

ordered_json entry(double raw, double dec, double err, double dec_err, const char* unit) {
  return {{"raw", raw}, {"deconvolved", dec}, {"error", err}, {"deconvolved_error", dec_err},
          {"unit", unit}};
}

struct EntryRef {
  const char* name;
  Photon unit_axis;
};

const EntryRef kEntries[] = {
    {"marginal_s", Photon::Signal}, {"marginal_i", Photon::Idler}, {"heralded_s", Photon::Signal},
    {"heralded_i", Photon::Idler},  {"width_sum", Photon::Signal}, {"width_diff", Photon::Signal},
};

std::optional<double> get(const MomentSummary& m, std::size_t e) {
  switch (e) {
    case 0: return m.marginal_s;
    case 1: return m.marginal_i;
    case 2: return m.heralded_s;
    case 3: return m.heralded_i;
    case 4: return m.width_sum;
    default: return m.width_diff;
  }
}

void set(MomentSummary& m, std::size_t e, double v) {
  switch (e) {
    case 0: m.marginal_s = v; break;
    case 1: m.marginal_i = v; break;
    case 2: m.heralded_s = v; break;
    case 3: m.heralded_i = v; break;
    case 4: m.width_sum = v; break;
    default: m.width_diff = v; break;
  }
}

ordered_json distribution_json(const DistributionResult& d) {
  const FitSummary& f = d.fit;
  ordered_json widths = ordered_json::object();
  for (std::size_t k = 0; k < std::size(kEntries); ++k) {
    const EntryRef& e = kEntries[k];
    if (!get(f.raw, k)) continue;
    widths[e.name] = entry(*get(f.raw, k), *get(f.deconvolved, k), *get(f.raw_error, k),
                           *get(f.deconvolved_error, k), unit_of(d.grid.axis(e.unit_axis).kind));
  }
  return {
      {"name", d.name},
      {"axes", {{"signal", axis_json(d.grid.signal)}, {"idler", axis_json(d.grid.idler)}}},
      {"counts",
       {{"total", d.total_counts},
        {"expected", d.total_expected},
        {"seed", d.seed},
        {"generator", d.generator}}},
      {"response",
       {{"signal", {{"value", d.response.res_s}, {"unit", unit_of(d.grid.signal.kind)}}},
        {"idler", {{"value", d.response.res_i}, {"unit", unit_of(d.grid.idler.kind)}}}}},
      {"center",
       {{"signal", {{"value", f.center_s}, {"unit", unit_of(d.grid.signal.kind)}}},
        {"idler", {{"value", f.center_i}, {"unit", unit_of(d.grid.idler.kind)}}}}},
      {"widths", widths},
      {"correlation", entry(f.raw.rho, f.deconvolved.rho, f.raw_error.rho,
                            f.deconvolved_error.rho, "1")},
      {"rho_clamped", f.rho_clamped},
      {"monte_carlo", {{"trials", f.mc_trials}, {"failures", f.mc_failures}}},
  };
}

DistributionResult distribution_from_json(const ordered_json& j) {
  DistributionResult d;
  d.name = j.at("name").get<std::string>();
  d.grid = Grid2D{axis_from_json(j.at("axes").at("signal")), axis_from_json(j.at("axes").at("idler"))};
  const auto& c = j.at("counts");
  d.total_counts = c.at("total").get<std::uint64_t>();
  d.total_expected = c.at("expected").get<double>();
  d.seed = c.at("seed").get<std::uint64_t>();
  d.generator = c.at("generator").get<std::string>();
  d.response = {j.at("response").at("signal").at("value").get<double>(),
                j.at("response").at("idler").at("value").get<double>()};
  FitSummary& f = d.fit;
  f.center_s = j.at("center").at("signal").at("value").get<double>();
  f.center_i = j.at("center").at("idler").at("value").get<double>();
  const auto& w = j.at("widths");
  for (std::size_t k = 0; k < std::size(kEntries); ++k) {
    if (!w.contains(kEntries[k].name)) continue;
    const auto& v = w.at(kEntries[k].name);
    set(f.raw, k, v.at("raw").get<double>());
    set(f.deconvolved, k, v.at("deconvolved").get<double>());
    set(f.raw_error, k, v.at("error").get<double>());
    set(f.deconvolved_error, k, v.at("deconvolved_error").get<double>());
  }
  const auto& r = j.at("correlation");
  f.raw.rho = r.at("raw").get<double>();
  f.deconvolved.rho = r.at("deconvolved").get<double>();
  f.raw_error.rho = r.at("error").get<double>();
  f.deconvolved_error.rho = r.at("deconvolved_error").get<double>();
  f.rho_clamped = j.at("rho_clamped").get<bool>();
  f.mc_trials = j.at("monte_carlo").at("trials").get<int>();
  f.mc_failures = j.at("monte_carlo").at("failures").get<int>();
  return d;
}

ordered_json witness_json(const WitnessReport& w) {
  ordered_json sd = std::isfinite(w.sigma_distance) ? ordered_json(w.sigma_distance) : ordered_json(nullptr);
  return {{"name", w.name},
          {"value", w.value},
          {"error", w.error},
          {"threshold", w.threshold},
          {"unit", witness_unit(w)},
          {"k_sigma", w.k_sigma},
          {"verdict", to_string(w.verdict)},
          {"sigma_distance", sd}};
}

ordered_json scenario_json(const Scenario& s) {
  ordered_json inst = {{"spectral_res_s_nm", s.spectral_res_s_nm},
                       {"spectral_res_i_nm", s.spectral_res_i_nm},
                       {"wavelength_s_nm", s.wavelength_s()},
                       {"wavelength_i_nm", s.wavelength_i()},
                       {"spectral_res_s", {{"value", s.spectral_response().res_s}, {"unit", "rad/ps"}}},
                       {"spectral_res_i", {{"value", s.spectral_response().res_i}, {"unit", "rad/ps"}}}};
  return {
      {"name", s.name},
      {"state",
       {{"sigma_s", s.sigma_s},
        {"sigma_i", s.sigma_i},
        {"rho", s.rho},
        {"omega0_s", s.omega0_s},
        {"omega0_i", s.omega0_i},
        {"chirp_s", s.chirp_s},
        {"chirp_i", s.chirp_i},
        {"units", {{"bandwidth", "rad/ps"}, {"chirp", "ps^2"}}}}},
      {"gate", {{"tau_g", s.tau_g}, {"omega_g0", s.omega_g0}, {"unit", "ps"}}},
      {"instrument", inst},
      {"grid", {{"half_span", s.half_span}, {"n", s.n}}},
      {"run",
       {{"total_counts", s.total_counts},
        {"mc_trials", s.mc_trials},
        {"seed", s.seed},
        {"k_sigma", s.k_sigma},
        {"herald_min_fraction", s.policy.min_fraction},
        {"herald_min_slices", s.policy.min_slices}}},
  };
}

std::string fmt_value(double v, double e) {
  if (!std::isfinite(e)) return fmt::format("{:.6g}", v);
  return fmt::format("{:.6g} ± {:.2g}", v, e);
}

}  // namespace

const DistributionResult* Report::find(const std::string& name) const {
  for (const auto& d : distributions) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const char* witness_unit(const WitnessReport& w) {
  return w.name.rfind("dispersion", 0) == 0 ? "ps" : "1";
}

std::string report_json(const Report& report) {
  ordered_json j;
  j["schema"] = kReportSchema;
  j["provenance"] = {{"tool", "biphoton"},
                     {"version", report.version},
                     {"seed", report.seed},
                     {"generator", report.generator}};
  j["scenario"] = report.scenario ? scenario_json(*report.scenario) : ordered_json(nullptr);
  j["k_sigma"] = report.k_sigma;
  j["dispersion_chirp"] = report.dispersion_chirp
                              ? ordered_json{{"value", *report.dispersion_chirp}, {"unit", "ps^2"}}
                              : ordered_json(nullptr);
  j["distributions"] = ordered_json::array();
  for (const auto& d : report.distributions) j["distributions"].push_back(distribution_json(d));
  j["witnesses"] = ordered_json::array();
  for (const auto& w : report.witnesses) j["witnesses"].push_back(witness_json(w));
  return j.dump(2) + "\n";
}

Report parse_report_json(const std::string& text, const std::string& source) {
  try {
    const ordered_json j = ordered_json::parse(text);
    if (j.at("schema").get<std::string>() != kReportSchema) {
      throw ConfigError(source + ": unsupported report schema '" + j.at("schema").get<std::string>() + "'");
    }
    Report r;
    r.k_sigma = j.at("k_sigma").get<double>();
    if (!j.at("dispersion_chirp").is_null()) {
      r.dispersion_chirp = j.at("dispersion_chirp").at("value").get<double>();
    }
    r.seed = j.at("provenance").at("seed").get<std::uint64_t>();
    r.generator = j.at("provenance").at("generator").get<std::string>();
    r.version = j.at("provenance").at("version").get<std::string>();
    for (const auto& d : j.at("distributions")) r.distributions.push_back(distribution_from_json(d));
    return r;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(source + ": malformed report: " + e.what());
  }
}

std::string report_table(const Report& report) {
  std::string out;
  if (report.scenario) {
    const Scenario& s = *report.scenario;
    out += fmt::format("scenario {}  (seed {}, {} counts per plot, {} Monte-Carlo trials)\n",
                       s.name, s.seed, s.total_counts, s.mc_trials);
    out += fmt::format("state: sigma_s {} sigma_i {} rad/ps, rho {}, chirps {} / {} ps^2, gate {} ps\n\n",
                       s.sigma_s, s.sigma_i, s.rho, s.chirp_s, s.chirp_i, s.tau_g);
  }
  for (const auto& d : report.distributions) {
    const FitSummary& f = d.fit;
    out += fmt::format("{}  [{} x {}]\n", d.name, to_string(d.grid.signal.kind),
                       to_string(d.grid.idler.kind));
    out += fmt::format("  {:<14} {:>24} {:>24}  {}\n", "quantity", "raw", "deconvolved", "unit");
    auto row = [&](const char* name, double raw, double err, double dec, double dec_err,
                   const char* unit) {
      out += fmt::format("  {:<14} {:>24} {:>24}  {}\n", name, fmt_value(raw, err),
                         fmt_value(dec, dec_err), unit);
    };
    for (std::size_t k = 0; k < std::size(kEntries); ++k) {
      if (!get(f.raw, k)) continue;
      row(kEntries[k].name, *get(f.raw, k), *get(f.raw_error, k), *get(f.deconvolved, k),
          *get(f.deconvolved_error, k), unit_of(d.grid.axis(kEntries[k].unit_axis).kind));
    }
    row("correlation", f.raw.rho, f.raw_error.rho, f.deconvolved.rho, f.deconvolved_error.rho, "1");
    if (f.rho_clamped) out += "  note: deconvolved correlation clamped inside (-1, 1)\n";
    out += "\n";
  }
  if (!report.witnesses.empty()) out += witness_table(report.witnesses);
  return out;
}

std::string witnesses_json(const std::vector<WitnessReport>& witnesses) {
  ordered_json j = ordered_json::array();
  for (const auto& w : witnesses) j.push_back(witness_json(w));
  return j.dump(2) + "\n";
}

std::string witness_table(const std::vector<WitnessReport>& witnesses) {
  std::string out = fmt::format("  {:<34} {:>22} {:>10}  {:<5} {:<13} {:>9}\n", "witness", "value",
                                "threshold", "unit", "verdict", "sigma");
  for (const auto& w : witnesses) {
    out += fmt::format("  {:<34} {:>22} {:>10.4g}  {:<5} {:<13} {:>9.3g}\n", w.name,
                       fmt_value(w.value, w.error), w.threshold, witness_unit(w),
                       to_string(w.verdict), w.sigma_distance);
  }
  return out;
}

}  // namespace biphoton::cli
