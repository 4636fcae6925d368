#include "biphoton/cli/scenario.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace biphoton::cli {

namespace {

const std::vector<std::pair<std::string, std::string>>& presets() {
  static const auto table = [] {
    const auto make = [](const char* name, const char* chirp_s, const char* chirp_i) {
      return fmt::format(R"([state]
sigma_s = 10.56
sigma_i = 9.69
rho = -0.9951
omega0_s = 2586.9
omega0_i = 2276.9
chirp_s = {1}
chirp_i = {2}

[gate]
tau_g = 0.120

[instrument]
spectral_res_s_nm = 0.081
spectral_res_i_nm = 0.135
wavelength_s_nm = 728.6
wavelength_i_nm = 827.3

[grid]
half_span = 4
n = 128

[run]
name = {0}
total_counts = 1e6
mc_trials = 100
seed = 2018
k_sigma = 3
)",
                         name, chirp_s, chirp_i);
    };
    return std::vector<std::pair<std::string, std::string>>{
        {"table1", make("table1", "0", "0")},
        {"fig4a", make("fig4a", "0", "0")},
        {"fig4b", make("fig4b", "0.0373", "0")},
        {"fig4c", make("fig4c", "0", "-0.0359")},
        {"fig4d", make("fig4d", "0.0373", "-0.0359")},
    };
  }();
  return table;
}

struct Field {
  const char* section;
  const char* key;
  bool required;
  std::function<void(Scenario&, const std::string&)> set;
};

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument("'" + s + "' is not a finite number");
  }
  return v;
}

std::int64_t parse_int(const std::string& s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("'" + s + "' is not an integer");
  }
  return v;
}

std::uint64_t parse_seed(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("'" + s + "' is not an unsigned 64-bit integer");
  }
  return v;
}

double positive(const std::string& s) {
  const double v = parse_double(s);
  if (!(v > 0.0)) throw std::invalid_argument("must be positive, got " + s);
  return v;
}

double non_negative(const std::string& s) {
  const double v = parse_double(s);
  if (!(v >= 0.0)) throw std::invalid_argument("must be non-negative, got " + s);
  return v;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"state", "sigma_s", true, [](Scenario& c, const std::string& v) { c.sigma_s = positive(v); }},
      {"state", "sigma_i", true, [](Scenario& c, const std::string& v) { c.sigma_i = positive(v); }},
      {"state", "rho", true,
       [](Scenario& c, const std::string& v) {
         c.rho = parse_double(v);
         if (!(std::abs(c.rho) < 1.0)) throw std::invalid_argument("|rho| must be below 1");
       }},
      {"state", "omega0_s", true, [](Scenario& c, const std::string& v) { c.omega0_s = non_negative(v); }},
      {"state", "omega0_i", true, [](Scenario& c, const std::string& v) { c.omega0_i = non_negative(v); }},
      {"state", "chirp_s", false, [](Scenario& c, const std::string& v) { c.chirp_s = parse_double(v); }},
      {"state", "chirp_i", false, [](Scenario& c, const std::string& v) { c.chirp_i = parse_double(v); }},
      {"state", "displacement_s_mm", false,
       [](Scenario& c, const std::string& v) {
         c.chirp_s = displacement_to_chirp(parse_double(v), Photon::Signal);
       }},
      {"state", "displacement_i_mm", false,
       [](Scenario& c, const std::string& v) {
         c.chirp_i = displacement_to_chirp(parse_double(v), Photon::Idler);
       }},
      {"gate", "tau_g", true, [](Scenario& c, const std::string& v) { c.tau_g = positive(v); }},
      {"gate", "omega_g0", false, [](Scenario& c, const std::string& v) { c.omega_g0 = non_negative(v); }},
      {"instrument", "spectral_res_s_nm", true,
       [](Scenario& c, const std::string& v) { c.spectral_res_s_nm = non_negative(v); }},
      {"instrument", "spectral_res_i_nm", true,
       [](Scenario& c, const std::string& v) { c.spectral_res_i_nm = non_negative(v); }},
      {"instrument", "wavelength_s_nm", false,
       [](Scenario& c, const std::string& v) { c.wavelength_s_nm = positive(v); }},
      {"instrument", "wavelength_i_nm", false,
       [](Scenario& c, const std::string& v) { c.wavelength_i_nm = positive(v); }},
      {"grid", "half_span", false, [](Scenario& c, const std::string& v) { c.half_span = positive(v); }},
      {"grid", "n", false,
       [](Scenario& c, const std::string& v) {
         const auto n = parse_int(v);
         if (n < 8 || n > 8192) throw std::invalid_argument("n must be in [8, 8192]");
         c.n = static_cast<int>(n);
       }},
      {"run", "name", true, [](Scenario& c, const std::string& v) { c.name = v; }},
      {"run", "total_counts", true,
       [](Scenario& c, const std::string& v) { c.total_counts = non_negative(v); }},
      {"run", "mc_trials", true,
       [](Scenario& c, const std::string& v) {
         const auto n = parse_int(v);
         if (n < 50) throw std::invalid_argument("mc_trials must be at least 50");
         c.mc_trials = static_cast<int>(n);
       }},
      {"run", "seed", true, [](Scenario& c, const std::string& v) { c.seed = parse_seed(v); }},
      {"run", "k_sigma", false, [](Scenario& c, const std::string& v) { c.k_sigma = non_negative(v); }},
      {"run", "herald_min_fraction", false,
       [](Scenario& c, const std::string& v) {
         const double f = positive(v);
         if (f > 1.0) throw std::invalid_argument("herald_min_fraction must be in (0, 1]");
         c.policy.min_fraction = f;
       }},
      {"run", "herald_min_slices", false,
       [](Scenario& c, const std::string& v) {
         const auto n = parse_int(v);
         if (n < 2) throw std::invalid_argument("herald_min_slices must be at least 2");
         c.policy.min_slices = static_cast<int>(n);
       }},
  };
  return table;
}

}  // namespace

BiphotonState Scenario::state() const {
  return make_state(sigma_s, sigma_i, rho, omega0_s, omega0_i, chirp_s, chirp_i);
}

GatePulse Scenario::gate() const { return GatePulse(tau_g, omega_g0); }

double Scenario::wavelength_s() const {
  return wavelength_s_nm ? *wavelength_s_nm : 2.0 * std::numbers::pi * kSpeedOfLight / omega0_s;
}

double Scenario::wavelength_i() const {
  return wavelength_i_nm ? *wavelength_i_nm : 2.0 * std::numbers::pi * kSpeedOfLight / omega0_i;
}

InstrumentResponse Scenario::spectral_response() const {
  return {angfreq_resolution(wavelength_s(), spectral_res_s_nm),
          angfreq_resolution(wavelength_i(), spectral_res_i_nm)};
}

Scenario scenario_from_ini(const IniDocument& doc, const Scenario* base) {
  Scenario out = base ? *base : Scenario{};

  for (const auto& [section, entries] : doc.sections) {
    for (const auto& [key, value] : entries) {
      const bool known = std::any_of(fields().begin(), fields().end(), [&](const Field& f) {
        return section == f.section && key == f.key;
      });
      if (!known) {
        throw ConfigError(doc.source + ":" + std::to_string(value.line) + ": unknown key '" + key +
                          "' in [" + section + "]");
      }
    }
  }

  auto find = [&](const char* section, const char* key) -> const IniValue* {
    const auto s = doc.sections.find(section);
    if (s == doc.sections.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };

  for (const char* side : {"s", "i"}) {
    const std::string chirp = std::string("chirp_") + side;
    const std::string disp = std::string("displacement_") + side + "_mm";
    if (find("state", chirp.c_str()) && find("state", disp.c_str())) {
      throw ConfigError(doc.source + ":" + std::to_string(find("state", disp.c_str())->line) +
                        ": give either " + chirp + " or " + disp + ", not both");
    }
  }

  std::vector<std::string> missing;
  for (const Field& f : fields()) {
    const IniValue* v = find(f.section, f.key);
    if (!v) {
      if (f.required && !base) missing.push_back(std::string("[") + f.section + "] " + f.key);
      continue;
    }
    try {
      f.set(out, v->text);
    } catch (const std::exception& e) {
      throw ConfigError(doc.source + ":" + std::to_string(v->line) + ": " + f.key + ": " + e.what());
    }
  }
  if (!missing.empty()) {
    std::string msg = doc.source + ": missing required keys:";
    for (const auto& m : missing) msg += "\n  " + m;
    throw ConfigError(msg);
  }

  try {
    (void)out.state();
    (void)out.gate();
    (void)out.spectral_response();
  } catch (const std::exception& e) {
    throw ConfigError(doc.source + ": " + e.what());
  }
  return out;
}

Scenario load_scenario(const std::filesystem::path& path, const Scenario* base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return scenario_from_ini(parse_ini(text.str(), path.string()), base);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : presets()) names.push_back(p.first);
  return names;
}

const std::string& preset_text(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.first == name) return p.second;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

Scenario preset(const std::string& name) {
  return scenario_from_ini(parse_ini(preset_text(name), "preset " + name));
}

std::string to_ini(const Scenario& s) {
  std::string out;
  auto line = [&](const char* key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  auto num = [](double v) { return fmt::format("{}", v); };
  out += "[state]\n";
  line("sigma_s", num(s.sigma_s));
  line("sigma_i", num(s.sigma_i));
  line("rho", num(s.rho));
  line("omega0_s", num(s.omega0_s));
  line("omega0_i", num(s.omega0_i));
  line("chirp_s", num(s.chirp_s));
  line("chirp_i", num(s.chirp_i));
  out += "\n[gate]\n";
  line("tau_g", num(s.tau_g));
  line("omega_g0", num(s.omega_g0));
  out += "\n[instrument]\n";
  line("spectral_res_s_nm", num(s.spectral_res_s_nm));
  line("spectral_res_i_nm", num(s.spectral_res_i_nm));
  if (s.wavelength_s_nm) line("wavelength_s_nm", num(*s.wavelength_s_nm));
  if (s.wavelength_i_nm) line("wavelength_i_nm", num(*s.wavelength_i_nm));
  out += "\n[grid]\n";
  line("half_span", num(s.half_span));
  line("n", std::to_string(s.n));
  out += "\n[run]\n";
  line("name", s.name);
  line("total_counts", num(s.total_counts));
  line("mc_trials", std::to_string(s.mc_trials));
  line("seed", std::to_string(s.seed));
  line("k_sigma", num(s.k_sigma));
  line("herald_min_fraction", num(s.policy.min_fraction));
  line("herald_min_slices", std::to_string(s.policy.min_slices));
  return out;
}

}  // namespace biphoton::cli
