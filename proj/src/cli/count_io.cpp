#include "biphoton/cli/count_io.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "biphoton/cli/ini.hpp"

namespace biphoton::cli {

namespace {

void write_axis(std::ostream& out, const char* name, const Axis& a) {
  fmt::print(out, "# {}.kind: {}\n", name, to_string(a.kind));
  fmt::print(out, "# {}.unit: {}\n", name, unit_of(a.kind));
  fmt::print(out, "# {}.center: {:.17g}\n", name, a.center);
  fmt::print(out, "# {}.step: {:.17g}\n", name, a.step);
  fmt::print(out, "# {}.n: {}\n", name, a.n);
}

}  // namespace

void write_counts_csv(std::ostream& out, const CountGrid& counts) {
  fmt::print(out, "# format: {}\n", kCountGridFormat);
  write_axis(out, "signal", counts.grid.signal);
  write_axis(out, "idler", counts.grid.idler);
  fmt::print(out, "# total_expected: {:.17g}\n", counts.total_expected);
  fmt::print(out, "# seed: {}\n", counts.seed);
  fmt::print(out, "# generator: {}\n", counts.generator);
  std::string line;
  for (int j = 0; j < counts.grid.signal.n; ++j) {
    line.clear();
    for (int k = 0; k < counts.grid.idler.n; ++k) {
      if (k) line += ',';
      line += std::to_string(counts.at(j, k));
    }
    line += '\n';
    out << line;
  }
}

CountGrid read_counts_csv(std::istream& in, const std::string& source) {
  std::map<std::string, std::pair<std::string, int>> header;
  std::vector<std::vector<std::uint64_t>> rows;
  std::string line;
  int line_no = 0;
  auto fail = [&](int ln, const std::string& what) {
    throw ConfigError(source + ":" + std::to_string(ln) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (!rows.empty()) fail(line_no, "header line after data");
      const std::size_t colon = line.find(':');
      if (colon == std::string::npos) fail(line_no, "header line without ':'");
      std::string key = line.substr(1, colon - 1);
      std::string value = line.substr(colon + 1);
      auto strip = [](std::string& s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t") + 1);
      };
      strip(key);
      strip(value);
      if (header.count(key)) fail(line_no, "duplicate header key '" + key + "'");
      header[key] = {value, line_no};
      continue;
    }
    std::vector<std::uint64_t> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) fail(line_no, "expected a non-negative integer count");
      row.push_back(v);
      p = ptr;
      if (p == end) break;
      if (*p != ',') fail(line_no, "expected ',' between counts");
      ++p;
    }
    rows.push_back(std::move(row));
  }

  static const char* const known[] = {
      "format",       "signal.kind", "signal.unit",  "signal.center",  "signal.step",
      "signal.n",     "idler.kind",  "idler.unit",   "idler.center",   "idler.step",
      "idler.n",      "seed",        "generator",    "total_expected"};
  for (const auto& [key, v] : header) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      fail(v.second, "unknown header key '" + key + "'");
    }
  }
  auto get = [&](const std::string& key) -> const std::pair<std::string, int>& {
    const auto it = header.find(key);
    if (it == header.end()) throw ConfigError(source + ": missing header key '" + key + "'");
    return it->second;
  };
  auto number = [&](const std::string& key) {
    const auto& [text, ln] = get(key);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
      fail(ln, key + ": '" + text + "' is not a finite number");
    }
    return v;
  };
  auto integer = [&](const std::string& key) {
    const auto& [text, ln] = get(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      fail(ln, key + ": '" + text + "' is not a non-negative integer");
    }
    return v;
  };

  if (get("format").first != kCountGridFormat) {
    fail(get("format").second, "unsupported format '" + get("format").first + "'");
  }
  auto axis = [&](const std::string& name) {
    Axis a;
    const auto& [kind, ln] = get(name + ".kind");
    try {
      a.kind = axis_kind_from_string(kind);
    } catch (const std::exception& e) {
      fail(ln, e.what());
    }
    if (header.count(name + ".unit") && header[name + ".unit"].first != unit_of(a.kind)) {
      fail(header[name + ".unit"].second, "unit does not match axis kind");
    }
    a.center = number(name + ".center");
    a.step = number(name + ".step");
    const std::uint64_t n = integer(name + ".n");
    if (n > 1u << 20) fail(get(name + ".n").second, "axis too long");
    a.n = static_cast<int>(n);
    try {
      validate(a);
    } catch (const std::exception& e) {
      fail(get(name + ".n").second, e.what());
    }
    return a;
  };

  CountGrid out;
  out.grid = Grid2D{axis("signal"), axis("idler")};
  out.total_expected = header.count("total_expected") ? number("total_expected") : 0.0;
  out.seed = header.count("seed") ? integer("seed") : 0;
  out.generator = header.count("generator") ? get("generator").first : std::string();

  if (rows.size() != static_cast<std::size_t>(out.grid.signal.n)) {
    throw ConfigError(source + ": expected " + std::to_string(out.grid.signal.n) +
                      " data rows, found " + std::to_string(rows.size()));
  }
  out.counts.reserve(out.grid.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != static_cast<std::size_t>(out.grid.idler.n)) {
      throw ConfigError(source + ": data row " + std::to_string(j + 1) + " has " +
                        std::to_string(rows[j].size()) + " columns, expected " +
                        std::to_string(out.grid.idler.n));
    }
    out.counts.insert(out.counts.end(), rows[j].begin(), rows[j].end());
  }
  return out;
}

void write_counts_file(const std::filesystem::path& path, const CountGrid& counts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_counts_csv(out, counts);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

CountGrid read_counts_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open counts file " + path.string());
  return read_counts_csv(in, path.string());
}

void write_hist_csv(std::ostream& out, const Hist1D& hist) {
  fmt::print(out, "# kind: {}\n", to_string(hist.kind));
  fmt::print(out, "# unit: {}\n", unit_of(hist.kind));
  for (std::size_t k = 0; k < hist.size(); ++k) {
    fmt::print(out, "{:.17g},{:.17g}\n", hist.center(k), hist.weights[k]);
  }
}

}  // namespace biphoton::cli
