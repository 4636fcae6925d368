#include "biphoton/cli/ini.hpp"

#include <cctype>

namespace biphoton::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_comment(std::string_view s) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    if ((s[k] == '#' || s[k] == ';') &&
        (k == 0 || std::isspace(static_cast<unsigned char>(s[k - 1])))) {
      return s.substr(0, k);
    }
  }
  return s;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.' && c != '-') return false;
  }
  return true;
}

}  // namespace

IniDocument parse_ini(std::string_view text, std::string source) {
  IniDocument doc;
  doc.source = std::move(source);
  auto fail = [&](int line, const std::string& what) {
    throw ConfigError(doc.source + ":" + std::to_string(line) + ": " + what);
  };

  IniSection* current = nullptr;
  std::string current_name;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    line = trim(strip_comment(line));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (!valid_name(name)) fail(line_no, "invalid section name '" + std::string(name) + "'");
      current_name = std::string(name);
      if (doc.sections.count(current_name)) fail(line_no, "duplicate section [" + current_name + "]");
      current = &doc.sections[current_name];
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!valid_name(key)) fail(line_no, "invalid key '" + key + "'");
    if (current == nullptr) fail(line_no, "key '" + key + "' appears before any [section]");
    if (value.empty()) fail(line_no, "key '" + key + "' has no value");
    if (current->count(key)) fail(line_no, "duplicate key '" + key + "' in [" + current_name + "]");
    (*current)[key] = IniValue{std::string(value), line_no};
  }
  return doc;
}

}  // namespace biphoton::cli
