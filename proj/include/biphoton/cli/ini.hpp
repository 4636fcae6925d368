#pragma once

// Minimal INI reader: [section] headers, key = value pairs, full-line and
// trailing comments introduced by '#' or ';'. Every error names the source
// and line.

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace biphoton::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IniValue {
  std::string text;
  int line = 0;
};

using IniSection = std::map<std::string, IniValue>;

struct IniDocument {
  std::string source;
  std::map<std::string, IniSection> sections;
};

IniDocument parse_ini(std::string_view text, std::string source);

}  // namespace biphoton::cli
