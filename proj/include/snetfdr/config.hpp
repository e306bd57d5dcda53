#pragma once

// Flat "key = value" files grouped under [section] headers. Comments start
// with '#' or ';'. The parser only checks syntax; the experiment layer decides
// which keys exist and reports unknown ones with their line numbers.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "snetfdr/errors.hpp"

namespace snetfdr {

struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  std::size_t line = 0;
};

struct ConfigDiagnostic {
  std::size_t line = 0;  // 0 when the problem is not tied to a line
  std::string message;
};

/// Carries every problem found in a config file, not just the first.
class ConfigFileError : public ConfigError {
 public:
  ConfigFileError(std::string source, std::vector<ConfigDiagnostic> diagnostics);

  const std::string& source() const noexcept { return source_; }
  const std::vector<ConfigDiagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string source_;
  std::vector<ConfigDiagnostic> diagnostics_;
};

class ConfigDocument {
 public:
  static ConfigDocument parse(std::string_view text, std::string source = "<config>");
  static ConfigDocument load(const std::filesystem::path& path);

  const std::vector<ConfigEntry>& entries() const noexcept { return entries_; }
  const std::string& source() const noexcept { return source_; }

 private:
  std::string source_;
  std::vector<ConfigEntry> entries_;
};

// Value parsers. Each throws ConfigError with a message naming the key; the
// caller attaches the line.
double parse_double(const ConfigEntry& e);
std::uint64_t parse_unsigned(const ConfigEntry& e);
bool parse_bool(const ConfigEntry& e);
/// Comma-separated list, or an inclusive range "start:stop:step".
std::vector<double> parse_double_list(const ConfigEntry& e);
std::vector<std::string> parse_word_list(const ConfigEntry& e);

}  // namespace snetfdr
