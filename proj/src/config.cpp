#include "snetfdr/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <fmt/format.h>

namespace snetfdr {
namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::islower(c) || std::isdigit(c) || c == '_' || c == '-';
  });
}

// A comment marker counts only at line start or after whitespace, so values
// such as "E3" or paths keep any '#' that is glued to other text.
std::string_view strip_comment(std::string_view line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if ((line[i] == '#' || line[i] == ';') &&
        (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
      return line.substr(0, i);
    }
  }
  return line;
}

std::string render(const std::string& source, const std::vector<ConfigDiagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += '\n';
    out += d.line > 0 ? fmt::format("{}:{}: {}", source, d.line, d.message)
                      : fmt::format("{}: {}", source, d.message);
  }
  return out;
}

double to_double(std::string_view text, const ConfigEntry& e) {
  text = trim(text);
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc{} || ptr != last || std::isnan(v)) {
    throw ConfigError(fmt::format("key '{}': '{}' is not a number", e.key, text));
  }
  return v;
}

}  // namespace

ConfigFileError::ConfigFileError(std::string source, std::vector<ConfigDiagnostic> diagnostics)
    : ConfigError(render(source, diagnostics)),
      source_(std::move(source)),
      diagnostics_(std::move(diagnostics)) {}

ConfigDocument ConfigDocument::parse(std::string_view text, std::string source) {
  ConfigDocument doc;
  doc.source_ = std::move(source);
  std::vector<ConfigDiagnostic> diags;
  std::set<std::pair<std::string, std::string>> seen;
  std::string section;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const auto line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        diags.push_back({line_no, "section header is missing its closing ']'"});
        continue;
      }
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!is_identifier(name)) {
        diags.push_back({line_no, fmt::format("invalid section name '{}'", name)});
        continue;
      }
      section = std::string(name);
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      diags.push_back({line_no, fmt::format("expected 'key = value', got '{}'", line)});
      continue;
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!is_identifier(key)) {
      diags.push_back({line_no, fmt::format("invalid key '{}'", key)});
      continue;
    }
    if (section.empty()) {
      diags.push_back({line_no, fmt::format("key '{}' appears before any [section]", key)});
      continue;
    }
    if (value.empty()) {
      diags.push_back({line_no, fmt::format("key '{}' has no value", key)});
      continue;
    }
    if (!seen.emplace(section, std::string(key)).second) {
      diags.push_back({line_no, fmt::format("duplicate key '{}' in [{}]", key, section)});
      continue;
    }
    doc.entries_.push_back({section, std::string(key), std::string(value), line_no});
  }

  if (!diags.empty()) throw ConfigFileError(doc.source_, std::move(diags));
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigFileError(path.string(), {{0, "cannot open file for reading"}});
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

double parse_double(const ConfigEntry& e) { return to_double(e.value, e); }

std::uint64_t parse_unsigned(const ConfigEntry& e) {
  const auto text = trim(e.value);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(
        fmt::format("key '{}': '{}' is not a non-negative integer", e.key, text));
  }
  return v;
}

bool parse_bool(const ConfigEntry& e) {
  const auto v = trim(e.value);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(fmt::format("key '{}': '{}' is not a boolean", e.key, v));
}

std::vector<double> parse_double_list(const ConfigEntry& e) {
  const std::string_view text = e.value;
  if (text.find(':') != std::string_view::npos) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == ':') {
        parts.push_back(text.substr(start, i - start));
        start = i + 1;
      }
    }
    if (parts.size() != 3) {
      throw ConfigError(fmt::format("key '{}': a range needs the form start:stop:step", e.key));
    }
    const double a = to_double(parts[0], e);
    const double b = to_double(parts[1], e);
    const double step = to_double(parts[2], e);
    if (!(step > 0.0) || !(b >= a) || !std::isfinite(b)) {
      throw ConfigError(fmt::format("key '{}': range needs start <= stop and step > 0", e.key));
    }
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    if (n > 1000000) throw ConfigError(fmt::format("key '{}': range is too long", e.key));
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Rounded to 12 significant digits so 0.1:0.9:0.1 yields 0.3, not 0.30000000000000004.
      const double raw = a + static_cast<double>(i) * step;
      out[i] = std::stod(fmt::format("{:.12g}", raw));
    }
    return out;
  }
  std::vector<double> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      out.push_back(to_double(text.substr(start, i - start), e));
      start = i + 1;
    }
  }
  return out;
}

std::vector<std::string> parse_word_list(const ConfigEntry& e) {
  std::vector<std::string> out;
  std::size_t start = 0;
  const std::string_view text = e.value;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      const auto w = trim(text.substr(start, i - start));
      if (w.empty()) throw ConfigError(fmt::format("key '{}': empty list item", e.key));
      out.emplace_back(w);
      start = i + 1;
    }
  }
  return out;
}

}  // namespace snetfdr
