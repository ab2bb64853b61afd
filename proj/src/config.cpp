#include "monost/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

#include "monost/error.hpp"

namespace monost {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

template <class T>
bool parse_number(const std::string& s, T& out) {
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

ConfigReader ConfigReader::parse(std::istream& in, const std::string& source_name) {
  ConfigReader cfg;
  cfg.source_ = source_name;
  std::string section;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? std::string_view(raw) : std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto where = source_name + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError(where + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) throw FormatError(where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(where + ": expected 'key = value'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw FormatError(where + ": empty key");
    auto [it, inserted] = cfg.entries_.try_emplace({section, key}, Entry{value, lineno});
    if (!inserted) throw FormatError(where + ": duplicate key '" + key + "' (first set on line " + std::to_string(it->second.line) + ")");
  }
  return cfg;
}

ConfigReader ConfigReader::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config: " + path.string());
  ConfigReader cfg = parse(in, path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

bool ConfigReader::has(const std::string& section, const std::string& key) const {
  return entries_.contains({section, key});
}

const ConfigReader::Entry* ConfigReader::lookup(const std::string& section, const std::string& key) {
  const auto it = entries_.find({section, key});
  if (it == entries_.end()) return nullptr;
  used_.insert({section, key});
  return &it->second;
}

void ConfigReader::bad_value(const std::string& section, const std::string& key, const Entry& e,
                             const std::string& expected) const {
  throw FormatError(source_ + ":" + std::to_string(e.line) + ": [" + section + "] " + key + " = '" + e.value +
                    "' is not " + expected);
}

std::string ConfigReader::get_string(const std::string& section, const std::string& key, const std::string& fallback) {
  const Entry* e = lookup(section, key);
  return e ? e->value : fallback;
}

std::optional<std::string> ConfigReader::get_optional(const std::string& section, const std::string& key) {
  const Entry* e = lookup(section, key);
  if (!e) return std::nullopt;
  return e->value;
}

std::int64_t ConfigReader::get_int(const std::string& section, const std::string& key, std::int64_t fallback) {
  const Entry* e = lookup(section, key);
  if (!e) return fallback;
  std::int64_t v = 0;
  if (!parse_number(e->value, v)) bad_value(section, key, *e, "an integer");
  return v;
}

std::uint64_t ConfigReader::get_uint(const std::string& section, const std::string& key, std::uint64_t fallback) {
  const Entry* e = lookup(section, key);
  if (!e) return fallback;
  std::uint64_t v = 0;
  if (!parse_number(e->value, v)) bad_value(section, key, *e, "a non-negative integer");
  return v;
}

double ConfigReader::get_double(const std::string& section, const std::string& key, double fallback) {
  const Entry* e = lookup(section, key);
  if (!e) return fallback;
  double v = 0;
  if (!parse_number(e->value, v)) bad_value(section, key, *e, "a number");
  return v;
}

bool ConfigReader::get_bool(const std::string& section, const std::string& key, bool fallback) {
  const Entry* e = lookup(section, key);
  if (!e) return fallback;
  std::string v = e->value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  bad_value(section, key, *e, "a boolean");
}

std::filesystem::path ConfigReader::get_path(const std::string& section, const std::string& key,
                                             const std::filesystem::path& fallback) {
  const Entry* e = lookup(section, key);
  if (!e) return fallback;
  if (e->value.empty()) return {};
  std::filesystem::path p(e->value);
  return p.is_absolute() || base_dir_.empty() ? p : base_dir_ / p;
}

void ConfigReader::finish() const {
  std::string unknown;
  for (const auto& [k, e] : entries_) {
    if (used_.contains(k)) continue;
    unknown += "\n  " + source_ + ":" + std::to_string(e.line) + ": [" + k.first + "] " + k.second;
  }
  if (!unknown.empty()) throw FormatError("unknown configuration keys:" + unknown);
}

}  // namespace monost
