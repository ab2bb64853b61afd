#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace monost {

// Flat configuration file:
//
//   # comment
//   [section]
//   key = value
//
// Keys outside any section live in section "". Every key must be consumed by
// one of the getters before finish(), which rejects leftovers so that typos
// fail loudly.
class ConfigReader {
 public:
  static ConfigReader parse(std::istream& in, const std::string& source_name = "<config>");
  static ConfigReader load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback);
  std::optional<std::string> get_optional(const std::string& section, const std::string& key);
  std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t fallback);
  std::uint64_t get_uint(const std::string& section, const std::string& key, std::uint64_t fallback);
  double get_double(const std::string& section, const std::string& key, double fallback);
  bool get_bool(const std::string& section, const std::string& key, bool fallback);
  // Relative paths are resolved against the directory of the config file.
  std::filesystem::path get_path(const std::string& section, const std::string& key,
                                 const std::filesystem::path& fallback = {});

  // Throws FormatError naming every key no getter asked for.
  void finish() const;

  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };
  const Entry* lookup(const std::string& section, const std::string& key);
  [[noreturn]] void bad_value(const std::string& section, const std::string& key, const Entry& e,
                              const std::string& expected) const;

  std::string source_;
  std::filesystem::path base_dir_;
  std::map<std::pair<std::string, std::string>, Entry> entries_;
  std::set<std::pair<std::string, std::string>> used_;
};

}  // namespace monost
