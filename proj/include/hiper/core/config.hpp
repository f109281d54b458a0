#pragma once

#include <map>
#include <string>

namespace hiper {

// INI-style configuration: [section] headers with key = value lines.
// Unset keys fall back to the caller's default, so the compiled-in
// defaults stay authoritative and a config file only overrides.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace hiper
