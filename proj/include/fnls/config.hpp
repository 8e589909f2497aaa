#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fnls {

/// Flat key-value configuration with dotted section names:
///   time.dt0 = 1e-3
///   init.kind = gaussian
/// '#' starts a comment; blank lines are ignored. Later keys override
/// earlier ones. Lookup failures and parse failures throw ConfigError,
/// which the CLI maps to exit status 64.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Config {
public:
  Config() = default;
  explicit Config(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  const std::string& get(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Comma-separated list of doubles (sweep axes).
  std::vector<double> get_list(const std::string& key) const;

  void set(const std::string& key, std::string value) { kv_[key] = std::move(value); }

  const std::map<std::string, std::string>& items() const { return kv_; }

private:
  std::map<std::string, std::string> kv_;
};

Config parse_config(const std::string& text);
Config parse_config_file(const std::string& path);

} // namespace fnls
