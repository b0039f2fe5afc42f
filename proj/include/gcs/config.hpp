#pragma once

#include "gcs/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gcs {

// Configuration file parse error; message carries line/field diagnostics.
struct ConfigError : Error {
  using Error::Error;
};

// Key-value text with [section] headers, '#' comments, vectors as
// space-separated numbers and matrices as ';'-separated rows.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  std::vector<std::string> keys(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  Real get_real(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key) const;
  RealVector get_vector(const std::string& section, const std::string& key) const;
  RealMatrix get_matrix(const std::string& section, const std::string& key) const;

  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  Real get_real_or(const std::string& section, const std::string& key, Real fallback) const;
  int get_int_or(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;

 private:
  struct Value {
    std::string text;
    int line = 0;
  };
  const Value& lookup(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const Value& v, const std::string& section, const std::string& key,
                         const std::string& what) const;
  std::map<std::string, std::map<std::string, Value>> sections_;
  std::string origin_;
};

}  // namespace gcs
