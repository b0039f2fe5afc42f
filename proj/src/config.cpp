#include "gcs/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace gcs {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    auto& sec = cfg.sections_[section];
    if (sec.count(key))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                        "' in section [" + section + "]");
    sec[key] = {value, lineno};
  }
  return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::vector<std::string> Config::keys(const std::string& section) const {
  std::vector<std::string> out;
  auto s = sections_.find(section);
  if (s == sections_.end()) return out;
  for (const auto& [k, v] : s->second) out.push_back(k);
  return out;
}

const Config::Value& Config::lookup(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end())
    throw ConfigError(origin_ + ": missing section [" + section + "]");
  auto k = s->second.find(key);
  if (k == s->second.end())
    throw ConfigError(origin_ + ": missing field '" + key + "' in section [" + section + "]");
  return k->second;
}

void Config::fail(const Value& v, const std::string& section, const std::string& key,
                  const std::string& what) const {
  throw ConfigError(origin_ + ":" + std::to_string(v.line) + ": field '" + key +
                    "' in section [" + section + "]: " + what);
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  return lookup(section, key).text;
}

Real Config::get_real(const std::string& section, const std::string& key) const {
  const Value& v = lookup(section, key);
  try {
    size_t pos = 0;
    const Real x = std::stod(v.text, &pos);
    if (pos != v.text.size()) fail(v, section, key, "trailing characters after number");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(v, section, key, "not a number: '" + v.text + "'");
  }
}

int Config::get_int(const std::string& section, const std::string& key) const {
  const Value& v = lookup(section, key);
  try {
    size_t pos = 0;
    const int x = std::stoi(v.text, &pos);
    if (pos != v.text.size()) fail(v, section, key, "trailing characters after integer");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(v, section, key, "not an integer: '" + v.text + "'");
  }
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
  const Value& v = lookup(section, key);
  std::string t = v.text;
  std::transform(t.begin(), t.end(), t.begin(), ::tolower);
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  fail(v, section, key, "not a boolean: '" + v.text + "'");
}

RealVector Config::get_vector(const std::string& section, const std::string& key) const {
  const Value& v = lookup(section, key);
  std::istringstream in(v.text);
  std::vector<Real> vals;
  std::string tok;
  while (in >> tok) {
    try {
      vals.push_back(std::stod(tok));
    } catch (const std::exception&) {
      fail(v, section, key, "not a number: '" + tok + "'");
    }
  }
  if (vals.empty()) fail(v, section, key, "empty vector");
  RealVector out(vals.size());
  for (size_t i = 0; i < vals.size(); ++i) out[static_cast<int>(i)] = vals[i];
  return out;
}

RealMatrix Config::get_matrix(const std::string& section, const std::string& key) const {
  const Value& v = lookup(section, key);
  std::vector<std::vector<Real>> rows;
  std::istringstream in(v.text);
  std::string row_text;
  while (std::getline(in, row_text, ';')) {
    std::istringstream rin(row_text);
    std::vector<Real> row;
    std::string tok;
    while (rin >> tok) {
      try {
        row.push_back(std::stod(tok));
      } catch (const std::exception&) {
        fail(v, section, key, "not a number: '" + tok + "'");
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(v, section, key, "empty matrix");
  const size_t cols = rows[0].size();
  for (const auto& r : rows)
    if (r.size() != cols) fail(v, section, key, "ragged matrix rows");
  RealMatrix out(rows.size(), cols);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols; ++j) out(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  return out;
}

std::string Config::get_string_or(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

Real Config::get_real_or(const std::string& section, const std::string& key, Real fallback) const {
  return has(section, key) ? get_real(section, key) : fallback;
}

int Config::get_int_or(const std::string& section, const std::string& key, int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool_or(const std::string& section, const std::string& key, bool fallback) const {
  return has(section, key) ? get_bool(section, key) : fallback;
}

}  // namespace gcs
