#pragma once

#include <map>
#include <string>
#include <vector>

#include "gearsound/errors.hpp"

namespace gearsound {

// Minimal TOML subset: [section] headers, key = value with strings,
// integers, floats, booleans and flat arrays, # comments. Keys are exposed
// flattened as "section.key". Enough for the documented config surface;
// not a general TOML implementation.
class TomlTable {
 public:
  static TomlTable parse(const std::string& text);
  static TomlTable parse_file(const std::string& path);

  bool contains(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_double_array(const std::string& key) const;
  std::vector<std::string> get_string_array(const std::string& key) const;

  // Keys actually present, flattened; used to reject unknown keys.
  std::vector<std::string> keys() const;

 private:
  struct Value {
    enum class Type { boolean, integer, floating, string, array_number, array_string };
    Type type = Type::string;
    bool b = false;
    long long i = 0;
    double d = 0.0;
    std::string s;
    std::vector<double> numbers;
    std::vector<std::string> strings;
  };
  std::map<std::string, Value> values_;

  const Value* find(const std::string& key) const;
};

}  // namespace gearsound
