#include "gearsound/toml.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace gearsound {

namespace {

std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Removes a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

bool parse_number(const std::string& text, double& d, long long& i, bool& is_int) {
  const std::string t = strip(text);
  if (t.empty()) return false;
  std::size_t pos = 0;
  try {
    if (t.find_first_of(".eE") == std::string::npos ||
        (t.find_first_of("eE") == std::string::npos &&
         t.find('.') == std::string::npos)) {
      i = std::stoll(t, &pos);
      if (pos == t.size()) {
        d = static_cast<double>(i);
        is_int = true;
        return true;
      }
    }
    pos = 0;
    d = std::stod(t, &pos);
    if (pos != t.size()) return false;
    is_int = false;
    i = static_cast<long long>(d);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

TomlTable TomlTable::parse(const std::string& text) {
  TomlTable table;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw InvalidConfig("line " + std::to_string(line_no) + ": unterminated section");
      }
      section = strip(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw InvalidConfig("line " + std::to_string(line_no) + ": empty section name");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw InvalidConfig("line " + std::to_string(line_no) + ": empty key or value");
    }
    const std::string full_key = section.empty() ? key : section + "." + key;

    Value v;
    if (value == "true" || value == "false") {
      v.type = Value::Type::boolean;
      v.b = value == "true";
    } else if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') {
        throw InvalidConfig("line " + std::to_string(line_no) + ": unterminated string");
      }
      v.type = Value::Type::string;
      v.s = value.substr(1, value.size() - 2);
    } else if (value.front() == '[') {
      if (value.back() != ']') {
        throw InvalidConfig("line " + std::to_string(line_no) + ": unterminated array");
      }
      const std::string body = value.substr(1, value.size() - 2);
      std::stringstream ss(body);
      std::string item;
      bool any_string = false;
      while (std::getline(ss, item, ',')) {
        const std::string it = strip(item);
        if (it.empty()) continue;
        if (it.front() == '"') {
          if (it.size() < 2 || it.back() != '"') {
            throw InvalidConfig("line " + std::to_string(line_no) + ": bad array string");
          }
          v.strings.push_back(it.substr(1, it.size() - 2));
          any_string = true;
        } else {
          double d = 0.0;
          long long i = 0;
          bool is_int = false;
          if (!parse_number(it, d, i, is_int)) {
            throw InvalidConfig("line " + std::to_string(line_no) + ": bad array item '" + it + "'");
          }
          v.numbers.push_back(d);
        }
      }
      if (any_string && !v.numbers.empty()) {
        throw InvalidConfig("line " + std::to_string(line_no) + ": mixed array types");
      }
      v.type = any_string ? Value::Type::array_string : Value::Type::array_number;
    } else {
      double d = 0.0;
      long long i = 0;
      bool is_int = false;
      if (!parse_number(value, d, i, is_int)) {
        throw InvalidConfig("line " + std::to_string(line_no) + ": cannot parse value '" +
                            value + "'");
      }
      v.type = is_int ? Value::Type::integer : Value::Type::floating;
      v.i = i;
      v.d = d;
    }
    table.values_[full_key] = std::move(v);
  }
  return table;
}

TomlTable TomlTable::parse_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoFailure("cannot open config: " + path);
  std::stringstream ss;
  ss << file.rdbuf();
  return parse(ss.str());
}

const TomlTable::Value* TomlTable::find(const std::string& key) const {
  auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

bool TomlTable::contains(const std::string& key) const { return find(key) != nullptr; }

double TomlTable::get_double(const std::string& key, double fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (v->type == Value::Type::floating) return v->d;
  if (v->type == Value::Type::integer) return static_cast<double>(v->i);
  throw InvalidConfig("key '" + key + "' is not a number");
}

long long TomlTable::get_int(const std::string& key, long long fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (v->type == Value::Type::integer) return v->i;
  throw InvalidConfig("key '" + key + "' is not an integer");
}

bool TomlTable::get_bool(const std::string& key, bool fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (v->type == Value::Type::boolean) return v->b;
  throw InvalidConfig("key '" + key + "' is not a boolean");
}

std::string TomlTable::get_string(const std::string& key,
                                  const std::string& fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (v->type == Value::Type::string) return v->s;
  throw InvalidConfig("key '" + key + "' is not a string");
}

std::vector<double> TomlTable::get_double_array(const std::string& key) const {
  const Value* v = find(key);
  if (!v) return {};
  if (v->type == Value::Type::array_number) return v->numbers;
  throw InvalidConfig("key '" + key + "' is not a numeric array");
}

std::vector<std::string> TomlTable::get_string_array(const std::string& key) const {
  const Value* v = find(key);
  if (!v) return {};
  if (v->type == Value::Type::array_string) return v->strings;
  if (v->type == Value::Type::array_number && v->numbers.empty()) return {};
  throw InvalidConfig("key '" + key + "' is not a string array");
}

std::vector<std::string> TomlTable::keys() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& [k, _] : values_) out.push_back(k);
  return out;
}

}  // namespace gearsound
