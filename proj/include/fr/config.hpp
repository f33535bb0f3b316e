#ifndef FR_CONFIG_HPP
#define FR_CONFIG_HPP

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fr/common.hpp"

namespace fr {

// ---------------------------------------------------------------------------
// Minimal TOML-style config reader: [tables], key = value, where value is a
// number, "string", """multiline string""", true/false, or a one-line array
// of numbers or strings. Comments start with '#'. Unknown keys are rejected
// at schema validation with their field path.
// ---------------------------------------------------------------------------

struct ConfigValue {
  std::variant<double, std::string, bool, std::vector<double>, std::vector<std::string>> v;

  bool is_number() const { return std::holds_alternative<double>(v); }
  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_number_array() const { return std::holds_alternative<std::vector<double>>(v); }
  bool is_string_array() const {
    return std::holds_alternative<std::vector<std::string>>(v);
  }
};

class Config {
public:
  std::map<std::string, std::map<std::string, ConfigValue>> tables;

  bool has(const std::string& table, const std::string& key) const {
    auto t = tables.find(table);
    return t != tables.end() && t->second.count(key) > 0;
  }

  const ConfigValue& get(const std::string& table, const std::string& key) const {
    auto t = tables.find(table);
    if (t == tables.end() || !t->second.count(key))
      throw DomainError("missing config key " + table + "." + key);
    return t->second.at(key);
  }

  double number(const std::string& table, const std::string& key, double fallback) const {
    if (!has(table, key)) return fallback;
    const auto& val = get(table, key);
    require(val.is_number(), "config key " + table + "." + key + " must be a number");
    return std::get<double>(val.v);
  }

  std::string str(const std::string& table, const std::string& key,
                  const std::string& fallback) const {
    if (!has(table, key)) return fallback;
    const auto& val = get(table, key);
    require(val.is_string(), "config key " + table + "." + key + " must be a string");
    return std::get<std::string>(val.v);
  }

  std::vector<double> numbers(const std::string& table, const std::string& key,
                              std::vector<double> fallback) const {
    if (!has(table, key)) return fallback;
    const auto& val = get(table, key);
    if (val.is_number()) return {std::get<double>(val.v)};
    require(val.is_number_array(),
            "config key " + table + "." + key + " must be a number array");
    return std::get<std::vector<double>>(val.v);
  }

  bool flag(const std::string& table, const std::string& key, bool fallback) const {
    if (!has(table, key)) return fallback;
    const auto& val = get(table, key);
    require(val.is_bool(), "config key " + table + "." + key + " must be a boolean");
    return std::get<bool>(val.v);
  }

  // Schema check: every present table.key must be in the allowed set.
  void reject_unknown(const std::map<std::string, std::set<std::string>>& schema) const {
    for (const auto& [table, kv] : tables) {
      auto it = schema.find(table);
      if (it == schema.end())
        throw DomainError("unknown config table [" + table + "]");
      for (const auto& [key, _] : kv)
        if (!it->second.count(key))
          throw DomainError("unknown config key " + table + "." + key);
    }
  }
};

namespace detail {

inline std::string strip_ws(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline ConfigValue parse_scalar(const std::string& raw, int line_no) {
  const std::string s = strip_ws(raw);
  if (s.empty()) throw ParseError("empty config value", static_cast<std::size_t>(line_no));
  if (s == "true") return ConfigValue{true};
  if (s == "false") return ConfigValue{false};
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"')
      throw ParseError("unterminated string", static_cast<std::size_t>(line_no));
    return ConfigValue{s.substr(1, s.size() - 2)};
  }
  if (s == "inf") return ConfigValue{kInf};
  try {
    std::size_t used = 0;
    const double d = std::stod(s, &used);
    if (used != s.size())
      throw ParseError("trailing characters in number '" + s + "'",
                       static_cast<std::size_t>(line_no));
    return ConfigValue{d};
  } catch (const ParseError&) {
    throw;
  } catch (...) {
    throw ParseError("cannot parse value '" + s + "'", static_cast<std::size_t>(line_no));
  }
}

}  // namespace detail

inline Config parse_config(const std::string& text) {
  Config cfg;
  std::string current = "";
  cfg.tables[current];
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // strip comments outside strings
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_str = !in_str;
      if (line[i] == '#' && !in_str) {
        line = line.substr(0, i);
        break;
      }
    }
    std::string t = detail::strip_ws(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ParseError("malformed table header", static_cast<std::size_t>(line_no));
      current = detail::strip_ws(t.substr(1, t.size() - 2));
      cfg.tables[current];
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected key = value", static_cast<std::size_t>(line_no));
    const std::string key = detail::strip_ws(t.substr(0, eq));
    std::string val = detail::strip_ws(t.substr(eq + 1));
    if (key.empty())
      throw ParseError("empty key", static_cast<std::size_t>(line_no));
    if (cfg.tables[current].count(key))
      throw ParseError("duplicate key " + key, static_cast<std::size_t>(line_no));

    if (val.rfind("\"\"\"", 0) == 0) {
      // multiline string: consume lines until the closing triple quote
      std::string body = val.substr(3);
      if (body.rfind("\"\"\"") != std::string::npos &&
          body.size() >= 3 && body.substr(body.size() - 3) == "\"\"\"") {
        cfg.tables[current][key] = ConfigValue{body.substr(0, body.size() - 3)};
        continue;
      }
      std::string content = body.empty() ? "" : body + "\n";
      bool closed = false;
      while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = detail::strip_ws(line);
        if (stripped == "\"\"\"" ||
            (stripped.size() >= 3 && stripped.substr(stripped.size() - 3) == "\"\"\"")) {
          if (stripped.size() > 3) content += stripped.substr(0, stripped.size() - 3) + "\n";
          closed = true;
          break;
        }
        content += line + "\n";
      }
      if (!closed)
        throw ParseError("unterminated multiline string", static_cast<std::size_t>(line_no));
      cfg.tables[current][key] = ConfigValue{content};
      continue;
    }

    if (!val.empty() && val.front() == '[') {
      if (val.back() != ']')
        throw ParseError("unterminated array", static_cast<std::size_t>(line_no));
      const std::string inner = val.substr(1, val.size() - 2);
      std::vector<std::string> items;
      std::string cur;
      bool in_str = false;
      for (char ch : inner) {
        if (ch == '"') in_str = !in_str;
        if (ch == ',' && !in_str) {
          items.push_back(cur);
          cur.clear();
        } else {
          cur += ch;
        }
      }
      if (!detail::strip_ws(cur).empty()) items.push_back(cur);
      bool strings = false;
      for (const auto& item : items)
        if (detail::strip_ws(item).front() == '"') strings = true;
      if (strings) {
        std::vector<std::string> out;
        for (const auto& item : items) {
          auto sv = detail::parse_scalar(item, line_no);
          require(sv.is_string(), "mixed array types in config");
          out.push_back(std::get<std::string>(sv.v));
        }
        cfg.tables[current][key] = ConfigValue{out};
      } else {
        std::vector<double> out;
        for (const auto& item : items) {
          auto sv = detail::parse_scalar(item, line_no);
          require(sv.is_number(), "mixed array types in config");
          out.push_back(std::get<double>(sv.v));
        }
        cfg.tables[current][key] = ConfigValue{out};
      }
      continue;
    }

    cfg.tables[current][key] = detail::parse_scalar(val, line_no);
  }
  return cfg;
}

}  // namespace fr

#endif  // FR_CONFIG_HPP
