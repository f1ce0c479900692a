#include "oadmm/toml_lite.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace oadmm::toml {

namespace {

std::string strip(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

/// Cuts a trailing '#' comment, respecting double-quoted strings.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

Value parse_scalar(const std::string& raw, int lineno) {
  if (raw.empty()) throw ParseError("toml: empty value on line " + std::to_string(lineno));
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') {
      throw ParseError("toml: unterminated string on line " + std::to_string(lineno));
    }
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
      if (raw[i] == '\\' && i + 2 < raw.size()) {
        ++i;
        switch (raw[i]) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default:
            throw ParseError("toml: unsupported escape on line " + std::to_string(lineno));
        }
      } else {
        out += raw[i];
      }
    }
    return out;
  }
  if (raw == "true") return true;
  if (raw == "false") return false;
  if (raw.front() == '[' || raw.front() == '{') {
    throw ParseError("toml: arrays and inline tables are not supported (line " +
                     std::to_string(lineno) + ")");
  }
  const bool looks_float = raw.find_first_of(".eE") != std::string::npos ||
                           raw == "inf" || raw == "-inf" || raw == "nan";
  try {
    std::size_t used = 0;
    if (looks_float) {
      const double v = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
      return v;
    }
    const std::int64_t v = std::stoll(raw, nullptr, 10);
    std::size_t check = (raw[0] == '-' || raw[0] == '+') ? 1 : 0;
    for (; check < raw.size(); ++check) {
      if (!std::isdigit(static_cast<unsigned char>(raw[check]))) {
        throw std::invalid_argument(raw);
      }
    }
    return v;
  } catch (const std::exception&) {
    throw ParseError("toml: cannot parse value '" + raw + "' on line " +
                     std::to_string(lineno));
  }
}

}  // namespace

bool Document::has(const std::string& table, const std::string& key) const {
  auto it = tables.find(table);
  return it != tables.end() && it->second.count(key) > 0;
}

const Value& Document::at(const std::string& table, const std::string& key) const {
  auto it = tables.find(table);
  if (it == tables.end() || it->second.count(key) == 0) {
    throw ParseError("toml: missing key '" + key + "' in table [" + table + "]");
  }
  return it->second.at(key);
}

double Document::number(const std::string& table, const std::string& key) const {
  const Value& v = at(table, key);
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  if (std::holds_alternative<std::int64_t>(v)) {
    return static_cast<double>(std::get<std::int64_t>(v));
  }
  throw ParseError("toml: key '" + key + "' is not numeric");
}

std::int64_t Document::integer(const std::string& table, const std::string& key) const {
  const Value& v = at(table, key);
  if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
  throw ParseError("toml: key '" + key + "' is not an integer");
}

std::string Document::text(const std::string& table, const std::string& key) const {
  const Value& v = at(table, key);
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  throw ParseError("toml: key '" + key + "' is not a string");
}

bool Document::boolean(const std::string& table, const std::string& key) const {
  const Value& v = at(table, key);
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
  throw ParseError("toml: key '" + key + "' is not a boolean");
}

Document parse(const std::string& content) {
  Document doc;
  doc.tables[""];
  std::string current;
  std::istringstream in(content);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError("toml: malformed table header on line " + std::to_string(lineno));
      }
      current = strip(line.substr(1, line.size() - 2));
      if (!valid_key(current)) {
        throw ParseError("toml: bad table name on line " + std::to_string(lineno));
      }
      if (doc.tables.count(current)) {
        throw ParseError("toml: duplicate table [" + current + "]");
      }
      doc.tables[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("toml: expected 'key = value' on line " + std::to_string(lineno));
    }
    const std::string key = strip(line.substr(0, eq));
    if (!valid_key(key)) {
      throw ParseError("toml: bad key on line " + std::to_string(lineno));
    }
    if (doc.tables[current].count(key)) {
      throw ParseError("toml: duplicate key '" + key + "' in table [" + current + "]");
    }
    doc.tables[current][key] = parse_scalar(strip(line.substr(eq + 1)), lineno);
  }
  return doc;
}

Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

}  // namespace oadmm::toml
