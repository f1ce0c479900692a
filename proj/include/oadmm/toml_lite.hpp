#pragma once

#include <map>
#include <string>
#include <variant>

#include "oadmm/errors.hpp"

namespace oadmm::toml {

/// Scalar TOML value. Numbers keep their written kind (integer vs float).
using Value = std::variant<std::string, double, std::int64_t, bool>;

/// Key -> value within one table; insertion order is not preserved.
using Table = std::map<std::string, Value>;

/// Parsed document: table name -> table. The root table is keyed "".
/// Supported subset: [dotted.table] headers, key = value lines with string,
/// integer, float, and boolean scalars, and '#' comments. Arrays and inline
/// tables are not part of the experiment schema and are rejected.
struct Document {
  std::map<std::string, Table> tables;

  bool has(const std::string& table, const std::string& key) const;
  const Value& at(const std::string& table, const std::string& key) const;

  double number(const std::string& table, const std::string& key) const;
  std::int64_t integer(const std::string& table, const std::string& key) const;
  std::string text(const std::string& table, const std::string& key) const;
  bool boolean(const std::string& table, const std::string& key) const;
};

Document parse(const std::string& content);
Document parse_file(const std::string& path);

}  // namespace oadmm::toml
