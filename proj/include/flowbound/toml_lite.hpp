// Minimal TOML reader covering the subset used by experiment configs:
// [table] and [dotted.table] headers, key = value pairs with string / integer /
// float / boolean values, homogeneous and nested arrays (multi-line allowed),
// inline tables, and # comments.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace flowbound::toml {

class Value;
using Table = std::map<std::string, Value>;
using Array = std::vector<Value>;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line);
  int line() const { return line_; }

 private:
  int line_;
};

class Value {
 public:
  enum class Kind { String, Integer, Float, Boolean, Array, Table };

  Value() : kind_(Kind::Table), table_(std::make_shared<toml::Table>()) {}
  static Value string(std::string v);
  static Value integer(int64_t v);
  static Value floating(double v);
  static Value boolean(bool v);
  static Value array(Array v);
  static Value table(Table v);

  Kind kind() const { return kind_; }
  bool is_string() const { return kind_ == Kind::String; }
  bool is_integer() const { return kind_ == Kind::Integer; }
  bool is_float() const { return kind_ == Kind::Float; }
  bool is_boolean() const { return kind_ == Kind::Boolean; }
  bool is_array() const { return kind_ == Kind::Array; }
  bool is_table() const { return kind_ == Kind::Table; }
  bool is_number() const { return is_integer() || is_float(); }

  const std::string& as_string() const;
  int64_t as_integer() const;
  double as_double() const;  // accepts both integer and float values
  bool as_boolean() const;
  const Array& as_array() const;
  const toml::Table& as_table() const;
  toml::Table& as_table();

  // Lookup within a table value; null when the key is absent.
  const Value* find(const std::string& key) const;

 private:
  Kind kind_;
  std::string str_;
  int64_t int_ = 0;
  double float_ = 0.0;
  bool bool_ = false;
  std::shared_ptr<Array> array_;
  std::shared_ptr<toml::Table> table_;
};

// Parses a complete document; throws ParseError with a 1-based line number.
Table parse(const std::string& text);
Table parse_file(const std::string& path);

// Dotted-path lookup ("sampler.steps"); null when any component is absent.
const Value* find_path(const Table& root, const std::string& dotted);

}  // namespace flowbound::toml
