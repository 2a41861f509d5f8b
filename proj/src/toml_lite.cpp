#include "flowbound/toml_lite.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace flowbound::toml {

ParseError::ParseError(const std::string& message, int line)
    : std::runtime_error("toml: line " + std::to_string(line) + ": " + message),
      line_(line) {}

Value Value::string(std::string v) {
  Value out;
  out.kind_ = Kind::String;
  out.str_ = std::move(v);
  return out;
}

Value Value::integer(int64_t v) {
  Value out;
  out.kind_ = Kind::Integer;
  out.int_ = v;
  return out;
}

Value Value::floating(double v) {
  Value out;
  out.kind_ = Kind::Float;
  out.float_ = v;
  return out;
}

Value Value::boolean(bool v) {
  Value out;
  out.kind_ = Kind::Boolean;
  out.bool_ = v;
  return out;
}

Value Value::array(Array v) {
  Value out;
  out.kind_ = Kind::Array;
  out.array_ = std::make_shared<Array>(std::move(v));
  return out;
}

Value Value::table(Table v) {
  Value out;
  out.kind_ = Kind::Table;
  out.table_ = std::make_shared<Table>(std::move(v));
  return out;
}

const std::string& Value::as_string() const {
  if (!is_string()) throw std::runtime_error("toml: value is not a string");
  return str_;
}

int64_t Value::as_integer() const {
  if (!is_integer()) throw std::runtime_error("toml: value is not an integer");
  return int_;
}

double Value::as_double() const {
  if (is_integer()) return static_cast<double>(int_);
  if (is_float()) return float_;
  throw std::runtime_error("toml: value is not a number");
}

bool Value::as_boolean() const {
  if (!is_boolean()) throw std::runtime_error("toml: value is not a boolean");
  return bool_;
}

const Array& Value::as_array() const {
  if (!is_array()) throw std::runtime_error("toml: value is not an array");
  return *array_;
}

const Table& Value::as_table() const {
  if (!is_table()) throw std::runtime_error("toml: value is not a table");
  return *table_;
}

Table& Value::as_table() {
  if (!is_table()) throw std::runtime_error("toml: value is not a table");
  return *table_;
}

const Value* Value::find(const std::string& key) const {
  if (!is_table()) return nullptr;
  auto it = table_->find(key);
  return it == table_->end() ? nullptr : &it->second;
}

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Table parse_document() {
    Table root;
    Table* current = &root;
    while (!at_end()) {
      skip_whitespace_and_comments();
      if (at_end()) break;
      if (peek() == '[') {
        current = parse_table_header(root);
        continue;
      }
      parse_key_value(*current);
    }
    return root;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char advance() {
    char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, line_);
  }

  void skip_inline_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) advance();
  }

  // Skips spaces, newlines, and # comments to end of line.
  void skip_whitespace_and_comments() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  void expect_line_end() {
    skip_inline_space();
    if (!at_end() && peek() == '#') {
      while (!at_end() && peek() != '\n') advance();
    }
    if (at_end()) return;
    char c = peek();
    if (c == '\n' || c == '\r') return;
    fail("unexpected trailing content");
  }

  static bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string parse_key() {
    skip_inline_space();
    if (at_end()) fail("expected a key");
    if (peek() == '"') return parse_basic_string();
    std::string key;
    while (!at_end() && is_bare_key_char(peek())) key.push_back(advance());
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::vector<std::string> parse_dotted_key() {
    std::vector<std::string> parts;
    parts.push_back(parse_key());
    skip_inline_space();
    while (!at_end() && peek() == '.') {
      advance();
      parts.push_back(parse_key());
      skip_inline_space();
    }
    return parts;
  }

  Table* parse_table_header(Table& root) {
    advance();  // '['
    if (!at_end() && peek() == '[') fail("arrays of tables are not supported");
    std::vector<std::string> parts = parse_dotted_key();
    skip_inline_space();
    if (at_end() || peek() != ']') fail("expected ']' to close a table header");
    advance();
    expect_line_end();
    Table* current = &root;
    for (const std::string& part : parts) {
      auto [it, inserted] = current->emplace(part, Value::table(Table{}));
      if (!inserted && !it->second.is_table())
        fail("table header '" + part + "' collides with a non-table value");
      current = &it->second.as_table();
    }
    return current;
  }

  void parse_key_value(Table& table) {
    std::vector<std::string> parts = parse_dotted_key();
    skip_inline_space();
    if (at_end() || peek() != '=') fail("expected '=' after key");
    advance();
    skip_inline_space();
    Value value = parse_value();
    expect_line_end();

    Table* target = &table;
    for (size_t i = 0; i + 1 < parts.size(); ++i) {
      auto [it, inserted] = target->emplace(parts[i], Value::table(Table{}));
      if (!inserted && !it->second.is_table())
        fail("dotted key '" + parts[i] + "' collides with a non-table value");
      target = &it->second.as_table();
    }
    auto [it, inserted] = target->emplace(parts.back(), std::move(value));
    if (!inserted) fail("duplicate key '" + parts.back() + "'");
  }

  Value parse_value() {
    if (at_end()) fail("expected a value");
    char c = peek();
    if (c == '"') return Value::string(parse_basic_string());
    if (c == '\'') return Value::string(parse_literal_string());
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    if (c == 't' || c == 'f') return parse_boolean();
    return parse_number();
  }

  std::string parse_basic_string() {
    advance();  // '"'
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated string");
      char c = advance();
      if (c == '"') break;
      if (c == '\n') fail("newline inside a basic string");
      if (c == '\\') {
        if (at_end()) fail("unterminated escape sequence");
        char e = advance();
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: fail(std::string("unsupported escape '\\") + e + "'");
        }
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  std::string parse_literal_string() {
    advance();  // '\''
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated string");
      char c = advance();
      if (c == '\'') break;
      if (c == '\n') fail("newline inside a literal string");
      out.push_back(c);
    }
    return out;
  }

  Value parse_boolean() {
    if (text_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      return Value::boolean(true);
    }
    if (text_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      return Value::boolean(false);
    }
    fail("expected a boolean");
  }

  Value parse_number() {
    size_t start = pos_;
    bool is_float = false;
    if (!at_end() && (peek() == '+' || peek() == '-')) advance();
    if (text_.compare(pos_, 3, "inf") == 0 || text_.compare(pos_, 3, "nan") == 0) {
      pos_ += 3;
      is_float = true;
    } else {
      while (!at_end()) {
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '_') {
          advance();
        } else if (c == '.' || c == 'e' || c == 'E') {
          is_float = true;
          advance();
          if (!at_end() && (peek() == '+' || peek() == '-')) advance();
        } else {
          break;
        }
      }
    }
    std::string token = text_.substr(start, pos_ - start);
    std::string cleaned;
    for (char c : token)
      if (c != '_') cleaned.push_back(c);
    if (cleaned.empty() || cleaned == "+" || cleaned == "-")
      fail("expected a number");
    errno = 0;
    char* end = nullptr;
    if (!is_float) {
      long long v = std::strtoll(cleaned.c_str(), &end, 10);
      if (errno != 0 || end != cleaned.c_str() + cleaned.size())
        fail("malformed integer '" + token + "'");
      return Value::integer(static_cast<int64_t>(v));
    }
    double v = std::strtod(cleaned.c_str(), &end);
    if (end != cleaned.c_str() + cleaned.size())
      fail("malformed float '" + token + "'");
    return Value::floating(v);
  }

  // Arrays may span multiple lines and carry comments between elements.
  Value parse_array() {
    advance();  // '['
    Array items;
    while (true) {
      skip_whitespace_and_comments();
      if (at_end()) fail("unterminated array");
      if (peek() == ']') {
        advance();
        break;
      }
      items.push_back(parse_value());
      skip_whitespace_and_comments();
      if (at_end()) fail("unterminated array");
      if (peek() == ',') {
        advance();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
    return Value::array(std::move(items));
  }

  Value parse_inline_table() {
    advance();  // '{'
    Table table;
    skip_inline_space();
    if (!at_end() && peek() == '}') {
      advance();
      return Value::table(std::move(table));
    }
    while (true) {
      std::string key = parse_key();
      skip_inline_space();
      if (at_end() || peek() != '=') fail("expected '=' in inline table");
      advance();
      skip_inline_space();
      auto [it, inserted] = table.emplace(key, parse_value());
      if (!inserted) fail("duplicate key '" + key + "' in inline table");
      skip_inline_space();
      if (at_end()) fail("unterminated inline table");
      if (peek() == ',') {
        advance();
        skip_inline_space();
      } else if (peek() == '}') {
        advance();
        break;
      } else {
        fail("expected ',' or '}' in inline table");
      }
    }
    return Value::table(std::move(table));
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

Table parse(const std::string& text) { return Parser(text).parse_document(); }

Table parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("toml: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

const Value* find_path(const Table& root, const std::string& dotted) {
  const Table* table = &root;
  size_t start = 0;
  while (true) {
    size_t dot = dotted.find('.', start);
    std::string part = dotted.substr(start, dot == std::string::npos
                                                ? std::string::npos
                                                : dot - start);
    auto it = table->find(part);
    if (it == table->end()) return nullptr;
    if (dot == std::string::npos) return &it->second;
    if (!it->second.is_table()) return nullptr;
    table = &it->second.as_table();
    start = dot + 1;
  }
}

}  // namespace flowbound::toml
