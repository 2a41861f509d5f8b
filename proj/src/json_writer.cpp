#include "flowbound/json_writer.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace flowbound::jsonw {

std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
  return out;
}

void JsonWriter::newline_indent() {
  out_.push_back('\n');
  out_.append(static_cast<size_t>(indent_) * stack_.size(), ' ');
}

void JsonWriter::before_value() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (stack_.empty()) {
    if (!out_.empty()) throw std::logic_error("json: two top-level values");
    return;
  }
  auto& [kind, has_items] = stack_.back();
  if (kind == '{') throw std::logic_error("json: value in object without a key");
  if (has_items) out_.push_back(',');
  has_items = true;
  newline_indent();
}

JsonWriter& JsonWriter::begin_object() {
  before_value();
  out_.push_back('{');
  stack_.emplace_back('{', false);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  if (stack_.empty() || stack_.back().first != '{')
    throw std::logic_error("json: mismatched end_object");
  const bool had_items = stack_.back().second;
  stack_.pop_back();
  if (had_items) newline_indent();
  out_.push_back('}');
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  before_value();
  out_.push_back('[');
  stack_.emplace_back('[', false);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  if (stack_.empty() || stack_.back().first != '[')
    throw std::logic_error("json: mismatched end_array");
  const bool had_items = stack_.back().second;
  stack_.pop_back();
  if (had_items) newline_indent();
  out_.push_back(']');
  return *this;
}

JsonWriter& JsonWriter::key(const std::string& name) {
  if (stack_.empty() || stack_.back().first != '{' || pending_key_)
    throw std::logic_error("json: key outside an object");
  auto& [kind, has_items] = stack_.back();
  (void)kind;
  if (has_items) out_.push_back(',');
  has_items = true;
  newline_indent();
  out_ += escape(name);
  out_ += ": ";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  before_value();
  out_ += format_double(v);
  return *this;
}

JsonWriter& JsonWriter::value(int64_t v) {
  before_value();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(uint64_t v) {
  before_value();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  before_value();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
  before_value();
  out_ += escape(v);
  return *this;
}

JsonWriter& JsonWriter::null() {
  before_value();
  out_ += "null";
  return *this;
}

JsonWriter& JsonWriter::kv(const std::string& name, const std::vector<double>& v) {
  key(name);
  begin_array();
  for (double x : v) value(x);
  return end_array();
}

std::string JsonWriter::str() const {
  if (!stack_.empty() || pending_key_)
    throw std::logic_error("json: document not closed");
  return out_ + "\n";
}

}  // namespace flowbound::jsonw
