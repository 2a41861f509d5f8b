// Streaming JSON writer with caller-controlled key order and a fixed float
// format (17 significant digits), so identical inputs serialize to identical
// bytes on every platform.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flowbound::jsonw {

// %.17g with non-finite values mapped to "inf" / "-inf" / "nan" strings
// (JSON has no literals for them).
std::string format_double(double v);
std::string escape(const std::string& s);

class JsonWriter {
 public:
  explicit JsonWriter(int indent = 2) : indent_(indent) {}

  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& name);

  JsonWriter& value(double v);
  JsonWriter& value(int64_t v);
  JsonWriter& value(int v) { return value(static_cast<int64_t>(v)); }
  JsonWriter& value(uint64_t v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v) { return value(std::string(v)); }
  JsonWriter& null();

  template <class T>
  JsonWriter& kv(const std::string& name, const T& v) {
    key(name);
    return value(v);
  }

  JsonWriter& kv(const std::string& name, const std::vector<double>& v);

  // Finished document plus trailing newline.
  std::string str() const;

 private:
  void before_value();
  void newline_indent();

  std::string out_;
  std::vector<std::pair<char, bool>> stack_;  // ('{' or '['), any-items-yet
  bool pending_key_ = false;
  int indent_;
};

}  // namespace flowbound::jsonw
