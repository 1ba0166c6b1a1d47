#pragma once

// Path-tracking accessors over nlohmann::json so decode errors can name the
// offending location ("/components/2/attributes/lifespan").

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "vera/error.hpp"

namespace vera::detail {

using nlohmann::json;

class JsonReader {
 public:
  JsonReader(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const json& value() const { return value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& message) const {
    throw DecodeError("decode", (path_.empty() ? "/" : path_) + ": " + message, path_);
  }

  const JsonReader& expect_object() const {
    if (!value_.is_object()) fail("expected an object");
    return *this;
  }

  const JsonReader& expect_array() const {
    if (!value_.is_array()) fail("expected an array");
    return *this;
  }

  bool has(const char* key) const { return value_.contains(key) && !value_.at(key).is_null(); }

  JsonReader at(const char* key) const {
    expect_object();
    if (!value_.contains(key)) fail(std::string("missing required key '") + key + "'");
    return JsonReader(value_.at(key), path_ + "/" + key);
  }

  JsonReader at(std::size_t index) const {
    return JsonReader(value_.at(index), path_ + "/" + std::to_string(index));
  }

  std::size_t size() const { return value_.size(); }

  std::string as_string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  double as_number() const {
    if (!value_.is_number()) fail("expected a number");
    double v = value_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  std::uint64_t as_count() const {
    if (value_.is_number_unsigned()) return value_.get<std::uint64_t>();
    if (value_.is_number_integer()) {
      if (value_.get<std::int64_t>() < 0) fail("expected a non-negative integer");
      return static_cast<std::uint64_t>(value_.get<std::int64_t>());
    }
    if (value_.is_number_float()) {
      double v = value_.get<double>();
      if (v >= 0.0 && std::floor(v) == v && v < 1.8e19) return static_cast<std::uint64_t>(v);
    }
    fail("expected a non-negative integer");
  }

  bool as_bool() const {
    if (!value_.is_boolean()) fail("expected a boolean");
    return value_.get<bool>();
  }

  std::optional<std::string> optional_string(const char* key) const {
    if (!has(key)) return std::nullopt;
    return at(key).as_string();
  }

  std::optional<double> optional_number(const char* key) const {
    if (!has(key)) return std::nullopt;
    return at(key).as_number();
  }

 private:
  const json& value_;
  std::string path_;
};

/// Parses text, mapping syntax errors to DecodeError with the byte offset.
inline json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw DecodeError("decode", std::string("malformed JSON: ") + e.what(), "", e.byte);
  }
}

}  // namespace vera::detail
