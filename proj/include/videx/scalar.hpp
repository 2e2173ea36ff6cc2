#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "videx/common.hpp"

namespace videx {

enum class DataType { Int, Float, String, Date };

inline std::string_view data_type_name(DataType t) {
  switch (t) {
    case DataType::Int: return "int";
    case DataType::Float: return "float";
    case DataType::String: return "string";
    case DataType::Date: return "date";
  }
  return "int";
}

inline std::optional<DataType> parse_data_type(std::string_view name) {
  if (iequals(name, "int")) return DataType::Int;
  if (iequals(name, "float")) return DataType::Float;
  if (iequals(name, "string")) return DataType::String;
  if (iequals(name, "date")) return DataType::Date;
  return std::nullopt;
}

inline bool is_numeric(DataType t) { return t != DataType::String; }

/// Parses "YYYY-MM-DD" into days since 1970-01-01.
inline std::optional<std::int64_t> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  auto ok = [](std::from_chars_result r, const char* end) { return r.ec == std::errc{} && r.ptr == end; };
  const char* s = text.data();
  if (!ok(std::from_chars(s, s + 4, y), s + 4)) return std::nullopt;
  if (!ok(std::from_chars(s + 5, s + 7, m), s + 7)) return std::nullopt;
  if (!ok(std::from_chars(s + 8, s + 10, d), s + 10)) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

inline std::string format_date(std::int64_t epoch_days) {
  std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{epoch_days}}};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

/// A typed, non-null value. Int and Date share integer storage (dates are
/// epoch days); strings compare by byte order.
class Scalar {
 public:
  Scalar() : type_(DataType::Int), value_(std::int64_t{0}) {}

  static Scalar of_int(std::int64_t v) { return Scalar(DataType::Int, v); }
  static Scalar of_float(double v) { return Scalar(DataType::Float, v); }
  static Scalar of_string(std::string v) { return Scalar(DataType::String, std::move(v)); }
  static Scalar of_date(std::int64_t days) { return Scalar(DataType::Date, days); }

  DataType type() const noexcept { return type_; }

  std::int64_t as_int() const { return std::get<std::int64_t>(value_); }
  double as_float() const { return std::get<double>(value_); }
  const std::string& as_string() const { return std::get<std::string>(value_); }

  /// Position on the real line for interpolation; only meaningful for numeric types.
  double numeric() const {
    if (type_ == DataType::Float) return as_float();
    return static_cast<double>(as_int());
  }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    return a.type_ == b.type_ && a.value_ == b.value_;
  }

  friend std::weak_ordering operator<=>(const Scalar& a, const Scalar& b) {
    if (a.type_ != b.type_) return a.type_ <=> b.type_;
    switch (a.type_) {
      case DataType::Float: {
        double x = a.as_float(), y = b.as_float();
        if (x < y) return std::weak_ordering::less;
        if (y < x) return std::weak_ordering::greater;
        return std::weak_ordering::equivalent;
      }
      case DataType::String: {
        int c = a.as_string().compare(b.as_string());
        return c < 0 ? std::weak_ordering::less
                     : (c > 0 ? std::weak_ordering::greater : std::weak_ordering::equivalent);
      }
      default:
        return a.as_int() <=> b.as_int();
    }
  }

  /// Display form: dates as YYYY-MM-DD, strings unquoted.
  std::string to_string() const {
    switch (type_) {
      case DataType::Int: return std::to_string(as_int());
      case DataType::Date: return format_date(as_int());
      case DataType::String: return as_string();
      case DataType::Float: return Json(as_float()).dump();
    }
    return {};
  }

  /// Untagged JSON; the type comes from context (schema or data_type field).
  Json to_raw_json() const {
    switch (type_) {
      case DataType::Float: return as_float();
      case DataType::String: return as_string();
      default: return as_int();
    }
  }

  Json to_tagged_json() const {
    return Json{{"type", data_type_name(type_)}, {"value", to_raw_json()}};
  }

  static Scalar from_raw_json(const Json& j, DataType type, const std::string& path) {
    switch (type) {
      case DataType::Int:
      case DataType::Date:
        if (!j.is_number_integer()) throw Error(Errc::ParseError, "expected integer", path);
        return Scalar(type, j.get<std::int64_t>());
      case DataType::Float:
        if (!j.is_number()) throw Error(Errc::ParseError, "expected number", path);
        return of_float(j.get<double>());
      case DataType::String:
        if (!j.is_string()) throw Error(Errc::ParseError, "expected string", path);
        return of_string(j.get<std::string>());
    }
    throw Error(Errc::ParseError, "bad type", path);
  }

  static Scalar from_tagged_json(const Json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("type") || !j.contains("value") || !j["type"].is_string())
      throw Error(Errc::ParseError, "expected tagged scalar {type, value}", path);
    auto type = parse_data_type(j["type"].get<std::string>());
    if (!type) throw Error(Errc::ParseError, "unknown scalar type", path + "/type");
    return from_raw_json(j["value"], *type, path + "/value");
  }

 private:
  Scalar(DataType t, std::variant<std::int64_t, double, std::string> v) : type_(t), value_(std::move(v)) {}

  DataType type_;
  std::variant<std::int64_t, double, std::string> value_;
};

using Value = std::optional<Scalar>;  // nullable cell

}  // namespace videx
