#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "videx/common.hpp"
#include "videx/scalar.hpp"

namespace videx {

/// Single-column range condition; the unit of every cardinality request.
/// Equality is min == max with ">=" and "<=".
struct RangeCond {
  std::string col_name;
  DataType data_type = DataType::Int;
  std::optional<Scalar> min_value;
  std::optional<Scalar> max_value;
  std::optional<std::string> min_operator;  // ">" or ">="
  std::optional<std::string> max_operator;  // "<" or "<="

  static RangeCond equal(std::string col, Scalar v) {
    RangeCond c{std::move(col), v.type(), v, v, ">=", "<="};
    return c;
  }
  static RangeCond lower(std::string col, Scalar v, bool inclusive) {
    RangeCond c{std::move(col), v.type(), v, std::nullopt, inclusive ? ">=" : ">", std::nullopt};
    return c;
  }
  static RangeCond upper(std::string col, Scalar v, bool inclusive) {
    RangeCond c{std::move(col), v.type(), std::nullopt, v, std::nullopt, inclusive ? "<=" : "<"};
    return c;
  }
  static RangeCond between(std::string col, Scalar lo, Scalar hi) {
    RangeCond c{std::move(col), lo.type(), lo, hi, ">=", "<="};
    return c;
  }
  /// Canonical contradiction: (v, v) open on both sides.
  static RangeCond empty_marker(std::string col, Scalar v) {
    RangeCond c{std::move(col), v.type(), v, v, ">", "<"};
    return c;
  }

  bool min_inclusive() const { return min_operator && *min_operator == ">="; }
  bool max_inclusive() const { return max_operator && *max_operator == "<="; }

  bool is_equality() const {
    return min_value && max_value && *min_value == *max_value && min_inclusive() && max_inclusive();
  }

  bool is_empty() const {
    if (!min_value || !max_value) return false;
    if (*max_value < *min_value) return true;
    if (*min_value == *max_value) return !(min_inclusive() && max_inclusive());
    return false;
  }

  bool matches(const Scalar& v) const {
    if (min_value) {
      if (min_inclusive() ? v < *min_value : !(*min_value < v)) return false;
    }
    if (max_value) {
      if (max_inclusive() ? *max_value < v : !(v < *max_value)) return false;
    }
    return true;
  }

  /// NULL never satisfies a range.
  bool matches(const Value& v) const { return v && matches(*v); }

  friend bool operator==(const RangeCond&, const RangeCond&) = default;

  /// Wire form with the field names of the estimation interface.
  Json to_json() const {
    return Json{{"col_name", col_name},
                {"data_type", data_type_name(data_type)},
                {"min_value", min_value ? min_value->to_raw_json() : Json(nullptr)},
                {"max_value", max_value ? max_value->to_raw_json() : Json(nullptr)},
                {"min_operator", min_operator ? Json(*min_operator) : Json(nullptr)},
                {"max_operator", max_operator ? Json(*max_operator) : Json(nullptr)}};
  }

  /// Parses and checks the wire form; failures carry the offending field path.
  static RangeCond from_json(const Json& j, const std::string& path) {
    if (!j.is_object()) throw Error(Errc::BadRequest, "condition must be an object", path);
    RangeCond c;
    auto name = j.find("col_name");
    if (name == j.end() || !name->is_string() || name->get<std::string>().empty())
      throw Error(Errc::BadRequest, "col_name must be a non-empty string", path + "/col_name");
    c.col_name = name->get<std::string>();
    auto dt = j.find("data_type");
    if (dt == j.end() || !dt->is_string()) throw Error(Errc::BadRequest, "data_type must be a string", path + "/data_type");
    auto type = parse_data_type(dt->get<std::string>());
    if (!type) throw Error(Errc::BadRequest, "unknown data_type", path + "/data_type");
    c.data_type = *type;
    auto read_value = [&](const char* key) -> std::optional<Scalar> {
      auto it = j.find(key);
      if (it == j.end() || it->is_null()) return std::nullopt;
      try {
        return Scalar::from_raw_json(*it, c.data_type, path + "/" + key);
      } catch (const Error& e) {
        throw Error(Errc::BadRequest, e.message(), e.path());
      }
    };
    auto read_op = [&](const char* key, const char* strict, const char* inclusive) -> std::optional<std::string> {
      auto it = j.find(key);
      if (it == j.end() || it->is_null()) return std::nullopt;
      if (!it->is_string() || (it->get<std::string>() != strict && it->get<std::string>() != inclusive))
        throw Error(Errc::BadRequest, std::string("operator must be '") + strict + "' or '" + inclusive + "'",
                    path + "/" + key);
      return it->get<std::string>();
    };
    c.min_value = read_value("min_value");
    c.max_value = read_value("max_value");
    c.min_operator = read_op("min_operator", ">", ">=");
    c.max_operator = read_op("max_operator", "<", "<=");
    if (c.min_value.has_value() != c.min_operator.has_value())
      throw Error(Errc::BadRequest, "min_operator present iff min_value is", path + "/min_operator");
    if (c.max_value.has_value() != c.max_operator.has_value())
      throw Error(Errc::BadRequest, "max_operator present iff max_value is", path + "/max_operator");
    if (!c.min_value && !c.max_value) throw Error(Errc::BadRequest, "condition has no bound", path);
    if (c.min_value && c.max_value && *c.max_value < *c.min_value)
      throw Error(Errc::BadRequest, "min_value exceeds max_value", path + "/min_value");
    return c;
  }
};

/// Intersects `add` into `into` (same column). Ties on a bound keep the
/// stricter operator, so the result is independent of conjunct order.
inline void intersect_into(RangeCond& into, const RangeCond& add) {
  if (add.min_value) {
    if (!into.min_value || *into.min_value < *add.min_value ||
        (*into.min_value == *add.min_value && !add.min_inclusive())) {
      into.min_value = add.min_value;
      into.min_operator = add.min_operator;
    }
  }
  if (add.max_value) {
    if (!into.max_value || *add.max_value < *into.max_value ||
        (*into.max_value == *add.max_value && !add.max_inclusive())) {
      into.max_value = add.max_value;
      into.max_operator = add.max_operator;
    }
  }
}

/// Per-column merged conjunction; `empty` marks a contradiction (no row can match).
struct ConditionSet {
  bool empty = false;
  std::vector<RangeCond> conds;

  friend bool operator==(const ConditionSet&, const ConditionSet&) = default;
};

/// Merges conditions per column (first-appearance order). A contradictory
/// column collapses to its canonical empty marker and sets `empty`.
inline ConditionSet merge_conditions(const std::vector<RangeCond>& input) {
  ConditionSet out;
  for (const auto& c : input) {
    auto it = std::find_if(out.conds.begin(), out.conds.end(),
                           [&](const RangeCond& e) { return iequals(e.col_name, c.col_name); });
    if (it == out.conds.end()) out.conds.push_back(c);
    else intersect_into(*it, c);
  }
  for (auto& c : out.conds) {
    if (c.is_empty()) {
      c = RangeCond::empty_marker(c.col_name, *c.min_value);
      out.empty = true;
    }
  }
  return out;
}

/// Canonical order for cache keys and model evaluation: by column, then bounds.
inline std::vector<RangeCond> canonical_conditions(const std::vector<RangeCond>& input) {
  auto merged = merge_conditions(input).conds;
  std::sort(merged.begin(), merged.end(), [](const RangeCond& a, const RangeCond& b) {
    auto la = to_lower(a.col_name), lb = to_lower(b.col_name);
    if (la != lb) return la < lb;
    return a.to_json().dump() < b.to_json().dump();
  });
  return merged;
}

inline std::string describe(const RangeCond& c) {
  if (c.is_equality()) return c.col_name + " = " + c.min_value->to_string();
  std::string out;
  if (c.min_value) out += c.col_name + " " + *c.min_operator + " " + c.min_value->to_string();
  if (c.max_value) {
    if (!out.empty()) out += " AND ";
    out += c.col_name + " " + *c.max_operator + " " + c.max_value->to_string();
  }
  return out;
}

}  // namespace videx
