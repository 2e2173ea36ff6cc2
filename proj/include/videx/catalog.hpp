#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "videx/common.hpp"
#include "videx/scalar.hpp"

namespace videx {

inline constexpr int kFormatVersion = 1;
inline constexpr std::int64_t kDefaultPageSize = 16384;
inline constexpr std::int64_t kMaxSampleRows = 100000;

struct ColumnDef {
  std::string name;
  DataType type = DataType::Int;
  bool nullable = true;

  friend bool operator==(const ColumnDef&, const ColumnDef&) = default;
};

struct Bucket {
  Scalar lower;
  Scalar upper;
  double row_fraction = 0.0;
  std::int64_t distinct_count = 0;

  friend bool operator==(const Bucket&, const Bucket&) = default;
};

/// Distribution of the non-null values of one column.
struct EquiDepthHistogram {
  std::vector<Bucket> buckets;

  bool empty() const { return buckets.empty(); }
  friend bool operator==(const EquiDepthHistogram&, const EquiDepthHistogram&) = default;
};

struct ColumnStatistics {
  std::int64_t ndv = 0;
  double null_fraction = 0.0;
  std::optional<Scalar> min_value;
  std::optional<Scalar> max_value;
  std::optional<EquiDepthHistogram> histogram;

  friend bool operator==(const ColumnStatistics&, const ColumnStatistics&) = default;
};

/// Uniform row sample; rows carry every schema column in schema order.
struct Sample {
  std::uint64_t seed = 0;
  std::int64_t cap = kMaxSampleRows;
  std::vector<std::vector<Value>> rows;

  std::int64_t size() const { return static_cast<std::int64_t>(rows.size()); }
  friend bool operator==(const Sample&, const Sample&) = default;
};

struct TableStatistics {
  std::int64_t row_count = 0;
  std::int64_t data_size_bytes = 0;
  std::int64_t page_count = 0;
  std::map<std::string, ColumnStatistics> columns;
  std::optional<Sample> sample;

  const ColumnStatistics* column(std::string_view name) const {
    for (const auto& [col, stats] : columns) {
      if (iequals(col, name)) return &stats;
    }
    return nullptr;
  }

  friend bool operator==(const TableStatistics&, const TableStatistics&) = default;
};

enum class IndexOrigin { Real, Virtual };

struct IndexDef {
  std::string name;
  std::string table;
  std::vector<std::string> columns;
  bool unique = false;
  IndexOrigin origin = IndexOrigin::Real;

  bool is_virtual() const { return origin == IndexOrigin::Virtual; }
  friend bool operator==(const IndexDef&, const IndexDef&) = default;
};

struct CostConstants {
  double seq_page_cost = 1.0;
  double rand_page_cost = 4.0;
  double row_cpu_cost = 0.01;
  double index_row_cost = 0.005;

  friend bool operator==(const CostConstants&, const CostConstants&) = default;
};

struct TableEntry {
  std::string name;
  std::vector<ColumnDef> columns;
  std::vector<IndexDef> indexes;
  TableStatistics stats;

  std::optional<std::size_t> column_index(std::string_view col) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (iequals(columns[i].name, col)) return i;
    }
    return std::nullopt;
  }

  const ColumnDef* column(std::string_view col) const {
    auto i = column_index(col);
    return i ? &columns[*i] : nullptr;
  }

  friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

/// Schema plus statistics of a database at one point in time. Shared as
/// `std::shared_ptr<const CatalogSnapshot>` once built.
struct CatalogSnapshot {
  int format_version = kFormatVersion;
  std::int64_t page_size = kDefaultPageSize;
  CostConstants cost_constants;
  std::map<std::string, TableEntry> tables;

  const TableEntry* table(std::string_view name) const {
    if (auto it = tables.find(std::string(name)); it != tables.end()) return &it->second;
    for (const auto& [key, entry] : tables) {
      if (iequals(key, name)) return &entry;
    }
    return nullptr;
  }

  friend bool operator==(const CatalogSnapshot&, const CatalogSnapshot&) = default;
};

inline std::int64_t pages_for(std::int64_t data_size_bytes, std::int64_t page_size) {
  if (data_size_bytes <= 0 || page_size <= 0) return 0;
  return (data_size_bytes + page_size - 1) / page_size;
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string path;
  std::string rule;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : Error(Errc::ValidationError, summarize(violations), violations.empty() ? "" : violations.front().path),
        violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& vs) {
    std::string out = std::to_string(vs.size()) + " violation(s)";
    for (const auto& v : vs) out += "; " + v.rule + " at " + v.path + ": " + v.message;
    return out;
  }

  std::vector<Violation> violations_;
};

namespace detail {

inline void check_histogram(const std::string& path, const TableEntry& table, const ColumnDef& col,
                            const ColumnStatistics& cs, std::vector<Violation>& out) {
  const auto& buckets = cs.histogram->buckets;
  if (buckets.empty()) {
    if (cs.ndv > 0) out.push_back({path, "HISTOGRAM_EMPTY", "empty histogram on a column with non-null values"});
    return;
  }
  double sum = 0.0;
  bool order_ok = true, type_ok = true, range_ok = true;
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    const auto& b = buckets[i];
    if (b.lower.type() != col.type || b.upper.type() != col.type) {
      type_ok = false;
      continue;
    }
    if (b.upper < b.lower) order_ok = false;
    if (i > 0 && buckets[i - 1].lower.type() == col.type && buckets[i - 1].upper.type() == col.type &&
        (b.lower < buckets[i - 1].lower || b.upper < buckets[i - 1].upper))
      order_ok = false;
    if (!(b.row_fraction > 0.0))
      out.push_back({path + ".bucket[" + std::to_string(i) + "]", "BUCKET_FRACTION_NOT_POSITIVE",
                     "row_fraction must be > 0"});
    if (b.distinct_count < 1)
      out.push_back({path + ".bucket[" + std::to_string(i) + "]", "BUCKET_DISTINCT_NOT_POSITIVE",
                     "distinct_count must be >= 1"});
    if (cs.min_value && cs.max_value && cs.min_value->type() == col.type && cs.max_value->type() == col.type &&
        (b.lower < *cs.min_value || *cs.max_value < b.upper))
      range_ok = false;
    sum += b.row_fraction;
  }
  if (!type_ok) out.push_back({path, "SCALAR_TYPE_MISMATCH", "histogram bound type differs from column type"});
  if (!order_ok) out.push_back({path, "HISTOGRAM_ORDER", "bucket bounds must be non-decreasing with lower <= upper"});
  if (!range_ok) out.push_back({path, "HISTOGRAM_OUT_OF_RANGE", "bucket bounds outside [min, max]"});
  if (std::abs(sum - 1.0) > 1e-9)
    out.push_back({path, "HISTOGRAM_FRACTION_SUM", "bucket fractions sum to " + Json(sum).dump() + ", expected 1"});
  (void)table;
}

}  // namespace detail

/// Checks every snapshot invariant and returns all violations found.
inline std::vector<Violation> validate_snapshot(const CatalogSnapshot& snap) {
  std::vector<Violation> out;
  if (snap.format_version != kFormatVersion)
    out.push_back({"", "UNSUPPORTED_VERSION", "format_version must be " + std::to_string(kFormatVersion)});
  if (snap.page_size <= 0) out.push_back({"", "PAGE_SIZE_INVALID", "page_size must be > 0"});
  const auto& cc = snap.cost_constants;
  if (!(cc.seq_page_cost > 0 && cc.rand_page_cost > 0 && cc.row_cpu_cost > 0 && cc.index_row_cost > 0))
    out.push_back({"cost_constants", "COST_CONSTANT_NOT_POSITIVE", "all cost constants must be > 0"});
  if (cc.rand_page_cost < cc.seq_page_cost)
    out.push_back({"cost_constants", "RAND_BELOW_SEQ_COST", "rand_page_cost must be >= seq_page_cost"});

  std::set<std::string> table_names;
  std::set<std::string> index_names;
  for (const auto& [key, t] : snap.tables) {
    const std::string tpath = t.name;
    if (key != t.name) out.push_back({tpath, "TABLE_KEY_MISMATCH", "map key differs from table name"});
    if (!table_names.insert(to_lower(t.name)).second)
      out.push_back({tpath, "DUPLICATE_TABLE", "table name not unique"});
    if (t.name.empty()) out.push_back({tpath, "EMPTY_NAME", "table name is empty"});

    std::set<std::string> col_names;
    for (const auto& c : t.columns) {
      if (c.name.empty()) out.push_back({tpath, "EMPTY_NAME", "column name is empty"});
      if (!col_names.insert(to_lower(c.name)).second)
        out.push_back({tpath + "." + c.name, "DUPLICATE_COLUMN", "column name not unique (case-insensitive)"});
    }

    for (const auto& idx : t.indexes) {
      const std::string ipath = tpath + ".index:" + idx.name;
      if (!index_names.insert(to_lower(t.name) + "/" + to_lower(idx.name)).second)
        out.push_back({ipath, "DUPLICATE_INDEX", "index name not unique within table"});
      if (!iequals(idx.table, t.name)) out.push_back({ipath, "INDEX_TABLE_MISMATCH", "index table differs"});
      if (idx.columns.empty()) out.push_back({ipath, "INDEX_EMPTY", "index has no columns"});
      std::set<std::string> seen;
      for (const auto& c : idx.columns) {
        if (!t.column(c)) out.push_back({ipath, "INDEX_UNKNOWN_COLUMN", "unknown column " + c});
        if (!seen.insert(to_lower(c)).second)
          out.push_back({ipath, "INDEX_DUPLICATE_COLUMN", "column repeated: " + c});
      }
    }

    const auto& st = t.stats;
    if (st.row_count < 0) out.push_back({tpath, "NEGATIVE_COUNT", "row_count < 0"});
    if (st.data_size_bytes < 0) out.push_back({tpath, "NEGATIVE_COUNT", "data_size_bytes < 0"});
    if (snap.page_size > 0 && st.page_count != pages_for(st.data_size_bytes, snap.page_size))
      out.push_back({tpath, "PAGE_COUNT_MISMATCH", "page_count must equal ceil(data_size_bytes / page_size)"});

    for (const auto& [cname, cs] : st.columns) {
      const std::string cpath = tpath + "." + cname;
      const ColumnDef* col = t.column(cname);
      if (!col) {
        out.push_back({cpath, "UNKNOWN_STATS_COLUMN", "statistics for a column not in the schema"});
        continue;
      }
      if (cs.ndv < 0) out.push_back({cpath, "NEGATIVE_COUNT", "ndv < 0"});
      if (cs.ndv > st.row_count) out.push_back({cpath, "NDV_EXCEEDS_ROWS", "ndv exceeds row_count"});
      if (!(cs.null_fraction >= 0.0 && cs.null_fraction <= 1.0))
        out.push_back({cpath, "NULL_FRACTION_RANGE", "null_fraction outside [0,1]"});
      else if (!col->nullable && cs.null_fraction > 0.0)
        out.push_back({cpath, "NULLS_IN_NON_NULLABLE", "null_fraction > 0 on a non-nullable column"});
      bool bounds_typed = true;
      for (const auto* v : {&cs.min_value, &cs.max_value}) {
        if (*v && (*v)->type() != col->type) bounds_typed = false;
      }
      if (!bounds_typed) out.push_back({cpath, "SCALAR_TYPE_MISMATCH", "min/max type differs from column type"});
      if (bounds_typed && cs.min_value && cs.max_value && *cs.max_value < *cs.min_value)
        out.push_back({cpath, "MIN_GT_MAX", "min_value exceeds max_value"});
      if (cs.histogram) detail::check_histogram(cpath, t, *col, cs, out);
    }

    if (st.sample) {
      const auto& s = *st.sample;
      if (s.cap < 1 || s.cap > kMaxSampleRows)
        out.push_back({tpath + ".sample", "SAMPLE_CAP_RANGE", "sample cap must be in [1, 100000]"});
      if (s.size() > st.row_count || s.size() > s.cap)
        out.push_back({tpath + ".sample", "SAMPLE_TOO_LARGE", "sample size exceeds min(row_count, cap)"});
      for (std::size_t r = 0; r < s.rows.size(); ++r) {
        const auto& row = s.rows[r];
        if (row.size() != t.columns.size()) {
          out.push_back({tpath + ".sample[" + std::to_string(r) + "]", "SAMPLE_ARITY", "row arity differs from schema"});
          break;
        }
        bool typed = true;
        for (std::size_t c = 0; c < row.size(); ++c) {
          if (row[c] ? row[c]->type() != t.columns[c].type : !t.columns[c].nullable) typed = false;
        }
        if (!typed) {
          out.push_back({tpath + ".sample[" + std::to_string(r) + "]", "SAMPLE_TYPE", "value does not match column"});
          break;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metadata document (format_version 1)

namespace detail {

inline const Json& field(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw Error(Errc::ParseError, "expected object", path);
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(Errc::ParseError, std::string("missing field '") + key + "'", path);
  return *it;
}

inline std::int64_t int_field(const Json& obj, const char* key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_number_integer()) throw Error(Errc::ParseError, "expected integer", path + "/" + key);
  return v.get<std::int64_t>();
}

inline double num_field(const Json& obj, const char* key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_number()) throw Error(Errc::ParseError, "expected number", path + "/" + key);
  return v.get<double>();
}

inline std::string str_field(const Json& obj, const char* key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_string()) throw Error(Errc::ParseError, "expected string", path + "/" + key);
  return v.get<std::string>();
}

inline bool bool_field(const Json& obj, const char* key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_boolean()) throw Error(Errc::ParseError, "expected boolean", path + "/" + key);
  return v.get<bool>();
}

inline const Json& array_field(const Json& obj, const char* key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_array()) throw Error(Errc::ParseError, "expected array", path + "/" + key);
  return v;
}

inline std::optional<Scalar> opt_scalar(const Json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return Scalar::from_tagged_json(*it, path + "/" + key);
}

inline Json opt_scalar_json(const std::optional<Scalar>& v) { return v ? v->to_tagged_json() : Json(nullptr); }

}  // namespace detail

inline Json cost_constants_to_json(const CostConstants& cc) {
  return Json{{"seq_page_cost", cc.seq_page_cost},
              {"rand_page_cost", cc.rand_page_cost},
              {"row_cpu_cost", cc.row_cpu_cost},
              {"index_row_cost", cc.index_row_cost}};
}

inline Json column_def_to_json(const ColumnDef& c) {
  return Json{{"name", c.name}, {"type", data_type_name(c.type)}, {"nullable", c.nullable}};
}

inline ColumnDef column_def_from_json(const Json& j, const std::string& path) {
  ColumnDef c;
  c.name = detail::str_field(j, "name", path);
  auto type = parse_data_type(detail::str_field(j, "type", path));
  if (!type) throw Error(Errc::ParseError, "unknown column type", path + "/type");
  c.type = *type;
  c.nullable = j.contains("nullable") ? detail::bool_field(j, "nullable", path) : true;
  return c;
}

inline Json index_def_to_json(const IndexDef& idx) {
  return Json{{"name", idx.name}, {"columns", idx.columns}, {"unique", idx.unique}};
}

inline IndexDef index_def_from_json(const Json& j, const std::string& table, const std::string& path) {
  IndexDef idx;
  idx.name = detail::str_field(j, "name", path);
  idx.table = table;
  const Json& cols = detail::array_field(j, "columns", path);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (!cols[i].is_string()) throw Error(Errc::ParseError, "expected string", path + "/columns/" + std::to_string(i));
    idx.columns.push_back(cols[i].get<std::string>());
  }
  idx.unique = j.contains("unique") ? detail::bool_field(j, "unique", path) : false;
  return idx;
}

inline Json snapshot_to_json(const CatalogSnapshot& snap) {
  Json tables = Json::array();
  for (const auto& [name, t] : snap.tables) {
    Json jt;
    jt["name"] = t.name;
    jt["columns"] = Json::array();
    for (const auto& c : t.columns) jt["columns"].push_back(column_def_to_json(c));
    jt["indexes"] = Json::array();
    for (const auto& idx : t.indexes) jt["indexes"].push_back(index_def_to_json(idx));
    jt["row_count"] = t.stats.row_count;
    jt["data_size_bytes"] = t.stats.data_size_bytes;
    jt["page_count"] = t.stats.page_count;
    Json stats = Json::object();
    for (const auto& [cname, cs] : t.stats.columns) {
      Json jc{{"ndv", cs.ndv},
              {"null_fraction", cs.null_fraction},
              {"min", detail::opt_scalar_json(cs.min_value)},
              {"max", detail::opt_scalar_json(cs.max_value)}};
      if (cs.histogram) {
        Json buckets = Json::array();
        for (const auto& b : cs.histogram->buckets) {
          buckets.push_back(Json{{"lower", b.lower.to_tagged_json()},
                                 {"upper", b.upper.to_tagged_json()},
                                 {"row_fraction", b.row_fraction},
                                 {"distinct_count", b.distinct_count}});
        }
        jc["histogram"] = Json{{"buckets", std::move(buckets)}};
      } else {
        jc["histogram"] = nullptr;
      }
      stats[cname] = std::move(jc);
    }
    jt["column_stats"] = std::move(stats);
    if (t.stats.sample) {
      Json rows = Json::array();
      for (const auto& row : t.stats.sample->rows) {
        Json jr = Json::array();
        for (const auto& v : row) jr.push_back(v ? v->to_raw_json() : Json(nullptr));
        rows.push_back(std::move(jr));
      }
      jt["sample"] = Json{{"seed", t.stats.sample->seed}, {"cap", t.stats.sample->cap}, {"rows", std::move(rows)}};
    }
    tables.push_back(std::move(jt));
  }
  return Json{{"format_version", snap.format_version},
              {"page_size", snap.page_size},
              {"cost_constants", cost_constants_to_json(snap.cost_constants)},
              {"tables", std::move(tables)}};
}

/// Builds a snapshot from a parsed document without running validation.
inline CatalogSnapshot snapshot_from_json(const Json& doc) {
  using namespace detail;
  if (!doc.is_object()) throw Error(Errc::ParseError, "metadata document must be an object", "");
  CatalogSnapshot snap;
  snap.format_version = static_cast<int>(int_field(doc, "format_version", ""));
  if (snap.format_version != kFormatVersion)
    throw Error(Errc::UnsupportedVersion, "unsupported format_version " + std::to_string(snap.format_version),
                "/format_version");
  if (doc.contains("page_size")) snap.page_size = int_field(doc, "page_size", "");
  if (doc.contains("cost_constants")) {
    const Json& cc = doc["cost_constants"];
    snap.cost_constants.seq_page_cost = num_field(cc, "seq_page_cost", "/cost_constants");
    snap.cost_constants.rand_page_cost = num_field(cc, "rand_page_cost", "/cost_constants");
    snap.cost_constants.row_cpu_cost = num_field(cc, "row_cpu_cost", "/cost_constants");
    snap.cost_constants.index_row_cost = num_field(cc, "index_row_cost", "/cost_constants");
  }
  const Json& tables = array_field(doc, "tables", "");
  std::vector<Violation> dupes;
  for (std::size_t ti = 0; ti < tables.size(); ++ti) {
    const std::string tp = "/tables/" + std::to_string(ti);
    const Json& jt = tables[ti];
    TableEntry t;
    t.name = str_field(jt, "name", tp);
    const Json& cols = array_field(jt, "columns", tp);
    for (std::size_t ci = 0; ci < cols.size(); ++ci)
      t.columns.push_back(column_def_from_json(cols[ci], tp + "/columns/" + std::to_string(ci)));
    if (jt.contains("indexes")) {
      const Json& idxs = array_field(jt, "indexes", tp);
      for (std::size_t ii = 0; ii < idxs.size(); ++ii)
        t.indexes.push_back(index_def_from_json(idxs[ii], t.name, tp + "/indexes/" + std::to_string(ii)));
    }
    t.stats.row_count = int_field(jt, "row_count", tp);
    t.stats.data_size_bytes = int_field(jt, "data_size_bytes", tp);
    t.stats.page_count = int_field(jt, "page_count", tp);
    if (jt.contains("column_stats")) {
      const Json& jcs = jt["column_stats"];
      if (!jcs.is_object()) throw Error(Errc::ParseError, "expected object", tp + "/column_stats");
      for (const auto& [cname, jc] : jcs.items()) {
        const std::string cp = tp + "/column_stats/" + cname;
        ColumnStatistics cs;
        cs.ndv = int_field(jc, "ndv", cp);
        cs.null_fraction = jc.contains("null_fraction") ? num_field(jc, "null_fraction", cp) : 0.0;
        cs.min_value = opt_scalar(jc, "min", cp);
        cs.max_value = opt_scalar(jc, "max", cp);
        if (jc.contains("histogram") && !jc["histogram"].is_null()) {
          const std::string hp = cp + "/histogram";
          const Json& jb = array_field(jc["histogram"], "buckets", hp);
          EquiDepthHistogram h;
          for (std::size_t bi = 0; bi < jb.size(); ++bi) {
            const std::string bp = hp + "/buckets/" + std::to_string(bi);
            Bucket b;
            b.lower = Scalar::from_tagged_json(field(jb[bi], "lower", bp), bp + "/lower");
            b.upper = Scalar::from_tagged_json(field(jb[bi], "upper", bp), bp + "/upper");
            b.row_fraction = num_field(jb[bi], "row_fraction", bp);
            b.distinct_count = int_field(jb[bi], "distinct_count", bp);
            h.buckets.push_back(std::move(b));
          }
          cs.histogram = std::move(h);
        }
        t.stats.columns.emplace(cname, std::move(cs));
      }
    }
    if (jt.contains("sample") && !jt["sample"].is_null()) {
      const std::string sp = tp + "/sample";
      const Json& js = jt["sample"];
      Sample s;
      s.seed = static_cast<std::uint64_t>(int_field(js, "seed", sp));
      s.cap = js.contains("cap") ? int_field(js, "cap", sp) : kMaxSampleRows;
      const Json& rows = array_field(js, "rows", sp);
      s.rows.reserve(rows.size());
      for (std::size_t ri = 0; ri < rows.size(); ++ri) {
        const std::string rp = sp + "/rows/" + std::to_string(ri);
        if (!rows[ri].is_array()) throw Error(Errc::ParseError, "expected array", rp);
        if (rows[ri].size() != t.columns.size())
          throw Error(Errc::ParseError, "sample row arity differs from schema", rp);
        std::vector<Value> row;
        row.reserve(t.columns.size());
        for (std::size_t ci = 0; ci < t.columns.size(); ++ci) {
          const Json& v = rows[ri][ci];
          if (v.is_null()) row.emplace_back(std::nullopt);
          else row.emplace_back(Scalar::from_raw_json(v, t.columns[ci].type, rp + "/" + std::to_string(ci)));
        }
        s.rows.push_back(std::move(row));
      }
      t.stats.sample = std::move(s);
    }
    std::string key = t.name;
    if (snap.tables.count(key)) {
      dupes.push_back({key, "DUPLICATE_TABLE", "table name not unique"});
      continue;
    }
    snap.tables.emplace(std::move(key), std::move(t));
  }
  if (!dupes.empty()) {
    auto rest = validate_snapshot(snap);
    dupes.insert(dupes.end(), rest.begin(), rest.end());
    throw ValidationError(std::move(dupes));
  }
  return snap;
}

/// Parses and validates a metadata document. Throws Error(ParseError) with a
/// location, Error(UnsupportedVersion), or ValidationError listing every
/// violated rule.
inline CatalogSnapshot load_metadata(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, e.what(), "byte " + std::to_string(e.byte));
  }
  CatalogSnapshot snap = snapshot_from_json(doc);
  if (auto violations = validate_snapshot(snap); !violations.empty()) throw ValidationError(std::move(violations));
  return snap;
}

inline CatalogSnapshot load_metadata(std::istream& in) {
  std::stringstream ss;
  ss << in.rdbuf();
  return load_metadata(ss.str());
}

inline CatalogSnapshot load_metadata_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path, path);
  return load_metadata(in);
}

/// Canonical text form: sorted keys, tables ordered by name, 2-space indent.
inline std::string serialize_metadata(const CatalogSnapshot& snap) { return snapshot_to_json(snap).dump(2) + "\n"; }

inline std::string snapshot_digest(const CatalogSnapshot& snap) {
  return hex64(fnv1a64(serialize_metadata(snap)));
}

}  // namespace videx
