#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "videx/catalog.hpp"
#include "videx/common.hpp"
#include "videx/scalar.hpp"

namespace videx {

/// Raw rows of one table. Only the collector and the oracle model ever hold one.
struct DataTable {
  std::string name;
  std::vector<ColumnDef> schema;
  std::vector<IndexDef> indexes;
  std::vector<std::vector<Value>> rows;

  std::int64_t row_count() const { return static_cast<std::int64_t>(rows.size()); }

  std::size_t column_index(std::string_view col) const {
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (iequals(schema[i].name, col)) return i;
    }
    throw Error(Errc::UnknownColumn, "unknown column " + std::string(col) + " in " + name, name + "." + std::string(col));
  }

  /// Throws on arity or type violations.
  void check() const {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != schema.size())
        throw Error(Errc::ValidationError, "row arity differs from schema", name + "[" + std::to_string(r) + "]");
      for (std::size_t c = 0; c < schema.size(); ++c) {
        const auto& v = rows[r][c];
        if (v ? v->type() != schema[c].type : !schema[c].nullable)
          throw Error(Errc::TypeMismatch, "value does not match column " + schema[c].name,
                      name + "[" + std::to_string(r) + "]." + schema[c].name);
      }
    }
  }
};

struct CollectConfig {
  int bucket_count = 32;
  std::int64_t sample_cap = kMaxSampleRows;
  std::int64_t page_size = kDefaultPageSize;
  std::uint64_t seed = 42;
};

inline std::int64_t encoded_width(const Scalar& v) {
  switch (v.type()) {
    case DataType::Int:
    case DataType::Float: return 8;
    case DataType::Date: return 4;
    case DataType::String: return static_cast<std::int64_t>(v.as_string().size()) + 1;
  }
  return 0;
}

/// Equi-depth histogram over non-null values. Buckets close once they reach
/// an even share of the rows not yet assigned; all copies of a value stay in
/// one bucket.
inline EquiDepthHistogram build_equi_depth_histogram(std::vector<Scalar> values, int bucket_count) {
  if (bucket_count < 1) throw Error(Errc::InvalidArgument, "bucket_count must be >= 1", "bucket_count");
  EquiDepthHistogram hist;
  if (values.empty()) return hist;
  std::sort(values.begin(), values.end());
  const auto total = static_cast<std::int64_t>(values.size());
  std::int64_t closed = 0;  // rows in finished buckets
  std::int64_t buckets_left = bucket_count;
  std::size_t i = 0;
  while (i < values.size()) {
    Bucket b;
    b.lower = values[i];
    std::int64_t in_bucket = 0;
    while (i < values.size()) {
      std::size_t j = i;
      while (j < values.size() && values[j] == values[i]) ++j;
      in_bucket += static_cast<std::int64_t>(j - i);
      b.upper = values[i];
      ++b.distinct_count;
      i = j;
      // close when in_bucket >= (total - closed) / buckets_left
      if (in_bucket * buckets_left >= total - closed) break;
    }
    b.row_fraction = static_cast<double>(in_bucket) / static_cast<double>(total);
    closed += in_bucket;
    --buckets_left;
    hist.buckets.push_back(std::move(b));
  }
  return hist;
}

/// Exact number of distinct column tuples, ignoring tuples that are entirely null.
inline std::int64_t exact_ndv(const DataTable& data, const std::vector<std::string>& columns) {
  std::vector<std::size_t> idx;
  idx.reserve(columns.size());
  for (const auto& c : columns) idx.push_back(data.column_index(c));
  std::set<std::vector<Value>> seen;
  std::vector<Value> key(idx.size());
  for (const auto& row : data.rows) {
    bool all_null = true;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      key[k] = row[idx[k]];
      if (key[k]) all_null = false;
    }
    if (!all_null) seen.insert(key);
  }
  return static_cast<std::int64_t>(seen.size());
}

/// Single-pass reservoir sample (Algorithm R). Rows are returned in their
/// original table order. Tables no larger than `cap` are returned whole.
inline Sample reservoir_sample(const DataTable& data, std::int64_t cap, std::uint64_t seed) {
  if (cap < 1) throw Error(Errc::InvalidArgument, "sample_cap must be >= 1", "sample_cap");
  Sample s;
  s.seed = seed;
  s.cap = cap;
  const auto n = data.row_count();
  if (n <= cap) {
    s.rows = data.rows;
    return s;
  }
  std::mt19937_64 rng(seed);
  std::vector<std::int64_t> reservoir(static_cast<std::size_t>(cap));
  for (std::int64_t i = 0; i < cap; ++i) reservoir[static_cast<std::size_t>(i)] = i;
  for (std::int64_t i = cap; i < n; ++i) {
    std::uniform_int_distribution<std::int64_t> pick(0, i);
    auto j = pick(rng);
    if (j < cap) reservoir[static_cast<std::size_t>(j)] = i;
  }
  std::sort(reservoir.begin(), reservoir.end());
  s.rows.reserve(reservoir.size());
  for (auto r : reservoir) s.rows.push_back(data.rows[static_cast<std::size_t>(r)]);
  return s;
}

inline TableStatistics collect_table_stats(const DataTable& data, const CollectConfig& config) {
  if (config.bucket_count < 1) throw Error(Errc::InvalidArgument, "bucket_count must be >= 1", "bucket_count");
  if (config.sample_cap < 1) throw Error(Errc::InvalidArgument, "sample_cap must be >= 1", "sample_cap");
  if (config.sample_cap > kMaxSampleRows)
    throw Error(Errc::InvalidArgument, "sample_cap must not exceed 100000", "sample_cap");
  if (config.page_size < 1) throw Error(Errc::InvalidArgument, "page_size must be >= 1", "page_size");
  data.check();

  TableStatistics st;
  st.row_count = data.row_count();
  for (std::size_t c = 0; c < data.schema.size(); ++c) {
    std::vector<Scalar> values;
    values.reserve(data.rows.size());
    std::int64_t nulls = 0;
    for (const auto& row : data.rows) {
      if (row[c]) {
        st.data_size_bytes += encoded_width(*row[c]);
        values.push_back(*row[c]);
      } else {
        ++nulls;
      }
    }
    ColumnStatistics cs;
    cs.null_fraction = st.row_count == 0 ? 0.0 : static_cast<double>(nulls) / static_cast<double>(st.row_count);
    cs.histogram = build_equi_depth_histogram(values, config.bucket_count);
    for (const auto& b : cs.histogram->buckets) cs.ndv += b.distinct_count;
    if (!cs.histogram->buckets.empty()) {
      cs.min_value = cs.histogram->buckets.front().lower;
      cs.max_value = cs.histogram->buckets.back().upper;
    }
    st.columns.emplace(data.schema[c].name, std::move(cs));
  }
  st.page_count = pages_for(st.data_size_bytes, config.page_size);
  st.sample = reservoir_sample(data, config.sample_cap, config.seed);
  return st;
}

inline CatalogSnapshot collect_snapshot(const std::vector<DataTable>& tables, const CollectConfig& config,
                                        const CostConstants& constants = {}) {
  CatalogSnapshot snap;
  snap.page_size = config.page_size;
  snap.cost_constants = constants;
  for (const auto& d : tables) {
    TableEntry t;
    t.name = d.name;
    t.columns = d.schema;
    t.indexes = d.indexes;
    for (auto& idx : t.indexes) idx.table = d.name;
    t.stats = collect_table_stats(d, config);
    snap.tables.emplace(t.name, std::move(t));
  }
  if (auto v = validate_snapshot(snap); !v.empty()) throw ValidationError(std::move(v));
  return snap;
}

// ---------------------------------------------------------------------------
// CSV data directory: schema.json (metadata schema shape) + <table>.csv each.

namespace detail {

struct CsvField {
  std::string text;
  bool quoted = false;
};

/// RFC 4180 records; a quoted empty field is an empty string, an unquoted one is NULL.
inline std::vector<std::vector<CsvField>> parse_csv(std::string_view text, const std::string& file) {
  std::vector<std::vector<CsvField>> records;
  std::vector<CsvField> record;
  CsvField field;
  std::size_t i = 0, line = 1;
  bool at_field_start = true;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field = {};
    at_field_start = true;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  while (i < text.size()) {
    char c = text[i];
    if (at_field_start && c == '"') {
      field.quoted = true;
      at_field_start = false;
      ++i;
      while (true) {
        if (i >= text.size()) throw Error(Errc::ParseError, "unterminated quoted field", file + ":" + std::to_string(line));
        if (text[i] == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field.text.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        if (text[i] == '\n') ++line;
        field.text.push_back(text[i++]);
      }
      if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
        throw Error(Errc::ParseError, "unexpected character after quoted field", file + ":" + std::to_string(line));
      continue;
    }
    at_field_start = false;
    if (c == ',') {
      end_field();
      ++i;
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_record();
      i += 2;
      ++line;
    } else if (c == '\n') {
      end_record();
      ++i;
      ++line;
    } else {
      field.text.push_back(c);
      ++i;
    }
  }
  if (!at_field_start || !field.text.empty() || field.quoted || !record.empty()) end_record();
  return records;
}

inline Value parse_cell(const CsvField& f, const ColumnDef& col, const std::string& where) {
  if (!f.quoted && f.text.empty()) {
    if (!col.nullable) throw Error(Errc::TypeMismatch, "NULL in non-nullable column " + col.name, where);
    return std::nullopt;
  }
  const std::string& s = f.text;
  switch (col.type) {
    case DataType::Int: {
      std::int64_t v = 0;
      auto r = std::from_chars(s.data(), s.data() + s.size(), v);
      if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
        throw Error(Errc::ParseError, "bad int '" + s + "'", where);
      return Scalar::of_int(v);
    }
    case DataType::Float: {
      double v = 0;
      auto r = std::from_chars(s.data(), s.data() + s.size(), v);
      if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || std::isnan(v))
        throw Error(Errc::ParseError, "bad float '" + s + "'", where);
      return Scalar::of_float(v);
    }
    case DataType::Date: {
      auto d = parse_date(s);
      if (!d) throw Error(Errc::ParseError, "bad date '" + s + "'", where);
      return Scalar::of_date(*d);
    }
    case DataType::String: return Scalar::of_string(s);
  }
  return std::nullopt;
}

inline std::string csv_escape(const std::string& s) {
  bool needs = s.empty() || s.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + p.string(), p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline DataTable parse_csv_table(std::string_view text, std::string name, std::vector<ColumnDef> schema,
                                 const std::string& file = "<csv>") {
  DataTable t;
  t.name = std::move(name);
  t.schema = std::move(schema);
  auto records = detail::parse_csv(text, file);
  if (records.empty()) throw Error(Errc::ParseError, "missing header row", file + ":1");
  const auto& header = records.front();
  if (header.size() != t.schema.size()) throw Error(Errc::ParseError, "header arity differs from schema", file + ":1");
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!iequals(header[c].text, t.schema[c].name))
      throw Error(Errc::ParseError, "header column '" + header[c].text + "' differs from schema", file + ":1");
  }
  t.rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = file + ":" + std::to_string(r + 1);
    if (rec.size() != t.schema.size()) throw Error(Errc::ParseError, "row arity differs from schema", where);
    std::vector<Value> row;
    row.reserve(rec.size());
    for (std::size_t c = 0; c < rec.size(); ++c) row.push_back(detail::parse_cell(rec[c], t.schema[c], where));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline std::string format_csv_table(const DataTable& t) {
  std::string out;
  for (std::size_t c = 0; c < t.schema.size(); ++c) {
    if (c) out += ',';
    out += detail::csv_escape(t.schema[c].name);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      if (!row[c]) continue;
      if (row[c]->type() == DataType::String) out += detail::csv_escape(row[c]->as_string());
      else out += row[c]->to_string();
    }
    out += '\n';
  }
  return out;
}

/// A raw-data directory: schema.json plus one CSV per table.
struct DataDirectory {
  std::vector<DataTable> tables;
  std::int64_t page_size = kDefaultPageSize;
  CostConstants cost_constants;

  const DataTable* table(std::string_view name) const {
    for (const auto& t : tables) {
      if (iequals(t.name, name)) return &t;
    }
    return nullptr;
  }
};

inline Json schema_to_json(const DataDirectory& dir) {
  Json tables = Json::array();
  for (const auto& t : dir.tables) {
    Json jt{{"name", t.name}, {"columns", Json::array()}, {"indexes", Json::array()}};
    for (const auto& c : t.schema) jt["columns"].push_back(column_def_to_json(c));
    for (const auto& i : t.indexes) jt["indexes"].push_back(index_def_to_json(i));
    tables.push_back(std::move(jt));
  }
  return Json{{"page_size", dir.page_size},
              {"cost_constants", cost_constants_to_json(dir.cost_constants)},
              {"tables", std::move(tables)}};
}

inline DataDirectory read_data_directory(const std::filesystem::path& dir) {
  const auto schema_path = dir / "schema.json";
  Json schema;
  try {
    schema = Json::parse(detail::read_file(schema_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, e.what(), schema_path.string() + " byte " + std::to_string(e.byte));
  }
  DataDirectory out;
  if (schema.contains("page_size")) out.page_size = detail::int_field(schema, "page_size", "");
  if (schema.contains("cost_constants")) {
    Json doc{{"format_version", kFormatVersion}, {"cost_constants", schema["cost_constants"]}, {"tables", Json::array()}};
    out.cost_constants = snapshot_from_json(doc).cost_constants;
  }
  const Json& tables = detail::array_field(schema, "tables", "");
  for (std::size_t ti = 0; ti < tables.size(); ++ti) {
    const std::string tp = "/tables/" + std::to_string(ti);
    std::string name = detail::str_field(tables[ti], "name", tp);
    std::vector<ColumnDef> cols;
    const Json& jc = detail::array_field(tables[ti], "columns", tp);
    for (std::size_t ci = 0; ci < jc.size(); ++ci)
      cols.push_back(column_def_from_json(jc[ci], tp + "/columns/" + std::to_string(ci)));
    const auto csv_path = dir / (name + ".csv");
    DataTable t = parse_csv_table(detail::read_file(csv_path), name, std::move(cols), csv_path.string());
    if (tables[ti].contains("indexes")) {
      const Json& ji = detail::array_field(tables[ti], "indexes", tp);
      for (std::size_t ii = 0; ii < ji.size(); ++ii)
        t.indexes.push_back(index_def_from_json(ji[ii], name, tp + "/indexes/" + std::to_string(ii)));
    }
    out.tables.push_back(std::move(t));
  }
  return out;
}

inline void write_data_directory(const DataDirectory& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "schema.json", std::ios::binary);
    out << schema_to_json(data).dump(2) << "\n";
  }
  for (const auto& t : data.tables) {
    std::ofstream out(dir / (t.name + ".csv"), std::ios::binary);
    out << format_csv_table(t);
    if (!out) throw Error(Errc::Io, "cannot write " + t.name + ".csv", (dir / (t.name + ".csv")).string());
  }
}

inline CatalogSnapshot collect_snapshot(const DataDirectory& data, CollectConfig config) {
  config.page_size = data.page_size;
  return collect_snapshot(data.tables, config, data.cost_constants);
}

}  // namespace videx
