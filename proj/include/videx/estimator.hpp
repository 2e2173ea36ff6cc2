#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "videx/catalog.hpp"
#include "videx/collector.hpp"
#include "videx/common.hpp"
#include "videx/range_cond.hpp"

namespace videx {

struct CardinalityEstimate {
  double rows = 0.0;
  std::string model_name;
  bool degraded = false;
};

struct NdvEstimate {
  double ndv = 0.0;
  std::string model_name;
};

/// q-error = max(est/truth, truth/est). Both zero is a perfect 1; a zero on
/// one side only is smoothed by one row on both sides.
inline double q_error(double estimate, double truth) {
  if (estimate == truth) return 1.0;
  if (estimate <= 0.0 || truth <= 0.0) {
    double e = std::max(estimate, 0.0) + 1.0, t = std::max(truth, 0.0) + 1.0;
    return std::max(e / t, t / e);
  }
  return std::max(estimate / truth, truth / estimate);
}

// ---------------------------------------------------------------------------
// Histogram selectivity

namespace detail {

// Estimated fraction of rows with value <= x. Inside a bucket the distinct
// values are assumed evenly spread over [lower, upper]: the lower bound holds
// one value's mass, the remaining distinct values are interpolated linearly
// (numeric) or credited half the bucket (strings).
inline double cdf_le(const EquiDepthHistogram& h, const Scalar& x) {
  double cum = 0.0;
  for (const auto& b : h.buckets) {
    if (x < b.lower) return cum;
    if (!(x < b.upper)) {
      cum += b.row_fraction;
      continue;
    }
    // lower <= x < upper
    const double d = static_cast<double>(std::max<std::int64_t>(b.distinct_count, 1));
    double within;
    if (x == b.lower || d <= 1.0) {
      within = 1.0 / d;
    } else if (is_numeric(x.type())) {
      const double t = (x.numeric() - b.lower.numeric()) / (b.upper.numeric() - b.lower.numeric());
      within = (1.0 + (d - 1.0) * t) / d;
    } else {
      within = 0.5;
    }
    return cum + b.row_fraction * within;
  }
  return cum;
}

// Estimated mass of the single value x: row_fraction / distinct_count of
// the bucket whose span contains it.
inline double point_mass(const EquiDepthHistogram& h, const Scalar& x) {
  for (const auto& b : h.buckets) {
    if (x < b.lower) return 0.0;
    if (!(b.upper < x)) return b.row_fraction / static_cast<double>(std::max<std::int64_t>(b.distinct_count, 1));
  }
  return 0.0;
}

}  // namespace detail

/// Fraction of non-null values satisfying `cond`, in [0, 1].
inline double histogram_selectivity(const EquiDepthHistogram& hist, const RangeCond& cond) {
  if (cond.is_empty() || hist.empty()) return 0.0;
  for (const auto* v : {&cond.min_value, &cond.max_value}) {
    if (*v && (*v)->type() != hist.buckets.front().lower.type())
      throw Error(Errc::TypeMismatch,
                  "condition on " + cond.col_name + " has type " + std::string(data_type_name((*v)->type())) +
                      ", histogram has " + std::string(data_type_name(hist.buckets.front().lower.type())),
                  cond.col_name);
  }
  double upper = 1.0, lower = 0.0;
  if (cond.max_value) {
    upper = detail::cdf_le(hist, *cond.max_value);
    if (!cond.max_inclusive()) upper -= detail::point_mass(hist, *cond.max_value);
  }
  if (cond.min_value) {
    lower = detail::cdf_le(hist, *cond.min_value);
    if (cond.min_inclusive()) lower -= detail::point_mass(hist, *cond.min_value);
  }
  double sel = upper - lower;
  if (sel < 1e-15) return 0.0;  // rounding residue of equal CDF values
  return std::min(sel, 1.0);
}

/// Fallback selectivities when a column has no histogram.
inline constexpr double kMagicEquality = 0.1;
inline constexpr double kMagicOpenRange = 1.0 / 3.0;
inline constexpr double kMagicClosedRange = 1.0 / 4.0;

inline double magic_selectivity(const RangeCond& cond) {
  if (cond.is_equality()) return kMagicEquality;
  if (cond.min_value && cond.max_value) return kMagicClosedRange;
  return kMagicOpenRange;
}

// ---------------------------------------------------------------------------
// Model interface

/// A cardinality / NDV estimator built over a table-statistics snapshot.
/// Public entry points resolve names, short-circuit contradictions and clamp
/// results into [0, row_count]; subclasses implement the estimates.
class EstimatorModel {
 public:
  EstimatorModel(std::shared_ptr<const CatalogSnapshot> full_table_stats, std::optional<std::string> model_path)
      : full_table_stats_(std::move(full_table_stats)), model_path_(std::move(model_path)) {
    if (!full_table_stats_) throw Error(Errc::InvalidArgument, "model requires statistics", "full_table_stats");
  }
  virtual ~EstimatorModel() = default;

  EstimatorModel(const EstimatorModel&) = delete;
  EstimatorModel& operator=(const EstimatorModel&) = delete;

  virtual std::string name() const = 0;

  const CatalogSnapshot& full_table_stats() const { return *full_table_stats_; }
  const std::optional<std::string>& model_path() const { return model_path_; }

  CardinalityEstimate cardinality(std::string_view table, const std::vector<RangeCond>& conds) const {
    const TableEntry& t = resolve_table(table);
    for (std::size_t i = 0; i < conds.size(); ++i) {
      const ColumnDef* col = t.column(conds[i].col_name);
      if (!col)
        throw Error(Errc::UnknownColumn, "unknown column " + conds[i].col_name + " in " + t.name,
                    "/conditions/" + std::to_string(i) + "/col_name");
      if (col->type != conds[i].data_type)
        throw Error(Errc::TypeMismatch, "data_type of " + conds[i].col_name + " is " + std::string(data_type_name(col->type)),
                    "/conditions/" + std::to_string(i) + "/data_type");
    }
    CardinalityEstimate est{0.0, name(), false};
    if (std::any_of(conds.begin(), conds.end(), [](const RangeCond& c) { return c.is_empty(); })) return est;
    est = estimate_cardinality(t, conds);
    est.model_name = name();
    est.rows = std::clamp(est.rows, 0.0, static_cast<double>(t.stats.row_count));
    return est;
  }

  NdvEstimate ndv(std::string_view table, const std::vector<std::string>& columns) const {
    const TableEntry& t = resolve_table(table);
    if (columns.empty()) throw Error(Errc::InvalidArgument, "column list is empty", "/columns");
    std::vector<std::string> canonical;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const ColumnDef* col = t.column(columns[i]);
      if (!col)
        throw Error(Errc::UnknownColumn, "unknown column " + columns[i] + " in " + t.name,
                    "/columns/" + std::to_string(i));
      canonical.push_back(col->name);
    }
    NdvEstimate est{estimate_ndv(t, canonical), name()};
    est.ndv = std::clamp(est.ndv, 0.0, static_cast<double>(t.stats.row_count));
    return est;
  }

 protected:
  virtual CardinalityEstimate estimate_cardinality(const TableEntry& table, const std::vector<RangeCond>& conds) const = 0;
  virtual double estimate_ndv(const TableEntry& table, const std::vector<std::string>& columns) const = 0;

 private:
  const TableEntry& resolve_table(std::string_view table) const {
    const TableEntry* t = full_table_stats_->table(table);
    if (!t) throw Error(Errc::UnknownTable, "no statistics loaded for table " + std::string(table), "/table");
    return *t;
  }

  std::shared_ptr<const CatalogSnapshot> full_table_stats_;
  std::optional<std::string> model_path_;
};

/// Per-column histograms combined under the column independence assumption.
class IndependenceModel : public EstimatorModel {
 public:
  using EstimatorModel::EstimatorModel;
  std::string name() const override { return "independence"; }

 protected:
  CardinalityEstimate estimate_cardinality(const TableEntry& t, const std::vector<RangeCond>& conds) const override {
    CardinalityEstimate est;
    double sel = 1.0;
    for (const auto& c : conds) {
      const ColumnStatistics* cs = t.stats.column(c.col_name);
      double factor;
      if (cs && cs->histogram) {
        factor = histogram_selectivity(*cs->histogram, c);
      } else {
        factor = magic_selectivity(c);
        est.degraded = true;
      }
      if (cs) factor *= 1.0 - cs->null_fraction;
      sel *= factor;
    }
    est.rows = static_cast<double>(t.stats.row_count) * sel;
    return est;
  }

  double estimate_ndv(const TableEntry& t, const std::vector<std::string>& columns) const override {
    double product = 1.0;
    for (const auto& c : columns) {
      const ColumnStatistics* cs = t.stats.column(c);
      if (!cs) throw Error(Errc::UnknownColumn, "no ndv statistics for " + t.name + "." + c, "/columns");
      product *= static_cast<double>(cs->ndv);
    }
    if (columns.size() == 1) return product;
    return std::min(static_cast<double>(t.stats.row_count), product);
  }
};

/// Conjunctions evaluated on the collected row sample; joint NDV by the
/// GEE estimator over sample tuple frequencies.
class SampleModel : public EstimatorModel {
 public:
  using EstimatorModel::EstimatorModel;
  std::string name() const override { return "sample"; }

 protected:
  const Sample& sample_of(const TableEntry& t) const {
    if (!t.stats.sample) throw Error(Errc::NoSample, "no sample loaded for table " + t.name, "/table");
    if (t.stats.sample->rows.empty() && t.stats.row_count > 0)
      throw Error(Errc::NoSample, "empty sample for non-empty table " + t.name, "/table");
    return *t.stats.sample;
  }

  CardinalityEstimate estimate_cardinality(const TableEntry& t, const std::vector<RangeCond>& conds) const override {
    const Sample& s = sample_of(t);
    CardinalityEstimate est;
    const double total = static_cast<double>(t.stats.row_count);
    if (conds.empty() || t.stats.row_count == 0) {
      est.rows = total;
      return est;
    }
    std::vector<std::size_t> idx;
    for (const auto& c : conds) idx.push_back(*t.column_index(c.col_name));
    std::int64_t matches = 0;
    for (const auto& row : s.rows) {
      bool ok = true;
      for (std::size_t k = 0; k < conds.size() && ok; ++k) ok = conds[k].matches(row[idx[k]]);
      if (ok) ++matches;
    }
    const double n = static_cast<double>(s.size());
    if (matches > 0) {
      est.rows = total * static_cast<double>(matches) / n;  // exact when the sample is the table
    } else if (s.size() >= t.stats.row_count) {
      est.rows = 0.0;  // the sample is the table
    } else {
      est.rows = std::max(1.0, total / (2.0 * n));
    }
    return est;
  }

  double estimate_ndv(const TableEntry& t, const std::vector<std::string>& columns) const override {
    const Sample& s = sample_of(t);
    if (s.rows.empty()) return 0.0;
    std::vector<std::size_t> idx;
    for (const auto& c : columns) idx.push_back(*t.column_index(c));
    std::map<std::vector<Value>, std::int64_t> freq;
    std::vector<Value> key(idx.size());
    for (const auto& row : s.rows) {
      bool all_null = true;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        key[k] = row[idx[k]];
        if (key[k]) all_null = false;
      }
      if (!all_null) ++freq[key];
    }
    return gee_estimate(freq, s.size(), t.stats.row_count);
  }

 public:
  /// GEE: sqrt(N/n)·f1 + Σ_{i≥2} f_i, capped at N.
  template <typename FrequencyMap>
  static double gee_estimate(const FrequencyMap& freq, std::int64_t sample_size, std::int64_t row_count) {
    if (sample_size <= 0) return 0.0;
    double f1 = 0.0, rest = 0.0;
    for (const auto& [tuple, count] : freq) {
      if (count == 1) f1 += 1.0;
      else rest += 1.0;
    }
    const double scale = std::sqrt(static_cast<double>(row_count) / static_cast<double>(sample_size));
    return std::min(static_cast<double>(row_count), scale * f1 + rest);
  }
};

/// Exact answers from raw rows; the reference ("production") side of
/// comparisons and the ground truth in tests.
class OracleModel : public EstimatorModel {
 public:
  explicit OracleModel(std::shared_ptr<const DataDirectory> data, std::optional<std::string> model_path = std::nullopt)
      : EstimatorModel(schema_of(*data), std::move(model_path)), data_(std::move(data)) {}

  std::string name() const override { return "oracle"; }

  const DataDirectory& data() const { return *data_; }

  static std::shared_ptr<const CatalogSnapshot> schema_of(const DataDirectory& data) {
    auto snap = std::make_shared<CatalogSnapshot>();
    snap->page_size = data.page_size;
    snap->cost_constants = data.cost_constants;
    for (const auto& d : data.tables) {
      TableEntry t;
      t.name = d.name;
      t.columns = d.schema;
      t.indexes = d.indexes;
      t.stats.row_count = d.row_count();
      snap->tables.emplace(t.name, std::move(t));
    }
    return snap;
  }

 protected:
  CardinalityEstimate estimate_cardinality(const TableEntry& t, const std::vector<RangeCond>& conds) const override {
    const DataTable& d = *data_->table(t.name);
    std::vector<std::size_t> idx;
    for (const auto& c : conds) idx.push_back(d.column_index(c.col_name));
    std::int64_t count = 0;
    for (const auto& row : d.rows) {
      bool ok = true;
      for (std::size_t k = 0; k < conds.size() && ok; ++k) ok = conds[k].matches(row[idx[k]]);
      if (ok) ++count;
    }
    return {static_cast<double>(count), {}, false};
  }

  double estimate_ndv(const TableEntry& t, const std::vector<std::string>& columns) const override {
    return static_cast<double>(exact_ndv(*data_->table(t.name), columns));
  }

 private:
  std::shared_ptr<const DataDirectory> data_;
};

// ---------------------------------------------------------------------------
// Registry

struct ModelContext {
  std::shared_ptr<const CatalogSnapshot> stats;
  std::optional<std::string> model_path;
};

using ModelFactory = std::function<std::shared_ptr<const EstimatorModel>(const ModelContext&)>;

/// Name → constructor. Populate before serving; lookups are read-only.
class ModelRegistry {
 public:
  static ModelRegistry with_builtin_models() {
    ModelRegistry r;
    r.register_model("independence", [](const ModelContext& ctx) {
      return std::make_shared<IndependenceModel>(ctx.stats, ctx.model_path);
    });
    r.register_model("sample", [](const ModelContext& ctx) {
      return std::make_shared<SampleModel>(ctx.stats, ctx.model_path);
    });
    r.register_model("oracle", [](const ModelContext& ctx) -> std::shared_ptr<const EstimatorModel> {
      if (!ctx.model_path)
        throw Error(Errc::InvalidArgument, "oracle model needs model_path pointing at a raw data directory",
                    "model_path");
      auto data = std::make_shared<const DataDirectory>(read_data_directory(*ctx.model_path));
      return std::make_shared<OracleModel>(std::move(data), ctx.model_path);
    });
    return r;
  }

  void register_model(const std::string& name, ModelFactory factory) {
    if (factories_.count(name)) throw Error(Errc::DuplicateModel, "model already registered: " + name, name);
    factories_.emplace(name, std::move(factory));
  }

  bool contains(const std::string& name) const { return factories_.count(name) > 0; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, f] : factories_) out.push_back(name);
    return out;
  }

  std::shared_ptr<const EstimatorModel> create_model(const std::string& name,
                                                     std::shared_ptr<const CatalogSnapshot> stats,
                                                     std::optional<std::string> model_path = std::nullopt) const {
    require(name);
    return factories_.at(name)(ModelContext{std::move(stats), std::move(model_path)});
  }

  /// Throws UNKNOWN_MODEL naming every registered model.
  void require(const std::string& name) const {
    if (factories_.count(name)) return;
    std::string known;
    for (const auto& n : names()) known += (known.empty() ? "" : ", ") + n;
    throw Error(Errc::UnknownModel, "unknown model '" + name + "'; registered: {" + known + "}", "model");
  }

 private:
  std::map<std::string, ModelFactory> factories_;
};

}  // namespace videx
