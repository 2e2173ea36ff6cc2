#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "videx/catalog.hpp"
#include "videx/common.hpp"
#include "videx/estimator.hpp"
#include "videx/range_cond.hpp"
#include "videx/sql.hpp"
#include "videx/wire.hpp"

namespace videx {

// ---------------------------------------------------------------------------
// Estimator client: the optimizer's only route to cardinality and NDV.

class EstimatorClient {
 public:
  struct Cardinality {
    double rows = 0.0;
    bool degraded = false;
    bool cached = false;
    std::string model;
  };
  struct Ndv {
    double ndv = 0.0;
    bool cached = false;
    std::string model;
  };

  virtual ~EstimatorClient() = default;
  virtual Cardinality cardinality(const std::string& table, const std::vector<RangeCond>& conds) = 0;
  virtual Ndv ndv(const std::string& table, const std::vector<std::string>& columns) = 0;
};

/// Answers from a model in this process (the reference side, and tests).
class LocalModelClient : public EstimatorClient {
 public:
  explicit LocalModelClient(std::shared_ptr<const EstimatorModel> model) : model_(std::move(model)) {}

  Cardinality cardinality(const std::string& table, const std::vector<RangeCond>& conds) override {
    auto est = model_->cardinality(table, conds);
    return {est.rows, est.degraded, false, est.model_name};
  }
  Ndv ndv(const std::string& table, const std::vector<std::string>& columns) override {
    auto est = model_->ndv(table, columns);
    return {est.ndv, false, est.model_name};
  }

  const EstimatorModel& model() const { return *model_; }

 private:
  std::shared_ptr<const EstimatorModel> model_;
};

/// Forwards every request to a statistics server task.
class RemoteEstimatorClient : public EstimatorClient {
 public:
  RemoteEstimatorClient(std::shared_ptr<Transport> transport, std::string task_id)
      : transport_(std::move(transport)), task_id_(std::move(task_id)) {}

  Cardinality cardinality(const std::string& table, const std::vector<RangeCond>& conds) override {
    Json body{{"task_id", task_id_}, {"table", table}, {"conditions", Json::array()}};
    for (const auto& c : conds) body["conditions"].push_back(c.to_json());
    Json r = expect_ok(transport_->post("/v1/cardinality", body.dump()), "cardinality").json();
    return {r.at("rows").get<double>(), r.value("degraded", false), r.value("cached", false), r.value("model", "")};
  }

  Ndv ndv(const std::string& table, const std::vector<std::string>& columns) override {
    Json body{{"task_id", task_id_}, {"table", table}, {"columns", columns}};
    Json r = expect_ok(transport_->post("/v1/ndv", body.dump()), "ndv").json();
    return {r.at("ndv").get<double>(), r.value("cached", false), r.value("model", "")};
  }

  const std::string& task_id() const { return task_id_; }
  Transport& transport() { return *transport_; }

 private:
  std::shared_ptr<Transport> transport_;
  std::string task_id_;
};

// ---------------------------------------------------------------------------
// Access paths and cost model

enum class AccessKind { FullScan, IndexRange, IndexCovering };

inline std::string_view access_kind_name(AccessKind k) {
  switch (k) {
    case AccessKind::FullScan: return "full_scan";
    case AccessKind::IndexRange: return "index_range";
    case AccessKind::IndexCovering: return "index_covering";
  }
  return "full_scan";
}

struct AccessPath {
  AccessKind kind = AccessKind::FullScan;
  std::optional<IndexDef> index;
  std::vector<RangeCond> matched_conditions;  // local conditions on the index prefix
  std::vector<std::string> lookup_columns;    // prefix columns bound by join equality
  double est_rows = 0.0;                      // rows read per access (per probe for lookups)
  double cost = 0.0;                          // cost of one access at est_rows

  bool is_lookup() const { return !lookup_columns.empty(); }

  std::string descriptor() const {
    if (kind == AccessKind::FullScan) return "full_scan";
    std::string out = std::string(access_kind_name(kind)) + "(" + index->name;
    if (is_lookup()) out += ",ref";
    return out + ")";
  }
};

/// Lists candidate paths for one table: always a full scan, then per index
/// the longest usable prefix (equalities, then at most one range). Columns in
/// `join_bound` count as equality-bound (inner side of a nested-loop join).
inline std::vector<AccessPath> enumerate_access_paths(const TableEntry& table, const std::vector<RangeCond>& conds,
                                                      const std::vector<IndexDef>& indexes,
                                                      const std::set<std::string>& referenced_columns = {},
                                                      const std::set<std::string>& join_bound = {}) {
  std::vector<AccessPath> out;
  out.push_back(AccessPath{});
  for (const auto& idx : indexes) {
    if (!iequals(idx.table, table.name)) continue;
    AccessPath p;
    for (const auto& col : idx.columns) {
      const std::string lc = to_lower(col);
      if (join_bound.count(lc)) {
        p.lookup_columns.push_back(table.column(col) ? table.column(col)->name : col);
        continue;
      }
      auto it = std::find_if(conds.begin(), conds.end(), [&](const RangeCond& c) { return iequals(c.col_name, col); });
      if (it == conds.end()) break;
      p.matched_conditions.push_back(*it);
      if (!it->is_equality()) break;
    }
    if (p.matched_conditions.empty() && p.lookup_columns.empty()) continue;
    if (!join_bound.empty() && p.lookup_columns.empty()) continue;  // local-only paths come from the unbound pass
    bool covering = !referenced_columns.empty();
    for (const auto& rc : referenced_columns) {
      if (std::none_of(idx.columns.begin(), idx.columns.end(), [&](const std::string& c) { return iequals(c, rc); }))
        covering = false;
    }
    p.kind = covering ? AccessKind::IndexCovering : AccessKind::IndexRange;
    p.index = idx;
    out.push_back(std::move(p));
  }
  if (!join_bound.empty()) out.erase(out.begin());  // the unbound pass already supplied the full scan
  return out;
}

inline double cost_access_path(const AccessPath& path, const TableStatistics& stats, const CostConstants& cc,
                               double est_rows) {
  switch (path.kind) {
    case AccessKind::FullScan:
      return static_cast<double>(stats.page_count) * cc.seq_page_cost +
             static_cast<double>(stats.row_count) * cc.row_cpu_cost;
    case AccessKind::IndexRange: return est_rows * (cc.rand_page_cost + cc.row_cpu_cost);
    case AccessKind::IndexCovering: return est_rows * (cc.index_row_cost + cc.row_cpu_cost);
  }
  return 0.0;
}

/// Containment: |L ⋈ R| = |L|·|R| / max(ndv_L, ndv_R, 1).
inline double estimate_join_cardinality(double left_rows, double right_rows, double ndv_left_key,
                                        double ndv_right_key) {
  if (left_rows <= 0.0 || right_rows <= 0.0) return 0.0;
  return left_rows * right_rows / std::max({ndv_left_key, ndv_right_key, 1.0});
}

// ---------------------------------------------------------------------------
// Plans

struct PlanOperator {
  std::size_t table_pos = 0;
  std::string table;
  std::string alias;
  AccessPath access;
  std::vector<std::string> join_conditions;  // "alias.col = alias.col"
  double filtered_rows = 0.0;                // table rows after local conditions
  double est_rows = 0.0;                     // running cardinality after this operator
  double cost = 0.0;
  struct Candidate {
    AccessPath path;
    double cost = 0.0;
  };
  std::vector<Candidate> candidates;
};

struct PhysicalPlan {
  std::vector<PlanOperator> operators;
  double total_cost = 0.0;
  std::string signature;
  std::string search;  // "exhaustive" or "greedy"
  std::size_t orders_considered = 0;
  std::optional<double> est_groups;  // GROUP BY output estimate

  std::vector<std::string> join_order() const {
    std::vector<std::string> out;
    for (const auto& op : operators) out.push_back(op.alias);
    return out;
  }
};

struct EstimatorCall {
  std::string endpoint;  // cardinality | ndv
  std::string table;
  Json args;
  double value = 0.0;
  bool cached = false;
  bool degraded = false;
  std::string model;
};

struct Provenance {
  std::vector<EstimatorCall> calls;

  std::size_t cache_hits() const {
    return static_cast<std::size_t>(std::count_if(calls.begin(), calls.end(), [](const auto& c) { return c.cached; }));
  }
  bool degraded() const {
    return std::any_of(calls.begin(), calls.end(), [](const auto& c) { return c.degraded; });
  }
};

struct PlanResult {
  PhysicalPlan plan;
  Provenance provenance;
};

inline constexpr std::size_t kExhaustiveJoinLimit = 8;

namespace detail {

/// Deduplicates estimator traffic within one planning call and records it.
class RecordingClient {
 public:
  explicit RecordingClient(EstimatorClient& inner) : inner_(inner) {}

  double cardinality(const TableEntry& t, const std::vector<RangeCond>& input) {
    auto set = merge_conditions(input);
    if (set.empty) return 0.0;
    if (set.conds.empty()) return static_cast<double>(t.stats.row_count);
    auto conds = canonical_conditions(set.conds);
    Json args = Json::array();
    for (const auto& c : conds) args.push_back(c.to_json());
    const std::string key = "c\n" + t.name + "\n" + args.dump();
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    EstimatorClient::Cardinality r;
    try {
      r = inner_.cardinality(t.name, conds);
    } catch (const Error& e) {
      throw Error(Errc::EstimatorFailure,
                  "cardinality request failed {table: " + t.name + ", conditions: " + args.dump() + "}: " + e.message(),
                  e.path());
    }
    provenance.calls.push_back({"cardinality", t.name, args, r.rows, r.cached, r.degraded, r.model});
    memo_.emplace(key, r.rows);
    return r.rows;
  }

  double ndv(const TableEntry& t, const std::vector<std::string>& columns) {
    Json args = columns;
    const std::string key = "n\n" + t.name + "\n" + args.dump();
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    EstimatorClient::Ndv r;
    try {
      r = inner_.ndv(t.name, columns);
    } catch (const Error& e) {
      throw Error(Errc::EstimatorFailure,
                  "ndv request failed {table: " + t.name + ", columns: " + args.dump() + "}: " + e.message(), e.path());
    }
    provenance.calls.push_back({"ndv", t.name, args, r.ndv, r.cached, false, r.model});
    memo_.emplace(key, r.ndv);
    return r.ndv;
  }

  Provenance provenance;

 private:
  EstimatorClient& inner_;
  std::map<std::string, double> memo_;
};

struct TableInfo {
  const TableEntry* entry = nullptr;
  ConditionSet conds;
  std::set<std::string> referenced;
  std::vector<IndexDef> indexes;
  double filtered_rows = 0.0;
  std::vector<AccessPath> local_paths;  // costed
};

class Planner {
 public:
  Planner(const LogicalQuery& q, const CatalogSnapshot& snap, const std::vector<IndexDef>& virtual_indexes,
          EstimatorClient& client, const CostConstants& cc)
      : q_(q), snap_(snap), cc_(cc), client_(client) {
    for (std::size_t i = 0; i < q.tables.size(); ++i) {
      TableInfo info;
      info.entry = snap.table(q.tables[i].table);
      if (!info.entry) throw Error(Errc::UnknownTable, "table not in snapshot: " + q.tables[i].table, q.tables[i].table);
      info.conds = extract_range_conditions(q, i);
      info.referenced = q.referenced_columns(i, snap);
      info.indexes = info.entry->indexes;
      for (const auto& v : virtual_indexes) {
        if (iequals(v.table, info.entry->name)) info.indexes.push_back(v);
      }
      tables_.push_back(std::move(info));
    }
  }

  PlanResult run() {
    // Per-table conditions first, in table order.
    for (auto& t : tables_) {
      t.filtered_rows = client_.cardinality(*t.entry, t.conds.conds);
      if (t.conds.empty) t.filtered_rows = 0.0;
      t.local_paths = enumerate_access_paths(*t.entry, t.conds.conds, t.indexes, t.referenced);
      for (auto& p : t.local_paths) {
        p.est_rows = p.kind == AccessKind::FullScan ? static_cast<double>(t.entry->stats.row_count)
                                                    : client_.cardinality(*t.entry, p.matched_conditions);
        p.cost = cost_access_path(p, t.entry->stats, cc_, p.est_rows);
      }
    }

    const std::size_t n = tables_.size();
    std::optional<PhysicalPlan> best;
    std::size_t considered = 0;
    auto consider = [&](const std::vector<std::size_t>& order) {
      ++considered;
      PhysicalPlan p = build(order);
      if (!best || p.total_cost < best->total_cost ||
          (p.total_cost == best->total_cost && p.signature < best->signature))
        best = std::move(p);
    };
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::string search = "exhaustive";
    if (n <= kExhaustiveJoinLimit) {
      do {
        consider(order);
      } while (std::next_permutation(order.begin(), order.end()));
    } else {
      search = "greedy";
      consider(greedy_order());
    }
    best->search = search;
    best->orders_considered = considered;
    if (q_.group_by) best->est_groups = group_estimate(best->operators.back().est_rows);
    return PlanResult{std::move(*best), std::move(client_.provenance)};
  }

 private:
  struct JoinEdge {
    std::string inner_col;
    std::size_t outer_pos;
    std::string outer_col;
  };

  std::vector<JoinEdge> edges_into(std::size_t inner, const std::vector<bool>& placed) const {
    std::vector<JoinEdge> out;
    for (const auto& jp : q_.join_predicates) {
      if (jp.left.table == inner && placed[jp.right.table]) out.push_back({jp.left.column, jp.right.table, jp.right.column});
      if (jp.right.table == inner && placed[jp.left.table]) out.push_back({jp.right.column, jp.left.table, jp.left.column});
    }
    return out;
  }

  // Output cardinality of joining table `inner` onto a prefix producing `outer_rows`.
  double join_rows(double outer_rows, std::size_t inner, const std::vector<JoinEdge>& edges) {
    const double inner_rows = tables_[inner].filtered_rows;
    if (edges.empty()) return outer_rows * inner_rows;
    std::vector<std::string> inner_cols;
    std::map<std::size_t, std::vector<std::string>> outer_cols;
    for (const auto& e : edges) {
      if (std::find(inner_cols.begin(), inner_cols.end(), e.inner_col) == inner_cols.end()) inner_cols.push_back(e.inner_col);
      auto& oc = outer_cols[e.outer_pos];
      if (std::find(oc.begin(), oc.end(), e.outer_col) == oc.end()) oc.push_back(e.outer_col);
    }
    const double ndv_right = client_.ndv(*tables_[inner].entry, inner_cols);
    double ndv_left = 1.0;
    for (const auto& [pos, cols] : outer_cols) ndv_left *= client_.ndv(*tables_[pos].entry, cols);
    return estimate_join_cardinality(outer_rows, inner_rows, ndv_left, ndv_right);
  }

  PlanOperator place(std::size_t pos, bool first, double outer_rows, const std::vector<bool>& placed) {
    TableInfo& t = tables_[pos];
    PlanOperator op;
    op.table_pos = pos;
    op.table = t.entry->name;
    op.alias = q_.tables[pos].alias;
    op.filtered_rows = t.filtered_rows;
    auto edges = first ? std::vector<JoinEdge>{} : edges_into(pos, placed);
    for (const auto& e : edges)
      op.join_conditions.push_back(op.alias + "." + e.inner_col + " = " + q_.tables[e.outer_pos].alias + "." + e.outer_col);

    for (const auto& p : t.local_paths) {
      double cost = first ? p.cost : p.cost + outer_rows * t.filtered_rows * cc_.row_cpu_cost;
      op.candidates.push_back({p, cost});
    }
    if (!edges.empty()) {
      std::set<std::string> bound;
      for (const auto& e : edges) bound.insert(to_lower(e.inner_col));
      for (auto p : enumerate_access_paths(*t.entry, t.conds.conds, t.indexes, t.referenced, bound)) {
        const double base = p.matched_conditions.empty() ? static_cast<double>(t.entry->stats.row_count)
                                                         : client_.cardinality(*t.entry, p.matched_conditions);
        const double key_ndv = client_.ndv(*t.entry, p.lookup_columns);
        p.est_rows = std::clamp(base / std::max(key_ndv, 1.0), 0.0, static_cast<double>(t.entry->stats.row_count));
        p.cost = cost_access_path(p, t.entry->stats, cc_, p.est_rows);
        op.candidates.push_back({p, outer_rows * p.cost});
      }
    }
    const PlanOperator::Candidate* chosen = nullptr;
    for (const auto& c : op.candidates) {
      if (!chosen || c.cost < chosen->cost ||
          (c.cost == chosen->cost && c.path.descriptor() < chosen->path.descriptor()))
        chosen = &c;
    }
    op.access = chosen->path;
    op.cost = chosen->cost;
    op.est_rows = first ? t.filtered_rows : join_rows(outer_rows, pos, edges);
    return op;
  }

  PhysicalPlan build(const std::vector<std::size_t>& order) {
    PhysicalPlan plan;
    std::vector<bool> placed(tables_.size(), false);
    double rows = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      PlanOperator op = place(order[k], k == 0, rows, placed);
      placed[order[k]] = true;
      rows = op.est_rows;
      plan.total_cost += op.cost;
      plan.operators.push_back(std::move(op));
    }
    plan.signature = signature_of(plan);
    return plan;
  }

  // Groups = min(result rows, product of per-table NDVs of the grouping columns).
  double group_estimate(double rows) {
    std::map<std::size_t, std::vector<std::string>> cols;
    for (const auto& g : *q_.group_by) {
      auto& v = cols[g.table];
      if (std::find(v.begin(), v.end(), g.column) == v.end()) v.push_back(g.column);
    }
    double groups = 1.0;
    for (const auto& [pos, c] : cols) groups *= client_.ndv(*tables_[pos].entry, c);
    return std::min(groups, rows);
  }

  std::vector<std::size_t> greedy_order() {
    const std::size_t n = tables_.size();
    std::vector<std::size_t> order;
    std::vector<bool> placed(n, false);
    std::size_t start = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (tables_[i].filtered_rows < tables_[start].filtered_rows) start = i;
    order.push_back(start);
    placed[start] = true;
    double rows = tables_[start].filtered_rows;
    while (order.size() < n) {
      std::optional<std::size_t> pick;
      double pick_rows = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (placed[i]) continue;
        double r = join_rows(rows, i, edges_into(i, placed));
        if (!pick || r < pick_rows) {
          pick = i;
          pick_rows = r;
        }
      }
      order.push_back(*pick);
      placed[*pick] = true;
      rows = pick_rows;
    }
    return order;
  }

  const LogicalQuery& q_;
  const CatalogSnapshot& snap_;
  const CostConstants& cc_;
  RecordingClient client_;
  std::vector<TableInfo> tables_;

 public:
  static std::string signature_of(const PhysicalPlan& plan) {
    std::string s;
    for (const auto& op : plan.operators) {
      if (!s.empty()) s += " -> ";
      s += op.alias + "=" + op.access.descriptor();
    }
    return s;
  }
};

}  // namespace detail

/// Cost-based left-deep planning: exhaustive over join orders up to eight
/// tables, greedy beyond. Row counts and page counts come from the snapshot;
/// every selectivity and NDV goes through `client`.
inline PlanResult plan_query(const LogicalQuery& query, const CatalogSnapshot& snapshot,
                             const std::vector<IndexDef>& virtual_indexes, EstimatorClient& client,
                             const CostConstants& constants) {
  if (query.tables.empty()) throw Error(Errc::InvalidArgument, "query has no tables", "");
  return detail::Planner(query, snapshot, virtual_indexes, client, constants).run();
}

inline PlanResult plan_query(const LogicalQuery& query, const CatalogSnapshot& snapshot,
                             const std::vector<IndexDef>& virtual_indexes, EstimatorClient& client) {
  return plan_query(query, snapshot, virtual_indexes, client, snapshot.cost_constants);
}

// ---------------------------------------------------------------------------
// EXPLAIN

/// Deterministic plan document (sorted keys, shortest round-trip numbers).
struct ExplainDocument {
  Json body;

  std::string serialize() const { return body.dump(2) + "\n"; }
  const std::string& query() const { return body.at("query").get_ref<const std::string&>(); }

  /// The document without provenance (identical across cache states).
  Json plan_section() const {
    Json j = body;
    j.erase("provenance");
    return j;
  }

  friend bool operator==(const ExplainDocument& a, const ExplainDocument& b) { return a.body == b.body; }
};

inline Json access_path_json(const AccessPath& p) {
  Json j{{"kind", access_kind_name(p.kind)}, {"descriptor", p.descriptor()}, {"path_rows", p.est_rows}};
  if (p.index) {
    j["index"] = p.index->name;
    j["origin"] = p.index->is_virtual() ? "virtual" : "real";
    j["index_columns"] = p.index->columns;
    j["unique"] = p.index->unique;
  } else {
    j["index"] = nullptr;
    j["origin"] = nullptr;
  }
  j["matched_conditions"] = Json::array();
  for (const auto& c : p.matched_conditions) j["matched_conditions"].push_back(describe(c));
  j["lookup_columns"] = p.lookup_columns;
  return j;
}

inline ExplainDocument explain(const PhysicalPlan& plan, const Provenance& provenance, const std::string& query_text) {
  Json ops = Json::array();
  for (std::size_t k = 0; k < plan.operators.size(); ++k) {
    const auto& op = plan.operators[k];
    Json cands = Json::array();
    for (const auto& c : op.candidates) {
      Json cj = access_path_json(c.path);
      cj["cost"] = c.cost;
      cj["chosen"] = c.path.descriptor() == op.access.descriptor();
      cands.push_back(std::move(cj));
    }
    ops.push_back(Json{{"position", k},
                       {"table", op.table},
                       {"alias", op.alias},
                       {"access", access_path_json(op.access)},
                       {"join_conditions", op.join_conditions},
                       {"filtered_rows", op.filtered_rows},
                       {"est_rows", op.est_rows},
                       {"cost", op.cost},
                       {"candidates", std::move(cands)}});
  }
  Json calls = Json::array();
  std::set<std::string> models;
  for (const auto& c : provenance.calls) {
    calls.push_back(Json{{"endpoint", c.endpoint},
                         {"table", c.table},
                         {"args", c.args},
                         {"value", c.value},
                         {"cached", c.cached},
                         {"degraded", c.degraded}});
    if (!c.model.empty()) models.insert(c.model);
  }
  std::string model;
  for (const auto& m : models) model += (model.empty() ? "" : ",") + m;
  Json groups = plan.est_groups ? Json(*plan.est_groups) : Json(nullptr);
  return ExplainDocument{Json{{"query", query_text},
                              {"est_groups", std::move(groups)},
                              {"join_order", plan.join_order()},
                              {"signature", plan.signature},
                              {"total_cost", plan.total_cost},
                              {"search", plan.search},
                              {"orders_considered", plan.orders_considered},
                              {"operators", std::move(ops)},
                              {"provenance",
                               {{"model", model},
                                {"requests", provenance.calls.size()},
                                {"cache_hits", provenance.cache_hits()},
                                {"degraded", provenance.degraded()},
                                {"calls", std::move(calls)}}}}};
}

inline ExplainDocument explain(const PlanResult& result, const std::string& query_text) {
  return explain(result.plan, result.provenance, query_text);
}

/// Fixed-width table rendering of an EXPLAIN document.
inline std::string render_explain_table(const ExplainDocument& doc) {
  std::ostringstream out;
  out << "query: " << doc.body.at("query").get<std::string>() << "\n";
  out << std::left << std::setw(4) << "#" << std::setw(14) << "table" << std::setw(16) << "access" << std::setw(22)
      << "index" << std::setw(9) << "origin" << std::right << std::setw(14) << "rows" << std::setw(14) << "cost"
      << "\n";
  for (const auto& op : doc.body.at("operators")) {
    const auto& a = op.at("access");
    out << std::left << std::setw(4) << op.at("position").get<std::size_t>() << std::setw(14)
        << op.at("alias").get<std::string>() << std::setw(16) << a.at("kind").get<std::string>() << std::setw(22)
        << (a.at("index").is_null() ? "-" : a.at("index").get<std::string>() + (a.at("lookup_columns").empty() ? "" : " (ref)"))
        << std::setw(9) << (a.at("origin").is_null() ? "-" : a.at("origin").get<std::string>()) << std::right
        << std::setw(14) << std::fixed << std::setprecision(2) << op.at("est_rows").get<double>() << std::setw(14)
        << op.at("cost").get<double>() << "\n";
  }
  out << "total_cost: " << std::fixed << std::setprecision(4) << doc.body.at("total_cost").get<double>() << "\n";
  return out.str();
}

}  // namespace videx
