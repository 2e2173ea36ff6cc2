#pragma once

#include <atomic>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include "videx/catalog.hpp"
#include "videx/common.hpp"
#include "videx/estimator.hpp"
#include "videx/optimizer.hpp"
#include "videx/sql.hpp"
#include "videx/wire.hpp"

namespace videx {

/// One analysis context: an immutable snapshot, a private list of virtual
/// indexes and an estimator client. Holds no table rows.
class Session {
 public:
  Session(std::string session_id, std::string task_id, std::shared_ptr<const CatalogSnapshot> snapshot,
          std::unique_ptr<EstimatorClient> client, std::string model_name, std::string endpoint)
      : id_(std::move(session_id)),
        task_id_(std::move(task_id)),
        snapshot_(std::move(snapshot)),
        client_(std::move(client)),
        model_name_(std::move(model_name)),
        endpoint_(std::move(endpoint)) {}

  const std::string& id() const { return id_; }
  const std::string& task_id() const { return task_id_; }
  const CatalogSnapshot& snapshot() const { return *snapshot_; }
  std::shared_ptr<const CatalogSnapshot> snapshot_ptr() const { return snapshot_; }
  const std::string& model_name() const { return model_name_; }
  const std::string& endpoint() const { return endpoint_; }

  std::vector<IndexDef> virtual_indexes() const {
    std::lock_guard lock(mu_);
    return virtual_indexes_;
  }

  /// Registers a virtual index; the name defaults to v_<table>_<col>_<col>.
  IndexDef add_virtual_index(const std::string& table, const std::vector<std::string>& columns, bool unique = false,
                             std::optional<std::string> name = std::nullopt) {
    const TableEntry* t = snapshot_->table(table);
    if (!t) throw Error(Errc::UnknownTable, "unknown table " + table, table);
    if (columns.empty()) throw Error(Errc::InvalidArgument, "virtual index needs at least one column", "columns");
    IndexDef idx;
    idx.table = t->name;
    idx.unique = unique;
    idx.origin = IndexOrigin::Virtual;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const ColumnDef* c = t->column(columns[i]);
      if (!c) throw Error(Errc::UnknownColumn, "unknown column " + t->name + "." + columns[i], "columns[" + std::to_string(i) + "]");
      for (const auto& prev : idx.columns) {
        if (prev == c->name)
          throw Error(Errc::InvalidArgument, "column repeated in index: " + c->name, "columns[" + std::to_string(i) + "]");
      }
      idx.columns.push_back(c->name);
    }
    if (name) {
      idx.name = *name;
    } else {
      idx.name = "v_" + t->name;
      for (const auto& c : idx.columns) idx.name += "_" + c;
    }
    if (idx.name.empty()) throw Error(Errc::InvalidArgument, "index name is empty", "name");

    std::lock_guard lock(mu_);
    for (const auto& real : t->indexes) {
      if (iequals(real.name, idx.name)) throw Error(Errc::DuplicateIndex, "index name taken by a real index: " + idx.name, idx.name);
    }
    for (const auto& v : virtual_indexes_) {
      if (iequals(v.name, idx.name)) throw Error(Errc::DuplicateIndex, "virtual index already exists: " + idx.name, idx.name);
    }
    virtual_indexes_.push_back(idx);
    return idx;
  }

  void drop_virtual_index(const std::string& name) {
    std::lock_guard lock(mu_);
    for (auto it = virtual_indexes_.begin(); it != virtual_indexes_.end(); ++it) {
      if (iequals(it->name, name)) {
        virtual_indexes_.erase(it);
        return;
      }
    }
    for (const auto& [key, t] : snapshot_->tables) {
      for (const auto& real : t.indexes) {
        if (iequals(real.name, name)) throw Error(Errc::InvalidArgument, "cannot drop real index " + real.name, name);
      }
    }
    throw Error(Errc::UnknownIndex, "no virtual index named " + name, name);
  }

  /// Parses and plans `sql` against the snapshot plus this session's virtual
  /// indexes; calls within one session are serialized.
  ExplainDocument explain_sql(const std::string& sql) {
    std::lock_guard lock(mu_);
    LogicalQuery q = parse(sql, *snapshot_);
    PlanResult r = plan_query(q, *snapshot_, virtual_indexes_, *client_);
    return explain(r, sql);
  }

  Json describe() const {
    std::lock_guard lock(mu_);
    Json vidx = Json::array();
    for (const auto& v : virtual_indexes_) vidx.push_back(index_def_json(v));
    Json tables = Json::array();
    for (const auto& [key, t] : snapshot_->tables) {
      Json idx = Json::array();
      for (const auto& i : t.indexes) idx.push_back(index_def_json(i));
      tables.push_back(Json{{"name", t.name},
                            {"row_count", t.stats.row_count},
                            {"page_count", t.stats.page_count},
                            {"indexes", std::move(idx)}});
    }
    return Json{{"session_id", id_},
                {"task_id", task_id_},
                {"model", model_name_},
                {"endpoint", endpoint_},
                {"tables", std::move(tables)},
                {"virtual_indexes", std::move(vidx)},
                {"snapshot", snapshot_to_json(*snapshot_)}};
  }

  static Json index_def_json(const IndexDef& idx) {
    return Json{{"name", idx.name},
                {"table", idx.table},
                {"columns", idx.columns},
                {"unique", idx.unique},
                {"origin", idx.is_virtual() ? "virtual" : "real"}};
  }

 private:
  std::string id_;
  std::string task_id_;
  std::shared_ptr<const CatalogSnapshot> snapshot_;
  std::unique_ptr<EstimatorClient> client_;
  std::string model_name_;
  std::string endpoint_;
  mutable std::mutex mu_;
  std::vector<IndexDef> virtual_indexes_;
};

/// Task ids are derived from content so re-creating a session from the same
/// metadata and model reuses the loaded task.
inline std::string task_id_for(const std::string& digest, const std::string& model_name,
                               const std::optional<std::string>& model_path) {
  return "task-" + hex64(fnv1a64(digest + "\n" + model_name + "\n" + model_path.value_or("")));
}

/// Loads `metadata` into the statistics server behind `stats` and returns a
/// session whose estimator traffic all goes through that server.
inline std::unique_ptr<Session> create_session(std::string session_id, std::string_view metadata,
                                               const std::string& model_name, std::shared_ptr<Transport> stats,
                                               std::optional<std::string> model_path = std::nullopt) {
  auto snapshot = std::make_shared<const CatalogSnapshot>(load_metadata(metadata));
  const std::string body = serialize_metadata(*snapshot);
  const std::string task_id = task_id_for(snapshot_digest(*snapshot), model_name, model_path);
  std::map<std::string, std::string> query{{"model", model_name}};
  if (model_path) query["model_path"] = *model_path;
  expect_ok(stats->post("/v1/tasks/" + task_id + "/stats", body, query), "load stats");
  const std::string endpoint = stats->endpoint();
  return std::make_unique<Session>(std::move(session_id), task_id, std::move(snapshot),
                                   std::make_unique<RemoteEstimatorClient>(stats, task_id), model_name, endpoint);
}

/// A session answering from a model in this process (no statistics server).
inline std::unique_ptr<Session> create_local_session(std::string session_id,
                                                     std::shared_ptr<const CatalogSnapshot> snapshot,
                                                     std::shared_ptr<const EstimatorModel> model) {
  std::string name = model->name();
  return std::make_unique<Session>(std::move(session_id), "", std::move(snapshot),
                                   std::make_unique<LocalModelClient>(std::move(model)), name, "local");
}

// ---------------------------------------------------------------------------
// Plan comparison

struct PathDifference {
  std::string alias;
  std::string a_kind, a_index;
  std::string b_kind, b_index;
};

struct OperatorComparison {
  std::size_t position = 0;
  std::string alias_a, alias_b;
  double rows_a = 0.0, rows_b = 0.0;
  double q_error = 1.0;
};

struct PlanDiff {
  bool join_order_equal = true;
  bool index_selection_equal = true;
  std::vector<PathDifference> path_differences;
  std::vector<OperatorComparison> operators;
  double avg_q_error = 1.0;
  double cost_a = 0.0, cost_b = 0.0;

  Json to_json() const {
    Json diffs = Json::array();
    for (const auto& d : path_differences)
      diffs.push_back(Json{{"alias", d.alias},
                           {"a", {{"kind", d.a_kind}, {"index", d.a_index}}},
                           {"b", {{"kind", d.b_kind}, {"index", d.b_index}}}});
    Json ops = Json::array();
    for (const auto& o : operators)
      ops.push_back(Json{{"position", o.position},
                         {"alias_a", o.alias_a},
                         {"alias_b", o.alias_b},
                         {"rows_a", o.rows_a},
                         {"rows_b", o.rows_b},
                         {"q_error", o.q_error}});
    return Json{{"join_order_equal", join_order_equal},
                {"index_selection_equal", index_selection_equal},
                {"path_differences", std::move(diffs)},
                {"operators", std::move(ops)},
                {"avg_q_error", avg_q_error},
                {"cost_a", cost_a},
                {"cost_b", cost_b},
                {"cost_delta", cost_b - cost_a}};
  }
};

namespace detail {

inline std::string access_label(const Json& access) {
  if (access.at("index").is_null()) return "";
  std::string s = access.at("index").get<std::string>();
  if (!access.at("lookup_columns").empty()) s += ",ref";
  return s;
}

}  // namespace detail

/// Aligns two documents for the same query by join position and compares
/// per-operator row estimates.
inline PlanDiff diff_plans(const ExplainDocument& a, const ExplainDocument& b) {
  if (a.query() != b.query())
    throw Error(Errc::QueryMismatch, "documents describe different queries: '" + a.query() + "' vs '" + b.query() + "'",
                "query");
  PlanDiff d;
  d.join_order_equal = a.body.at("join_order") == b.body.at("join_order");
  d.cost_a = a.body.at("total_cost").get<double>();
  d.cost_b = b.body.at("total_cost").get<double>();

  const auto& ops_a = a.body.at("operators");
  const auto& ops_b = b.body.at("operators");
  std::map<std::string, const Json*> by_alias_b;
  for (const auto& op : ops_b) by_alias_b[op.at("alias").get<std::string>()] = &op;
  for (const auto& op : ops_a) {
    const std::string alias = op.at("alias").get<std::string>();
    auto it = by_alias_b.find(alias);
    const Json& pa = op.at("access");
    PathDifference pd{alias, pa.at("kind").get<std::string>(), detail::access_label(pa), "", ""};
    if (it != by_alias_b.end()) {
      const Json& pb = it->second->at("access");
      pd.b_kind = pb.at("kind").get<std::string>();
      pd.b_index = detail::access_label(pb);
    }
    if (pd.a_kind != pd.b_kind || pd.a_index != pd.b_index) d.path_differences.push_back(std::move(pd));
  }
  d.index_selection_equal = d.path_differences.empty();

  const std::size_t n = std::min(ops_a.size(), ops_b.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    OperatorComparison oc;
    oc.position = k;
    oc.alias_a = ops_a[k].at("alias").get<std::string>();
    oc.alias_b = ops_b[k].at("alias").get<std::string>();
    oc.rows_a = ops_a[k].at("est_rows").get<double>();
    oc.rows_b = ops_b[k].at("est_rows").get<double>();
    oc.q_error = q_error(oc.rows_b, oc.rows_a);
    sum += oc.q_error;
    d.operators.push_back(std::move(oc));
  }
  d.avg_q_error = n == 0 ? 1.0 : sum / static_cast<double>(n);
  return d;
}

struct QErrorReport {
  struct Entry {
    std::string sql;
    std::optional<PlanDiff> diff;
    std::string error;  // set when either side failed
  };
  std::vector<Entry> entries;
  std::size_t succeeded = 0;
  std::size_t failed = 0;
  double match_rate_join_order = 1.0;
  double match_rate_index = 1.0;
  double avg_q_error = 1.0;
  double max_q_error = 1.0;
  std::size_t operators = 0;

  Json to_json() const {
    Json qs = Json::array();
    for (const auto& e : entries) {
      Json j{{"sql", e.sql}};
      if (e.diff) {
        j["join_order_equal"] = e.diff->join_order_equal;
        j["index_selection_equal"] = e.diff->index_selection_equal;
        j["avg_q_error"] = e.diff->avg_q_error;
      } else {
        j["error"] = e.error;
      }
      qs.push_back(std::move(j));
    }
    return Json{{"queries", std::move(qs)},
                {"succeeded", succeeded},
                {"failed", failed},
                {"operators", operators},
                {"match_rate_join_order", match_rate_join_order},
                {"match_rate_index", match_rate_index},
                {"avg_q_error", avg_q_error},
                {"max_q_error", max_q_error}};
  }

  std::string render_table() const {
    std::ostringstream out;
    out << std::left << std::setw(6) << "query" << std::setw(12) << "join_order" << std::setw(10) << "indexes"
        << std::right << std::setw(12) << "avg_qerr" << "\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      out << std::left << std::setw(6) << i;
      if (e.diff) {
        out << std::setw(12) << (e.diff->join_order_equal ? "same" : "DIFF") << std::setw(10)
            << (e.diff->index_selection_equal ? "same" : "DIFF") << std::right << std::setw(12) << std::fixed
            << std::setprecision(4) << e.diff->avg_q_error << "\n";
      } else {
        out << "error: " << e.error << "\n";
      }
    }
    out << std::fixed << std::setprecision(4) << "join-order match " << match_rate_join_order << ", index match "
        << match_rate_index << ", avg q-error " << avg_q_error << " over " << operators << " operators, " << failed
        << " failed\n";
    return out.str();
  }
};

/// Explains every query under both sessions and aggregates the diffs. Match
/// rates are over queries that planned on both sides; the q-error average is
/// pooled over all their operators.
inline QErrorReport qerror_report(const std::vector<std::string>& workload, Session& mode_a, Session& mode_b) {
  QErrorReport r;
  std::size_t jo = 0, ix = 0;
  double sum = 0.0;
  for (const auto& sql : workload) {
    QErrorReport::Entry e{sql, std::nullopt, ""};
    try {
      auto da = mode_a.explain_sql(sql);
      auto db = mode_b.explain_sql(sql);
      e.diff = diff_plans(da, db);
    } catch (const Error& err) {
      e.error = std::string(errc_name(err.code())) + ": " + err.message();
    }
    if (e.diff) {
      ++r.succeeded;
      jo += e.diff->join_order_equal;
      ix += e.diff->index_selection_equal;
      for (const auto& op : e.diff->operators) {
        sum += op.q_error;
        r.max_q_error = std::max(r.max_q_error, op.q_error);
        ++r.operators;
      }
    } else {
      ++r.failed;
    }
    r.entries.push_back(std::move(e));
  }
  if (r.succeeded > 0) {
    r.match_rate_join_order = static_cast<double>(jo) / static_cast<double>(r.succeeded);
    r.match_rate_index = static_cast<double>(ix) / static_cast<double>(r.succeeded);
  }
  if (r.operators > 0) r.avg_q_error = sum / static_cast<double>(r.operators);
  return r;
}

// ---------------------------------------------------------------------------
// HTTP facade

/// Session registry and the HTTP surface the console drives.
class WhatIfService {
 public:
  explicit WhatIfService(std::shared_ptr<Transport> stats) : stats_(std::move(stats)) {}

  WhatIfService(const WhatIfService&) = delete;
  WhatIfService& operator=(const WhatIfService&) = delete;

  std::shared_ptr<Session> create(std::string_view metadata, const std::string& model_name,
                                  std::optional<std::string> model_path = std::nullopt) {
    const std::string id = "s" + std::to_string(next_id_.fetch_add(1) + 1);
    std::shared_ptr<Session> s = create_session(id, metadata, model_name, stats_, std::move(model_path));
    std::unique_lock lock(mu_);
    sessions_[id] = s;
    return s;
  }

  std::shared_ptr<Session> session(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(Errc::UnknownSession, "unknown session " + id, id);
    return it->second;
  }

  HttpResponse handle(const HttpRequest& req) {
    try {
      const auto parts = split_path(req.path);
      if (parts.size() < 2 || parts[0] != "v1") throw Error(Errc::NotFound, "no route for " + req.path, req.path);
      if (parts[1] == "sessions") {
        if (req.method == "POST" && parts.size() == 2) return json_response(post_session(parse_json_body(req.body)));
        if (parts.size() >= 3) {
          auto s = session(parts[2]);
          if (req.method == "GET" && parts.size() == 3) return json_response(s->describe());
          if (req.method == "POST" && parts.size() == 4 && parts[3] == "virtual-indexes")
            return json_response(post_virtual_index(*s, parse_json_body(req.body)));
          if (req.method == "DELETE" && parts.size() == 5 && parts[3] == "virtual-indexes") {
            s->drop_virtual_index(parts[4]);
            return json_response(Json{{"dropped", parts[4]}, {"session_id", s->id()}});
          }
          if (req.method == "POST" && parts.size() == 4 && parts[3] == "explain") {
            Json body = parse_json_body(req.body);
            if (!body.is_object() || !body.contains("sql") || !body["sql"].is_string())
              throw Error(Errc::BadRequest, "body needs a string 'sql'", "/sql");
            return json_response(s->explain_sql(body["sql"].get<std::string>()).body);
          }
        }
      }
      if (req.method == "POST" && parts.size() == 2 && parts[1] == "diff") {
        Json body = parse_json_body(req.body);
        if (!body.is_object() || !body.contains("a") || !body.contains("b"))
          throw Error(Errc::BadRequest, "body needs documents 'a' and 'b'", "");
        return json_response(diff_plans(ExplainDocument{body["a"]}, ExplainDocument{body["b"]}).to_json());
      }
      throw Error(Errc::NotFound, "no route for " + req.method + " " + req.path, req.path);
    } catch (const Error& e) {
      return error_response(e);
    } catch (const nlohmann::json::exception& e) {
      return error_response(Error(Errc::BadRequest, std::string("malformed document: ") + e.what(), ""));
    } catch (const std::exception& e) {
      return {500, Json{{"code", "INTERNAL"}, {"message", e.what()}, {"path", ""}}.dump()};
    }
  }

 private:
  Json post_session(const Json& body) {
    if (!body.is_object() || !body.contains("metadata"))
      throw Error(Errc::BadRequest, "body needs 'metadata'", "/metadata");
    const Json& m = body["metadata"];
    std::string text = m.is_string() ? m.get<std::string>() : m.dump();
    std::string model = body.value("model", "independence");
    std::optional<std::string> model_path;
    if (body.contains("model_path") && body["model_path"].is_string()) model_path = body["model_path"].get<std::string>();
    return create(text, model, model_path)->describe();
  }

  static Json post_virtual_index(Session& s, const Json& body) {
    if (!body.is_object()) throw Error(Errc::BadRequest, "body must be an object", "");
    if (!body.contains("table") || !body["table"].is_string())
      throw Error(Errc::BadRequest, "body needs a string 'table'", "/table");
    if (!body.contains("columns") || !body["columns"].is_array())
      throw Error(Errc::BadRequest, "body needs an array 'columns'", "/columns");
    std::vector<std::string> cols;
    for (std::size_t i = 0; i < body["columns"].size(); ++i) {
      if (!body["columns"][i].is_string())
        throw Error(Errc::BadRequest, "column names must be strings", "/columns/" + std::to_string(i));
      cols.push_back(body["columns"][i].get<std::string>());
    }
    std::optional<std::string> name;
    if (body.contains("name") && body["name"].is_string()) name = body["name"].get<std::string>();
    return Session::index_def_json(
        s.add_virtual_index(body["table"].get<std::string>(), cols, body.value("unique", false), name));
  }

  std::shared_ptr<Transport> stats_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::atomic<std::uint64_t> next_id_{0};
};

}  // namespace videx
