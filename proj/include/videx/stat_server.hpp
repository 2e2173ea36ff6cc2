#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "videx/catalog.hpp"
#include "videx/common.hpp"
#include "videx/estimator.hpp"
#include "videx/range_cond.hpp"
#include "videx/wire.hpp"

namespace videx {

/// Canonical request key → response body (without the `cached` flag).
class ResponseCache {
 public:
  std::optional<Json> lookup(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void store(const std::string& key, Json value) {
    std::lock_guard lock(mu_);
    entries_.emplace(key, std::move(value));
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, Json> entries_;
};

struct TaskContext {
  std::string task_id;
  std::shared_ptr<const CatalogSnapshot> snapshot;
  std::shared_ptr<const EstimatorModel> model;
  std::string model_name;
  std::optional<std::string> model_path;
  std::string digest;
  ResponseCache cache;
  std::atomic<std::uint64_t> hits{0};
  std::atomic<std::uint64_t> misses{0};

  void append_log(Json entry) {
    std::lock_guard lock(log_mu_);
    entry["seq"] = log_.size();
    log_.push_back(std::move(entry));
  }

  std::vector<Json> log() const {
    std::lock_guard lock(log_mu_);
    return log_;
  }

  std::size_t log_size() const {
    std::lock_guard lock(log_mu_);
    return log_.size();
  }

 private:
  mutable std::mutex log_mu_;
  std::vector<Json> log_;
};

struct StatServerOptions {
  std::size_t max_body_bytes = 256u << 20;
  bool enable_cache = true;
};

/// The statistics service: per-task snapshots and models, cardinality / NDV
/// endpoints, response cache and request log. `handle` is the whole HTTP
/// surface; sockets are bound separately (see http.hpp).
class StatServer {
 public:
  explicit StatServer(ModelRegistry registry = ModelRegistry::with_builtin_models(), StatServerOptions options = {})
      : registry_(std::move(registry)), options_(options) {}

  StatServer(const StatServer&) = delete;
  StatServer& operator=(const StatServer&) = delete;

  const ModelRegistry& registry() const { return registry_; }

  HttpResponse handle(const HttpRequest& req) {
    try {
      if (req.body.size() > options_.max_body_bytes)
        throw Error(Errc::PayloadTooLarge,
                    "body of " + std::to_string(req.body.size()) + " bytes exceeds limit " +
                        std::to_string(options_.max_body_bytes),
                    "");
      const auto parts = split_path(req.path);
      if (parts.size() < 2 || parts[0] != "v1") throw Error(Errc::NotFound, "no route for " + req.path, req.path);
      if (req.method == "GET" && parts.size() == 2 && parts[1] == "health") return json_response(health());
      if (req.method == "POST" && parts.size() == 2 && parts[1] == "cardinality")
        return json_response(handle_cardinality(parse_json_body(req.body)));
      if (req.method == "POST" && parts.size() == 2 && parts[1] == "ndv")
        return json_response(handle_ndv(parse_json_body(req.body)));
      if (parts[1] == "tasks" && parts.size() >= 3) {
        const std::string& task_id = parts[2];
        if (req.method == "POST" && parts.size() == 4 && parts[3] == "stats") {
          auto param = [&](const char* k) -> std::optional<std::string> {
            auto it = req.query.find(k);
            if (it == req.query.end()) return std::nullopt;
            return it->second;
          };
          bool replace = param("replace") && (*param("replace") == "true" || *param("replace") == "1");
          return json_response(load_task_stats(task_id, req.body, param("model").value_or("independence"), replace,
                                               param("model_path")));
        }
        if (req.method == "GET" && parts.size() == 4 && parts[3] == "log") return json_response(task_log(task_id));
        if (req.method == "GET" && parts.size() == 3) return json_response(describe_task(task_id));
        if (req.method == "DELETE" && parts.size() == 3) return json_response(unload_task(task_id));
      }
      throw Error(Errc::NotFound, "no route for " + req.method + " " + req.path, req.path);
    } catch (const Error& e) {
      return error_response(e);
    } catch (const std::exception& e) {
      return {500, Json{{"code", "INTERNAL"}, {"message", e.what()}, {"path", ""}}.dump()};
    }
  }

  /// Idempotent for identical (content, model); different content for a
  /// loaded task is a VERSION_CONFLICT unless `replace`.
  Json load_task_stats(const std::string& task_id, std::string_view metadata, const std::string& model_name,
                       bool replace = false, std::optional<std::string> model_path = std::nullopt) {
    check_task_id(task_id);
    registry_.require(model_name);
    auto snapshot = std::make_shared<const CatalogSnapshot>(load_metadata(metadata));
    const std::string digest = snapshot_digest(*snapshot);

    std::unique_lock lock(tasks_mu_);
    std::string status = "loaded";
    if (auto it = tasks_.find(task_id); it != tasks_.end()) {
      const auto& existing = *it->second;
      if (existing.digest == digest && existing.model_name == model_name && existing.model_path == model_path)
        return ack(existing, "unchanged");
      if (!replace)
        throw Error(Errc::VersionConflict,
                    "task " + task_id + " already holds different statistics or model; pass replace=true", task_id);
      status = "replaced";
    }
    auto ctx = std::make_shared<TaskContext>();
    ctx->task_id = task_id;
    ctx->snapshot = snapshot;
    ctx->model_name = model_name;
    ctx->model_path = model_path;
    ctx->digest = digest;
    ctx->model = model_for(model_name, digest, snapshot, model_path);
    Json out = ack(*ctx, status);
    tasks_[task_id] = std::move(ctx);
    return out;
  }

  Json handle_cardinality(const Json& body) {
    if (!body.is_object()) throw Error(Errc::BadRequest, "body must be an object", "");
    auto task = find_task(string_member(body, "task_id"));
    const std::string table_arg = string_member(body, "table");
    auto conds_it = body.find("conditions");
    if (conds_it == body.end() || !conds_it->is_array())
      throw Error(Errc::BadRequest, "conditions must be an array", "/conditions");
    std::vector<RangeCond> conds;
    for (std::size_t i = 0; i < conds_it->size(); ++i)
      conds.push_back(RangeCond::from_json((*conds_it)[i], "/conditions/" + std::to_string(i)));

    const TableEntry* table = task->snapshot->table(table_arg);
    Json canonical{{"table", table ? table->name : table_arg}, {"conditions", Json::array()}};
    const auto normalized = canonical_conditions(conds);
    for (const auto& c : normalized) canonical["conditions"].push_back(c.to_json());

    return serve(*task, "cardinality", canonical, [&] {
      if (!table) throw Error(Errc::UnknownTable, "no statistics loaded for table " + table_arg, "/table");
      auto est = task->model->cardinality(table->name, normalized);
      return Json{{"rows", est.rows}, {"degraded", est.degraded}, {"model", est.model_name}};
    });
  }

  Json handle_ndv(const Json& body) {
    if (!body.is_object()) throw Error(Errc::BadRequest, "body must be an object", "");
    auto task = find_task(string_member(body, "task_id"));
    const std::string table_arg = string_member(body, "table");
    auto cols_it = body.find("columns");
    if (cols_it == body.end() || !cols_it->is_array()) throw Error(Errc::BadRequest, "columns must be an array", "/columns");
    std::vector<std::string> columns;
    for (std::size_t i = 0; i < cols_it->size(); ++i) {
      if (!(*cols_it)[i].is_string()) throw Error(Errc::BadRequest, "column must be a string", "/columns/" + std::to_string(i));
      columns.push_back((*cols_it)[i].get<std::string>());
    }
    const TableEntry* table = task->snapshot->table(table_arg);
    Json canonical{{"table", table ? table->name : table_arg}, {"columns", Json::array()}};
    for (const auto& c : columns) {
      const ColumnDef* col = table ? table->column(c) : nullptr;
      canonical["columns"].push_back(col ? col->name : c);
    }
    return serve(*task, "ndv", canonical, [&] {
      if (!table) throw Error(Errc::UnknownTable, "no statistics loaded for table " + table_arg, "/table");
      auto est = task->model->ndv(table->name, columns);
      return Json{{"ndv", est.ndv}, {"model", est.model_name}};
    });
  }

  Json task_log(const std::string& task_id) const {
    auto task = find_task(task_id);
    Json entries = Json::array();
    for (auto& e : task->log()) entries.push_back(std::move(e));
    return Json{{"task_id", task_id}, {"entries", std::move(entries)}};
  }

  Json describe_task(const std::string& task_id) const {
    auto task = find_task(task_id);
    return ack(*task, "loaded");
  }

  Json unload_task(const std::string& task_id) {
    std::unique_lock lock(tasks_mu_);
    if (tasks_.erase(task_id) == 0) throw Error(Errc::UnknownTask, "unknown task " + task_id, task_id);
    return Json{{"task_id", task_id}, {"status", "unloaded"}};
  }

  Json health() const {
    std::size_t task_count;
    {
      std::shared_lock lock(tasks_mu_);
      task_count = tasks_.size();
    }
    std::size_t cached_models;
    {
      std::lock_guard lock(models_mu_);
      cached_models = models_.size();
    }
    return Json{{"status", "ok"},
                {"tasks", task_count},
                {"cache", {{"hits", hits_.load()}, {"misses", misses_.load()}}},
                {"models", {{"constructed", model_constructions_.load()}, {"cached", cached_models}}}};
  }

  std::uint64_t cache_hits() const { return hits_.load(); }
  std::uint64_t cache_misses() const { return misses_.load(); }
  std::uint64_t model_constructions() const { return model_constructions_.load(); }

  std::shared_ptr<const TaskContext> task(const std::string& task_id) const { return find_task(task_id); }

 private:
  static void check_task_id(const std::string& id) {
    bool ok = !id.empty() && id.size() <= 128;
    for (char c : id) {
      if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
            c == '.'))
        ok = false;
    }
    if (!ok) throw Error(Errc::BadRequest, "task_id must match [A-Za-z0-9_.-]{1,128}", "task_id");
  }

  static std::string string_member(const Json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_string()) throw Error(Errc::BadRequest, std::string(key) + " must be a string", std::string("/") + key);
    return it->get<std::string>();
  }

  std::shared_ptr<TaskContext> find_task(const std::string& task_id) const {
    std::shared_lock lock(tasks_mu_);
    auto it = tasks_.find(task_id);
    if (it == tasks_.end()) throw Error(Errc::UnknownTask, "unknown task " + task_id, "/task_id");
    return it->second;
  }

  static Json ack(const TaskContext& t, const std::string& status) {
    Json tables = Json::array();
    for (const auto& [name, entry] : t.snapshot->tables) tables.push_back(name);
    return Json{{"task_id", t.task_id},
                {"status", status},
                {"model", t.model_name},
                {"digest", t.digest},
                {"tables", std::move(tables)}};
  }

  std::shared_ptr<const EstimatorModel> model_for(const std::string& model_name, const std::string& digest,
                                                  std::shared_ptr<const CatalogSnapshot> snapshot,
                                                  const std::optional<std::string>& model_path) {
    const std::string key = model_name + "\n" + digest + "\n" + model_path.value_or("");
    std::lock_guard lock(models_mu_);
    if (auto it = models_.find(key); it != models_.end()) return it->second;
    auto model = registry_.create_model(model_name, std::move(snapshot), model_path);
    ++model_constructions_;
    models_.emplace(key, model);
    return model;
  }

  template <typename Compute>
  Json serve(TaskContext& task, const char* endpoint, const Json& canonical, Compute compute) {
    const std::string key = std::string(endpoint) + "\n" + canonical.dump();
    Json entry{{"endpoint", endpoint}, {"request", canonical}};
    std::optional<Json> hit = options_.enable_cache ? task.cache.lookup(key) : std::nullopt;
    Json body;
    if (hit) {
      ++hits_;
      ++task.hits;
      body = std::move(*hit);
      body["cached"] = true;
    } else {
      ++misses_;
      ++task.misses;
      try {
        body = compute();
      } catch (const Error& e) {
        entry["cached"] = false;
        entry["error"] = errc_name(e.code());
        task.append_log(std::move(entry));
        throw;
      }
      if (options_.enable_cache) task.cache.store(key, body);
      body["cached"] = false;
    }
    entry["cached"] = body["cached"];
    task.append_log(std::move(entry));
    return body;
  }

  ModelRegistry registry_;
  StatServerOptions options_;

  mutable std::shared_mutex tasks_mu_;
  std::map<std::string, std::shared_ptr<TaskContext>> tasks_;

  mutable std::mutex models_mu_;
  std::map<std::string, std::shared_ptr<const EstimatorModel>> models_;

  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
  std::atomic<std::uint64_t> model_constructions_{0};
};

// ---------------------------------------------------------------------------
// Task routing

struct InstanceDescriptor {
  std::string id;
  std::vector<std::string> loaded_tasks;

  bool has_task(const std::string& task_id) const {
    return std::find(loaded_tasks.begin(), loaded_tasks.end(), task_id) != loaded_tasks.end();
  }
};

inline std::uint64_t rendezvous_score(const std::string& task_id, const std::string& instance_id) {
  return mix64(fnv1a64(task_id) ^ mix64(fnv1a64(instance_id, 0x9e3779b97f4a7c15ULL)));
}

/// Affinity first (an instance that already holds the task; lowest id when
/// several do), otherwise highest rendezvous score.
inline std::string route_task(const std::string& task_id, const std::vector<InstanceDescriptor>& instances) {
  if (instances.empty()) throw Error(Errc::InvalidArgument, "instance list is empty", "instances");
  const InstanceDescriptor* owner = nullptr;
  for (const auto& inst : instances) {
    if (inst.has_task(task_id) && (!owner || inst.id < owner->id)) owner = &inst;
  }
  if (owner) return owner->id;
  const InstanceDescriptor* best = nullptr;
  std::uint64_t best_score = 0;
  for (const auto& inst : instances) {
    auto score = rendezvous_score(task_id, inst.id);
    if (!best || score > best_score || (score == best_score && inst.id < best->id)) {
      best = &inst;
      best_score = score;
    }
  }
  return best->id;
}

}  // namespace videx
