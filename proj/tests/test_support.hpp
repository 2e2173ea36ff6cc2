#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "videx/videx.hpp"

namespace videx::testing {

inline std::filesystem::path golden_path(const std::string& name) {
  return std::filesystem::path(VIDEX_TEST_DATA_DIR) / "golden" / name;
}

inline std::string read_golden(const std::string& name) { return detail::read_file(golden_path(name)); }

/// Compares against a golden file; set VIDEX_UPDATE_GOLDEN=1 to rewrite it.
inline bool matches_golden(const std::string& name, const std::string& actual) {
  if (std::getenv("VIDEX_UPDATE_GOLDEN")) {
    std::ofstream(golden_path(name), std::ios::binary) << actual;
    return true;
  }
  return std::filesystem::exists(golden_path(name)) && read_golden(name) == actual;
}

inline DataTable int_table(const std::string& name, const std::string& col, const std::vector<std::int64_t>& values) {
  DataTable t{name, {{col, DataType::Int, true}}, {}, {}};
  for (auto v : values) t.rows.push_back({Scalar::of_int(v)});
  return t;
}

inline std::vector<std::int64_t> iota_values(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> v;
  for (std::int64_t x = lo; x <= hi; ++x) v.push_back(x);
  return v;
}

/// Two-column uniform table: a in [1, a_max], b in [1, b_max], independent.
inline DataTable uniform_table(const std::string& name, std::int64_t rows, std::int64_t a_max, std::int64_t b_max,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DataTable t{name, {{"a", DataType::Int, false}, {"b", DataType::Int, false}}, {}, {}};
  for (std::int64_t i = 0; i < rows; ++i) {
    t.rows.push_back({Scalar::of_int(std::uniform_int_distribution<std::int64_t>(1, a_max)(rng)),
                      Scalar::of_int(std::uniform_int_distribution<std::int64_t>(1, b_max)(rng))});
  }
  return t;
}

inline DataDirectory small_order_database() {
  SyntheticConfig cfg;
  cfg.customers = 300;
  cfg.orders = 1000;
  cfg.lineitems = 1500;
  return generate_order_database(cfg);
}

// Tiny fixture for protocol transcripts: t(a int 1..20, s string), 4 buckets.
inline std::string protocol_metadata() {
  DataTable t{"t", {{"a", DataType::Int, false}, {"s", DataType::String, true}}, {{"idx_a", "t", {"a"}, false, IndexOrigin::Real}}, {}};
  for (std::int64_t i = 1; i <= 20; ++i) {
    t.rows.push_back({Scalar::of_int(i), i % 5 == 0 ? Value{} : Value{Scalar::of_string(std::string(1, char('p' + i % 4)))}});
  }
  CollectConfig cfg;
  cfg.bucket_count = 4;
  return serialize_metadata(collect_snapshot(std::vector<DataTable>{t}, cfg));
}

/// Requests covering every stats endpoint, including error paths and cache hits.
inline std::vector<Json> protocol_requests() {
  const Json meta = Json::parse(protocol_metadata());
  Json other = meta;
  other["tables"][0]["row_count"] = 21;
  auto post = [](std::string path, Json body, Json query = Json::object()) {
    return Json{{"method", "POST"}, {"path", std::move(path)}, {"query", std::move(query)}, {"body", std::move(body)}};
  };
  auto get = [](std::string path) { return Json{{"method", "GET"}, {"path", std::move(path)}, {"query", Json::object()}}; };
  auto cond = [](const RangeCond& c) { return c.to_json(); };
  const Json range = cond(RangeCond::between("a", Scalar::of_int(5), Scalar::of_int(10)));
  const Json eq = cond(RangeCond::equal("s", Scalar::of_string("q")));
  return {
      get("/v1/health"),
      post("/v1/tasks/task-1/stats", meta, {{"model", "independence"}}),
      post("/v1/tasks/task-1/stats", meta, {{"model", "independence"}}),
      post("/v1/tasks/task-1/stats", other, {{"model", "independence"}}),
      post("/v1/tasks/task-2/stats", meta, {{"model", "sample"}}),
      post("/v1/tasks/task-3/stats", meta, {{"model", "nonexistent"}}),
      post("/v1/cardinality", {{"task_id", "task-1"}, {"table", "t"}, {"conditions", Json::array({range})}}),
      post("/v1/cardinality", {{"task_id", "task-1"}, {"table", "t"}, {"conditions", Json::array({range})}}),
      post("/v1/cardinality", {{"task_id", "task-1"}, {"table", "T"}, {"conditions", Json::array({range, eq})}}),
      post("/v1/cardinality", {{"task_id", "task-1"}, {"table", "t"}, {"conditions", Json::array({eq, range})}}),
      post("/v1/cardinality", {{"task_id", "task-2"}, {"table", "t"}, {"conditions", Json::array({range, eq})}}),
      post("/v1/cardinality", {{"task_id", "task-1"}, {"table", "t"}, {"conditions", Json::array()}}),
      post("/v1/cardinality",
           {{"task_id", "task-1"}, {"table", "t"}, {"conditions", Json::array({Json{{"col_name", "a"}, {"data_type", "int"}}})}}),
      post("/v1/cardinality", {{"task_id", "task-1"}, {"table", "zz"}, {"conditions", Json::array()}}),
      post("/v1/cardinality", {{"task_id", "nope"}, {"table", "t"}, {"conditions", Json::array()}}),
      post("/v1/ndv", {{"task_id", "task-1"}, {"table", "t"}, {"columns", {"a", "s"}}}),
      post("/v1/ndv", {{"task_id", "task-1"}, {"table", "t"}, {"columns", {"s", "a"}}}),
      post("/v1/ndv", {{"task_id", "task-1"}, {"table", "t"}, {"columns", {"a", "s"}}}),
      post("/v1/ndv", {{"task_id", "task-2"}, {"table", "t"}, {"columns", {"a"}}}),
      post("/v1/ndv", {{"task_id", "task-1"}, {"table", "t"}, {"columns", {"missing"}}}),
      get("/v1/tasks/task-1"),
      get("/v1/tasks/task-1/log"),
      get("/v1/health"),
      Json{{"method", "DELETE"}, {"path", "/v1/tasks/task-2"}, {"query", Json::object()}},
      Json{{"method", "DELETE"}, {"path", "/v1/tasks/task-2"}, {"query", Json::object()}},
      get("/v1/nothing"),
  };
}

inline HttpRequest to_http_request(const Json& r) {
  HttpRequest req{r.at("method").get<std::string>(), r.at("path").get<std::string>(), {}, {}};
  for (const auto& [k, v] : r.at("query").items()) req.query.emplace(k, v.get<std::string>());
  if (r.contains("body")) req.body = r.at("body").dump();
  return req;
}

/// Sends each request and records {request, status, response}.
inline Json record_exchanges(Transport& transport, const std::vector<Json>& requests) {
  Json out = Json::array();
  for (const auto& r : requests) {
    HttpResponse res = transport.send(to_http_request(r));
    out.push_back(Json{{"request", r}, {"status", res.status}, {"response", Json::parse(res.body)}});
  }
  return out;
}

/// Replays a recorded transcript; returns a description of the first
/// mismatch (status or response bytes), or an empty string.
inline std::string replay_exchanges(Transport& transport, const Json& transcript) {
  for (std::size_t i = 0; i < transcript.size(); ++i) {
    const Json& x = transcript[i];
    HttpResponse res = transport.send(to_http_request(x.at("request")));
    const std::string want = x.at("response").dump();
    if (res.status != x.at("status").get<int>() || res.body != want)
      return "exchange " + std::to_string(i) + " " + x["request"]["path"].get<std::string>() + ": got " +
             std::to_string(res.status) + " " + res.body + ", want " + std::to_string(x["status"].get<int>()) + " " + want;
  }
  return "";
}

}  // namespace videx::testing
