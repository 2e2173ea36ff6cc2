#include <gtest/gtest.h>

#include <thread>

#include "test_support.hpp"
#include "videx/http.hpp"

using namespace videx;
namespace vt = videx::testing;

TEST(Http, StatProtocolTranscriptOverSockets) {
  StatServer stats;
  HttpServer<StatServer> server(stats, HttpServerOptions{});
  server.start();
  HttpTransport client(server.url());
  EXPECT_EQ(vt::replay_exchanges(client, Json::parse(vt::read_golden("stat_protocol.json"))), "");
}

TEST(Http, OversizedBodyIs413) {
  StatServer stats(ModelRegistry::with_builtin_models(), StatServerOptions{1024, true});
  HttpServer<StatServer> server(stats, HttpServerOptions{"127.0.0.1", 0, 1024});
  server.start();
  HttpTransport client(server.url());
  auto r = client.post("/v1/ndv", std::string(4096, 'x'));
  EXPECT_EQ(r.status, 413);
  EXPECT_EQ(r.json()["code"], "PAYLOAD_TOO_LARGE");
  EXPECT_EQ(client.get("/v1/health").status, 200);
}

TEST(Http, QueryParametersAreEncoded) {
  DataDirectory data = vt::small_order_database();
  const std::string dir = ::testing::TempDir() + "/videx http data & more";
  std::filesystem::create_directories(dir);
  write_data_directory(data, dir);
  StatServer stats;
  HttpServer<StatServer> server(stats, HttpServerOptions{});
  server.start();
  auto transport = std::make_shared<HttpTransport>(server.url());
  auto s = create_session("a", serialize_metadata(collect_snapshot(data, CollectConfig{})), "oracle", transport, dir);
  EXPECT_EQ(stats.task(s->task_id())->model_path, dir);
  auto doc = s->explain_sql("SELECT COUNT(*) FROM customer c WHERE c.c_nationkey = 4");
  EXPECT_EQ(doc.body["provenance"]["model"], "oracle");
}

TEST(Http, WhatIfFacadeOverSockets) {
  DataDirectory data = vt::small_order_database();
  const std::string metadata = serialize_metadata(collect_snapshot(data, CollectConfig{}));
  StatServer stats;
  HttpServer<StatServer> stats_server(stats, HttpServerOptions{});
  stats_server.start();
  WhatIfService api(std::make_shared<HttpTransport>(stats_server.url()));
  HttpServer<WhatIfService> api_server(api, HttpServerOptions{});
  api_server.start();

  HttpTransport client(api_server.url());
  auto created = client.post("/v1/sessions", Json{{"metadata", metadata}}.dump());
  ASSERT_EQ(created.status, 200) << created.body;
  const std::string id = created.json()["session_id"];
  const std::string sql = "SELECT * FROM orders o, lineitem l WHERE o.o_orderkey = l.l_orderkey AND o.o_custkey = 17";
  auto doc = client.post("/v1/sessions/" + id + "/explain", Json{{"sql", sql}}.dump());
  ASSERT_EQ(doc.status, 200) << doc.body;
  EXPECT_EQ(doc.json()["query"], sql);
  EXPECT_EQ(client.del("/v1/sessions/" + id + "/virtual-indexes/none").status, 400);
  EXPECT_EQ(client.get("/v1/sessions/zzz").status, 404);
  EXPECT_GT(stats.cache_misses(), 0u);
}

TEST(Http, ConcurrentClients) {
  StatServer stats;
  HttpServer<StatServer> server(stats, HttpServerOptions{});
  server.start();
  const std::string metadata = serialize_metadata(collect_snapshot(vt::small_order_database(), CollectConfig{}));
  auto transport = std::make_shared<HttpTransport>(server.url());
  auto base = create_session("base", metadata, "independence", transport);
  const auto workload = generate_order_workload(10, 4, SyntheticConfig{300, 1000, 1500, 7});
  std::vector<std::string> expected;
  for (const auto& q : workload) expected.push_back(base->explain_sql(q).plan_section().dump());

  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      auto s = create_session("t" + std::to_string(t), metadata, "independence", std::make_shared<HttpTransport>(server.url()));
      for (std::size_t i = 0; i < workload.size(); ++i)
        if (s->explain_sql(workload[i]).plan_section().dump() != expected[i]) ++mismatches;
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(mismatches.load(), 0);
}

TEST(Http, BindFailureIsReported) {
  StatServer stats;
  EXPECT_THROW(HttpServer<StatServer>(stats, HttpServerOptions{"256.0.0.1", 0, 1024}), Error);
}
