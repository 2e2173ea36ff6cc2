#include <gtest/gtest.h>

#include "test_support.hpp"
#include "videx/http.hpp"

using namespace videx;
namespace vt = videx::testing;

namespace {

// Forwards to another transport and keeps every request.
class RecordingTransport : public Transport {
 public:
  explicit RecordingTransport(std::shared_ptr<Transport> inner) : inner_(std::move(inner)) {}
  HttpResponse send(const HttpRequest& r) override {
    requests.push_back(r);
    return inner_->send(r);
  }
  std::string endpoint() const override { return inner_->endpoint(); }
  std::vector<HttpRequest> requests;

 private:
  std::shared_ptr<Transport> inner_;
};

struct Fixture {
  DataDirectory data = vt::small_order_database();
  std::string metadata = serialize_metadata(collect_snapshot(data, CollectConfig{}));
  StatServer server;
  std::shared_ptr<Transport> transport = std::make_shared<InProcessTransport>(server);
};

const char* kShipdateQuery =
    "SELECT l.l_extendedprice FROM lineitem l WHERE l.l_shipdate BETWEEN '1994-03-01' AND '1994-03-04'";

struct ConstantModel : EstimatorModel {
  using EstimatorModel::EstimatorModel;
  std::string name() const override { return "constant"; }
  CardinalityEstimate estimate_cardinality(const TableEntry&, const std::vector<RangeCond>&) const override {
    return {42.0, "", false};
  }
  double estimate_ndv(const TableEntry&, const std::vector<std::string>&) const override { return 7.0; }
};

}  // namespace

TEST(Session, CreateLoadsTaskOnce) {
  Fixture f;
  auto a = create_session("a", f.metadata, "independence", f.transport);
  EXPECT_TRUE(a->virtual_indexes().empty());
  EXPECT_EQ(a->endpoint(), "inproc://local");
  auto b = create_session("b", f.metadata, "independence", f.transport);
  EXPECT_EQ(a->task_id(), b->task_id());
  EXPECT_EQ(f.server.model_constructions(), 1u);
  auto c = create_session("c", f.metadata, "sample", f.transport);
  EXPECT_NE(c->task_id(), a->task_id());
}

TEST(Session, UnreachableEndpointNamesIt) {
  Fixture f;
  auto dead = std::make_shared<HttpTransport>("http://127.0.0.1:1");
  try {
    create_session("a", f.metadata, "independence", dead);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Connect);
    EXPECT_NE(e.message().find("http://127.0.0.1:1"), std::string::npos) << e.message();
  }
}

TEST(Session, InvalidMetadataFailsBeforeAnyRequest) {
  Fixture f;
  auto rec = std::make_shared<RecordingTransport>(f.transport);
  Json doc = Json::parse(f.metadata);
  doc["tables"][0]["row_count"] = -1;
  EXPECT_THROW(create_session("a", doc.dump(), "independence", rec), ValidationError);
  EXPECT_TRUE(rec->requests.empty());
}

TEST(Session, VirtualIndexLifecycle) {
  Fixture f;
  auto s = create_session("a", f.metadata, "independence", f.transport);
  auto idx = s->add_virtual_index("lineitem", {"l_shipdate"});
  EXPECT_EQ(idx.name, "v_lineitem_l_shipdate");
  EXPECT_TRUE(idx.is_virtual());
  EXPECT_EQ(s->add_virtual_index("LINEITEM", {"L_SHIPDATE", "l_quantity"}, false, "two").columns,
            (std::vector<std::string>{"l_shipdate", "l_quantity"}));

  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::Io;
  };
  EXPECT_EQ(code_of([&] { s->add_virtual_index("lineitem", {"l_shipdate"}); }), Errc::DuplicateIndex);
  EXPECT_EQ(code_of([&] { s->add_virtual_index("lineitem", {"l_orderkey"}, false, "idx_l_orderkey"); }), Errc::DuplicateIndex);
  EXPECT_EQ(code_of([&] { s->add_virtual_index("lineitem", {"nope"}); }), Errc::UnknownColumn);
  EXPECT_EQ(code_of([&] { s->add_virtual_index("nope", {"a"}); }), Errc::UnknownTable);
  EXPECT_EQ(code_of([&] { s->add_virtual_index("lineitem", {}); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([&] { s->add_virtual_index("lineitem", {"l_quantity", "L_QUANTITY"}); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([&] { s->drop_virtual_index("idx_l_orderkey"); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([&] { s->drop_virtual_index("ghost"); }), Errc::UnknownIndex);
  s->drop_virtual_index("two");
  EXPECT_EQ(s->virtual_indexes().size(), 1u);
}

TEST(Session, VirtualIndexOnSelectiveRangeCutsCost) {
  Fixture f;
  auto s = create_session("a", f.metadata, "independence", f.transport);
  auto before = s->explain_sql(kShipdateQuery);
  EXPECT_EQ(before.body["operators"][0]["access"]["kind"], "full_scan");
  s->add_virtual_index("lineitem", {"l_shipdate"});
  auto after = s->explain_sql(kShipdateQuery);
  EXPECT_EQ(after.body["operators"][0]["access"]["index"], "v_lineitem_l_shipdate");
  EXPECT_EQ(after.body["operators"][0]["access"]["origin"], "virtual");
  EXPECT_LT(after.body["total_cost"].get<double>(), before.body["total_cost"].get<double>());

  // An index the plan does not use changes nothing when dropped.
  s->add_virtual_index("orders", {"o_totalprice"});
  auto with_unused = s->explain_sql(kShipdateQuery);
  s->drop_virtual_index("v_orders_o_totalprice");
  EXPECT_EQ(s->explain_sql(kShipdateQuery).body["signature"], with_unused.body["signature"]);
}

TEST(Session, RepeatedExplainHitsTheCache) {
  Fixture f;
  auto s = create_session("a", f.metadata, "independence", f.transport);
  const std::string sql =
      "SELECT COUNT(*) FROM customer c, orders o WHERE c.c_custkey = o.o_custkey AND c.c_nationkey = 3";
  auto first = s->explain_sql(sql);
  auto second = s->explain_sql(sql);
  EXPECT_EQ(first.plan_section(), second.plan_section());
  EXPECT_EQ(first.body["provenance"]["cache_hits"], 0);
  EXPECT_GT(second.body["provenance"]["requests"].get<int>(), 0);
  EXPECT_EQ(second.body["provenance"]["cache_hits"], second.body["provenance"]["requests"]);
  EXPECT_EQ(first.body["provenance"]["model"], "independence");
}

TEST(Session, EstimatorTrafficOnlyReachesTheStatsServer) {
  Fixture f;
  auto rec = std::make_shared<RecordingTransport>(f.transport);
  auto s = create_session("a", f.metadata, "independence", rec);
  ASSERT_EQ(rec->requests.size(), 1u);
  // The load carries the metadata document and nothing else.
  EXPECT_EQ(load_metadata(rec->requests[0].body), load_metadata(f.metadata));
  auto doc = s->explain_sql("SELECT * FROM orders o, lineitem l WHERE o.o_orderkey = l.l_orderkey AND l.l_quantity < 5");
  EXPECT_EQ(rec->requests.size() - 1, doc.body["provenance"]["requests"].get<std::size_t>());
  for (std::size_t i = 1; i < rec->requests.size(); ++i) {
    const auto& p = rec->requests[i].path;
    EXPECT_TRUE(p == "/v1/cardinality" || p == "/v1/ndv") << p;
  }
}

TEST(Session, SessionsAreIsolated) {
  Fixture f;
  auto a = create_session("a", f.metadata, "independence", f.transport);
  auto b = create_session("b", f.metadata, "independence", f.transport);
  a->add_virtual_index("lineitem", {"l_shipdate"});
  EXPECT_TRUE(b->virtual_indexes().empty());
  EXPECT_EQ(b->explain_sql(kShipdateQuery).body["operators"][0]["access"]["kind"], "full_scan");
  EXPECT_EQ(a->explain_sql(kShipdateQuery).body["operators"][0]["access"]["origin"], "virtual");
}

TEST(Session, PlanningErrorsSurface) {
  Fixture f;
  auto s = create_session("a", f.metadata, "independence", f.transport);
  try {
    s->explain_sql("SELECT FROM");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SyntaxError);
  }
  f.server.unload_task(s->task_id());
  try {
    s->explain_sql("SELECT * FROM orders o WHERE o.o_orderkey < 5");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EstimatorFailure);
    EXPECT_NE(e.message().find("orders"), std::string::npos);
  }
}

TEST(Session, CustomModelPlugsIn) {
  auto reg = ModelRegistry::with_builtin_models();
  reg.register_model("constant", [](const ModelContext& ctx) {
    return std::make_shared<ConstantModel>(ctx.stats, ctx.model_path);
  });
  StatServer server(std::move(reg));
  auto transport = std::make_shared<InProcessTransport>(server);
  Fixture f;
  auto s = create_session("a", f.metadata, "constant", transport);
  auto doc = s->explain_sql("SELECT * FROM orders o WHERE o.o_totalprice > 5000");
  EXPECT_EQ(doc.body["provenance"]["model"], "constant");
  EXPECT_EQ(doc.body["operators"][0]["filtered_rows"], 42.0);
}

TEST(Diff, IdenticalDocuments) {
  Fixture f;
  auto s = create_session("a", f.metadata, "independence", f.transport);
  auto doc = s->explain_sql("SELECT * FROM customer c, orders o WHERE c.c_custkey = o.o_custkey");
  auto d = diff_plans(doc, doc);
  EXPECT_TRUE(d.join_order_equal);
  EXPECT_TRUE(d.index_selection_equal);
  EXPECT_TRUE(d.path_differences.empty());
  EXPECT_EQ(d.operators.size(), 2u);
  for (const auto& op : d.operators) EXPECT_EQ(op.q_error, 1.0);
  EXPECT_EQ(d.avg_q_error, 1.0);
  EXPECT_EQ(d.to_json()["cost_delta"], 0.0);
}

TEST(Diff, RowEstimateRatio) {
  Fixture f;
  auto s = create_session("a", f.metadata, "independence", f.transport);
  auto a = s->explain_sql("SELECT * FROM customer c WHERE c.c_nationkey = 3");
  auto b = a;
  a.body["operators"][0]["est_rows"] = 100.0;
  b.body["operators"][0]["est_rows"] = 108.0;
  auto d = diff_plans(a, b);
  EXPECT_DOUBLE_EQ(d.operators[0].q_error, 1.08);
  EXPECT_DOUBLE_EQ(d.avg_q_error, 1.08);
  EXPECT_DOUBLE_EQ(diff_plans(b, a).avg_q_error, 1.08);

  b.body["query"] = "SELECT 1";
  try {
    diff_plans(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::QueryMismatch);
  }
}

TEST(Diff, DifferentJoinOrders) {
  Fixture f;
  auto s = create_session("a", f.metadata, "independence", f.transport);
  const std::string sql = "SELECT * FROM customer c, orders o WHERE c.c_custkey = o.o_custkey AND c.c_nationkey = 3";
  auto a = s->explain_sql(sql);
  auto b = a;
  std::swap(b.body["operators"][0], b.body["operators"][1]);
  b.body["join_order"] = Json{a.body["join_order"][1], a.body["join_order"][0]};
  AccessPath other;
  other.kind = AccessKind::IndexRange;
  other.index = IndexDef{"elsewhere", "orders", {"o_custkey"}, false, IndexOrigin::Virtual};
  b.body["operators"][0]["access"] = access_path_json(other);
  auto d = diff_plans(a, b);
  EXPECT_FALSE(d.join_order_equal);
  ASSERT_EQ(d.path_differences.size(), 1u);
  EXPECT_EQ(d.path_differences[0].b_index, "elsewhere");
  EXPECT_GE(d.avg_q_error, 1.0);
}

TEST(QErrorReport, SameEstimatorOnBothSides) {
  Fixture f;
  auto a = create_session("a", f.metadata, "independence", f.transport);
  auto b = create_session("b", f.metadata, "independence", f.transport);
  auto workload = generate_order_workload(15, 3, SyntheticConfig{300, 1000, 1500, 7});
  workload.push_back("SELECT nonsense");
  auto r = qerror_report(workload, *a, *b);
  EXPECT_EQ(r.succeeded, 15u);
  EXPECT_EQ(r.failed, 1u);
  EXPECT_EQ(r.match_rate_join_order, 1.0);
  EXPECT_EQ(r.match_rate_index, 1.0);
  EXPECT_EQ(r.avg_q_error, 1.0);
  EXPECT_NE(r.entries.back().error.find("SYNTAX_ERROR"), std::string::npos);
  EXPECT_NE(r.render_table().find("1 failed"), std::string::npos);
}

TEST(QErrorReport, SymmetricInItsSessions) {
  Fixture f;
  const std::string dir = ::testing::TempDir() + "/videx_report_data";
  std::filesystem::create_directories(dir);
  write_data_directory(f.data, dir);
  auto oracle = create_session("o", f.metadata, "oracle", f.transport, dir);
  auto indep = create_session("i", f.metadata, "independence", f.transport);
  auto workload = generate_order_workload(20, 9, SyntheticConfig{300, 1000, 1500, 7});
  auto ab = qerror_report(workload, *oracle, *indep);
  auto ba = qerror_report(workload, *indep, *oracle);
  EXPECT_EQ(ab.succeeded, 20u);
  EXPECT_DOUBLE_EQ(ab.avg_q_error, ba.avg_q_error);
  EXPECT_EQ(ab.match_rate_join_order, ba.match_rate_join_order);
  EXPECT_GE(ab.avg_q_error, 1.0);
}

TEST(Facade, Routes) {
  Fixture f;
  WhatIfService api(f.transport);
  InProcessTransport http(api);

  auto created = http.post("/v1/sessions", Json{{"metadata", Json::parse(f.metadata)}, {"model", "independence"}}.dump());
  ASSERT_EQ(created.status, 200) << created.body;
  const std::string id = created.json()["session_id"];
  EXPECT_EQ(created.json()["tables"].size(), 3u);
  // Metadata passed as a string is accepted too.
  EXPECT_EQ(http.post("/v1/sessions", Json{{"metadata", f.metadata}}.dump()).json()["task_id"], created.json()["task_id"]);

  auto described = http.get("/v1/sessions/" + id);
  EXPECT_EQ(described.status, 200);
  EXPECT_TRUE(described.json()["virtual_indexes"].empty());

  auto explained = http.post("/v1/sessions/" + id + "/explain", Json{{"sql", kShipdateQuery}}.dump());
  ASSERT_EQ(explained.status, 200);
  auto added = http.post("/v1/sessions/" + id + "/virtual-indexes", Json{{"table", "lineitem"}, {"columns", {"l_shipdate"}}}.dump());
  ASSERT_EQ(added.status, 200) << added.body;
  EXPECT_EQ(added.json()["origin"], "virtual");
  EXPECT_EQ(http.post("/v1/sessions/" + id + "/virtual-indexes", Json{{"table", "lineitem"}, {"columns", {"l_shipdate"}}}.dump()).status, 409);
  auto explained2 = http.post("/v1/sessions/" + id + "/explain", Json{{"sql", kShipdateQuery}}.dump());

  auto diff = http.post("/v1/diff", Json{{"a", explained.json()}, {"b", explained2.json()}}.dump());
  ASSERT_EQ(diff.status, 200) << diff.body;
  EXPECT_LT(diff.json()["cost_delta"].get<double>(), 0.0);
  EXPECT_FALSE(diff.json()["index_selection_equal"].get<bool>());

  EXPECT_EQ(http.del("/v1/sessions/" + id + "/virtual-indexes/v_lineitem_l_shipdate").status, 200);
  EXPECT_EQ(http.del("/v1/sessions/" + id + "/virtual-indexes/v_lineitem_l_shipdate").status, 400);
  EXPECT_EQ(http.del("/v1/sessions/" + id + "/virtual-indexes/idx_l_orderkey").status, 400);

  auto missing = http.get("/v1/sessions/s999");
  EXPECT_EQ(missing.status, 404);
  EXPECT_EQ(missing.json()["code"], "UNKNOWN_SESSION");
  auto syntax = http.post("/v1/sessions/" + id + "/explain", Json{{"sql", "SELEC 1"}}.dump());
  EXPECT_EQ(syntax.status, 400);
  EXPECT_EQ(syntax.json()["code"], "SYNTAX_ERROR");
  EXPECT_EQ(http.post("/v1/sessions/" + id + "/explain", "{}").status, 400);
  auto mismatch = http.post("/v1/diff", Json{{"a", explained.json()}, {"b", diff.json()}}.dump());
  EXPECT_EQ(mismatch.status, 400);

  Json bad = Json::parse(f.metadata);
  bad["format_version"] = 2;
  auto rejected = http.post("/v1/sessions", Json{{"metadata", bad}}.dump());
  EXPECT_EQ(rejected.status, 400);
  EXPECT_EQ(rejected.json()["code"], "UNSUPPORTED_VERSION");
  EXPECT_EQ(http.post("/v1/sessions", Json{{"metadata", Json::parse(f.metadata)}, {"model", "nope"}}.dump()).json()["code"],
            "UNKNOWN_MODEL");
  EXPECT_EQ(http.get("/v1/elsewhere").status, 404);
}
