#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "test_support.hpp"

using namespace videx;
using videx::testing::int_table;
using videx::testing::iota_values;

namespace {

std::shared_ptr<const CatalogSnapshot> snapshot_of(std::vector<DataTable> tables, CollectConfig cfg = {}) {
  return std::make_shared<const CatalogSnapshot>(collect_snapshot(tables, cfg));
}

// 1000 rows: every (a, b) pair of 1..10 x 1..10 exactly ten times.
DataTable grid_table() {
  DataTable t{"g", {{"a", DataType::Int, false}, {"b", DataType::Int, false}}, {}, {}};
  for (int i = 0; i < 1000; ++i) t.rows.push_back({Scalar::of_int(i % 10 + 1), Scalar::of_int((i / 10) % 10 + 1)});
  return t;
}

std::int64_t brute_count(const DataTable& t, const std::vector<RangeCond>& conds) {
  std::int64_t n = 0;
  for (const auto& row : t.rows) {
    bool ok = true;
    for (const auto& c : conds) ok = ok && c.matches(row[t.column_index(c.col_name)]);
    n += ok;
  }
  return n;
}

// Snapshot with only ndv figures, for the NDV product rule.
std::shared_ptr<const CatalogSnapshot> ndv_snapshot(std::int64_t rows, std::int64_t ndv_a, std::int64_t ndv_b) {
  CatalogSnapshot s;
  TableEntry t;
  t.name = "t";
  t.columns = {{"a", DataType::Int, false}, {"b", DataType::Int, false}};
  t.stats.row_count = rows;
  t.stats.columns["a"].ndv = ndv_a;
  t.stats.columns["b"].ndv = ndv_b;
  s.tables["t"] = t;
  return std::make_shared<const CatalogSnapshot>(s);
}

// Table with a hand-built sample: `matching` of `n` sample rows have a = 1.
std::shared_ptr<const CatalogSnapshot> sampled_snapshot(std::int64_t rows, std::int64_t n, std::int64_t matching) {
  CatalogSnapshot s;
  TableEntry t;
  t.name = "t";
  t.columns = {{"a", DataType::Int, false}};
  t.stats.row_count = rows;
  Sample smp;
  smp.cap = n;
  for (std::int64_t i = 0; i < n; ++i) smp.rows.push_back({Scalar::of_int(i < matching ? 1 : 0)});
  t.stats.sample = smp;
  s.tables["t"] = t;
  return std::make_shared<const CatalogSnapshot>(s);
}

}  // namespace

TEST(HistogramSelectivity, SpecExamples) {
  auto h = build_equi_depth_histogram(
      [] {
        std::vector<Scalar> v;
        for (auto x : iota_values(1, 100)) v.push_back(Scalar::of_int(x));
        return v;
      }(),
      4);
  EXPECT_DOUBLE_EQ(histogram_selectivity(h, RangeCond::between("a", Scalar::of_int(1), Scalar::of_int(100))), 1.0);
  const double lt50 = histogram_selectivity(h, RangeCond::upper("a", Scalar::of_int(50), false));
  EXPECT_NEAR(lt50, 49.0 / 100.0, 0.02);
  EXPECT_NEAR(lt50, 0.49, 1e-12);
  EXPECT_DOUBLE_EQ(histogram_selectivity(h, RangeCond::lower("a", Scalar::of_int(100), false)), 0.0);
  EXPECT_DOUBLE_EQ(histogram_selectivity(h, RangeCond::lower("a", Scalar::of_int(500), true)), 0.0);
  EXPECT_DOUBLE_EQ(histogram_selectivity(h, RangeCond::upper("a", Scalar::of_int(0), true)), 0.0);
  EXPECT_THROW(histogram_selectivity(h, RangeCond::equal("a", Scalar::of_string("x"))), Error);
}

TEST(HistogramSelectivity, MatchesExactCountsOnEveryIntegerBound) {
  std::vector<Scalar> v;
  for (auto x : iota_values(1, 100)) v.push_back(Scalar::of_int(x));
  auto h = build_equi_depth_histogram(v, 4);
  for (int x = 1; x <= 100; ++x) {
    EXPECT_NEAR(histogram_selectivity(h, RangeCond::upper("a", Scalar::of_int(x), true)), x / 100.0, 1e-12);
    EXPECT_NEAR(histogram_selectivity(h, RangeCond::upper("a", Scalar::of_int(x), false)), (x - 1) / 100.0, 1e-12);
    EXPECT_NEAR(histogram_selectivity(h, RangeCond::equal("a", Scalar::of_int(x))), 0.01, 1e-12);
  }
}

TEST(HistogramSelectivity, StringsUseHalfOfBoundaryBucket) {
  std::vector<Scalar> v;
  for (const char* s : {"a", "b", "c", "d"}) v.push_back(Scalar::of_string(s));
  auto h = build_equi_depth_histogram(v, 2);  // (a,b) (c,d)
  EXPECT_DOUBLE_EQ(histogram_selectivity(h, RangeCond::upper("s", Scalar::of_string("bb"), true)), 0.5);
  EXPECT_DOUBLE_EQ(histogram_selectivity(h, RangeCond::upper("s", Scalar::of_string("c1"), true)), 0.75);
}

TEST(Independence, SpecExamples) {
  DataTable g = grid_table();
  IndependenceModel m(snapshot_of({g}), std::nullopt);
  EXPECT_DOUBLE_EQ(m.cardinality("g", {}).rows, 1000.0);

  RangeCond half = RangeCond::upper("a", Scalar::of_int(5), true);
  RangeCond fifth = RangeCond::upper("b", Scalar::of_int(2), true);
  EXPECT_EQ(brute_count(g, {half}), 500);
  EXPECT_EQ(brute_count(g, {fifth}), 200);
  auto est = m.cardinality("g", {half, fifth});
  EXPECT_NEAR(est.rows, 100.0, 1e-9);
  EXPECT_FALSE(est.degraded);
  EXPECT_EQ(est.model_name, "independence");

  EXPECT_EQ(m.cardinality("g", {half, RangeCond::empty_marker("b", Scalar::of_int(3))}).rows, 0.0);
}

TEST(Independence, ProductIsBitReproducible) {
  auto t = videx::testing::uniform_table("u", 5000, 1000, 37, 3);
  auto snap = snapshot_of({t});
  IndependenceModel m(snap, std::nullopt);
  std::vector<RangeCond> conds{RangeCond::between("a", Scalar::of_int(100), Scalar::of_int(420)),
                               RangeCond::upper("b", Scalar::of_int(30), false)};
  double expected = static_cast<double>(snap->table("u")->stats.row_count);
  for (const auto& c : conds) {
    const auto* cs = snap->table("u")->stats.column(c.col_name);
    expected *= histogram_selectivity(*cs->histogram, c) * (1.0 - cs->null_fraction);
  }
  EXPECT_EQ(m.cardinality("u", conds).rows, expected);
}

TEST(Independence, NullFractionScalesEstimate) {
  DataTable t{"n", {{"a", DataType::Int, true}}, {}, {}};
  for (int i = 0; i < 100; ++i) t.rows.push_back({i % 4 == 0 ? Value{} : Value{Scalar::of_int(i)}});
  IndependenceModel m(snapshot_of({t}), std::nullopt);
  EXPECT_NEAR(m.cardinality("n", {RangeCond::lower("a", Scalar::of_int(0), true)}).rows, 75.0, 1e-9);
}

TEST(Independence, MissingHistogramDegradesToMagicConstants) {
  CatalogSnapshot s = collect_snapshot(std::vector<DataTable>{grid_table()}, CollectConfig{});
  s.tables["g"].stats.columns["a"].histogram.reset();
  IndependenceModel m(std::make_shared<const CatalogSnapshot>(s), std::nullopt);
  auto eq = m.cardinality("g", {RangeCond::equal("a", Scalar::of_int(3))});
  EXPECT_TRUE(eq.degraded);
  EXPECT_NEAR(eq.rows, 100.0, 1e-9);
  EXPECT_NEAR(m.cardinality("g", {RangeCond::upper("a", Scalar::of_int(3), true)}).rows, 1000.0 / 3.0, 1e-9);
  EXPECT_NEAR(m.cardinality("g", {RangeCond::between("a", Scalar::of_int(3), Scalar::of_int(4))}).rows, 250.0, 1e-9);
  EXPECT_FALSE(m.cardinality("g", {RangeCond::equal("b", Scalar::of_int(3))}).degraded);
}

TEST(IndependenceProperty, AddingConditionNeverIncreasesEstimate) {
  auto t = videx::testing::uniform_table("u", 3000, 200, 50, 12);
  IndependenceModel m(snapshot_of({t}), std::nullopt);
  std::mt19937_64 rng(1);
  auto r = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int i = 0; i < 500; ++i) {
    std::vector<RangeCond> conds;
    double prev = m.cardinality("u", conds).rows;
    for (int k = 0; k < 3; ++k) {
      const std::string col = r(0, 1) ? "a" : "b";
      const int lo = r(0, 220);
      conds.push_back(RangeCond::between(col, Scalar::of_int(lo), Scalar::of_int(lo + r(0, 80))));
      double now = m.cardinality("u", conds).rows;
      EXPECT_LE(now, prev);
      EXPECT_GE(now, 0.0);
      prev = now;
    }
  }
}

TEST(IndependenceNdv, ProductRuleWithCap) {
  EXPECT_DOUBLE_EQ(IndependenceModel(ndv_snapshot(10000, 100, 5), std::nullopt).ndv("t", {"a"}).ndv, 100.0);
  EXPECT_DOUBLE_EQ(IndependenceModel(ndv_snapshot(10000, 10, 10), std::nullopt).ndv("t", {"a", "b"}).ndv, 100.0);
  EXPECT_DOUBLE_EQ(IndependenceModel(ndv_snapshot(10000, 1000, 1000), std::nullopt).ndv("t", {"a", "b"}).ndv, 10000.0);
  EXPECT_THROW(IndependenceModel(ndv_snapshot(10, 1, 1), std::nullopt).ndv("t", {"zz"}), Error);
}

TEST(SampleModel, CardinalityExamples) {
  EXPECT_DOUBLE_EQ(SampleModel(sampled_snapshot(100000, 10000, 10000), std::nullopt)
                       .cardinality("t", {RangeCond::equal("a", Scalar::of_int(1))}).rows,
                   100000.0);
  EXPECT_DOUBLE_EQ(SampleModel(sampled_snapshot(100000, 10000, 1234), std::nullopt)
                       .cardinality("t", {RangeCond::equal("a", Scalar::of_int(1))}).rows,
                   12340.0);
  EXPECT_DOUBLE_EQ(SampleModel(sampled_snapshot(100000, 10000, 0), std::nullopt)
                       .cardinality("t", {RangeCond::equal("a", Scalar::of_int(1))}).rows,
                   5.0);
  // Zero matches in a sample that is the whole table is an exact zero.
  EXPECT_DOUBLE_EQ(SampleModel(sampled_snapshot(50, 50, 0), std::nullopt)
                       .cardinality("t", {RangeCond::equal("a", Scalar::of_int(1))}).rows,
                   0.0);
}

TEST(SampleModel, NoSampleIsAnError) {
  SampleModel m(ndv_snapshot(10, 1, 1), std::nullopt);
  try {
    m.cardinality("t", {RangeCond::equal("a", Scalar::of_int(1))});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NoSample);
  }
  EXPECT_THROW(m.ndv("t", {"a"}), Error);
}

TEST(SampleModel, FullSampleIsExact) {
  auto t = videx::testing::uniform_table("u", 20000, 300, 20, 77);
  SampleModel m(snapshot_of({t}), std::nullopt);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    int lo = std::uniform_int_distribution<int>(1, 300)(rng);
    std::vector<RangeCond> conds{RangeCond::between("a", Scalar::of_int(lo), Scalar::of_int(lo + 40)),
                                 RangeCond::upper("b", Scalar::of_int(std::uniform_int_distribution<int>(1, 20)(rng)), false)};
    EXPECT_EQ(q_error(m.cardinality("u", conds).rows, static_cast<double>(brute_count(t, conds))), 1.0);
  }
  EXPECT_DOUBLE_EQ(m.ndv("u", {"a", "b"}).ndv, static_cast<double>(exact_ndv(t, {"a", "b"})));
}

TEST(Gee, ClosedForms) {
  std::map<int, int> freq;
  for (int i = 0; i < 60; ++i) freq[i] = 1;
  for (int i = 60; i < 80; ++i) freq[i] = 2;
  EXPECT_DOUBLE_EQ(SampleModel::gee_estimate(freq, 100, 10000), 620.0);

  std::map<int, int> unique;
  for (int i = 0; i < 400; ++i) unique[i] = 1;
  EXPECT_DOUBLE_EQ(SampleModel::gee_estimate(unique, 400, 10000), std::sqrt(10000.0 / 400.0) * 400.0);
  EXPECT_DOUBLE_EQ(SampleModel::gee_estimate(unique, 400, 1000), std::sqrt(1000.0 * 400.0));
}

TEST(GeeProperty, BoundsHoldOnGeneratedSamples) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 150; ++trial) {
    const int rows = std::uniform_int_distribution<int>(1, 3000)(rng);
    auto t = videx::testing::uniform_table("u", rows, std::uniform_int_distribution<int>(1, 2000)(rng), 3, rng());
    CollectConfig cfg;
    cfg.sample_cap = std::uniform_int_distribution<int>(1, 3000)(rng);
    cfg.seed = rng();
    auto snap = snapshot_of({t}, cfg);
    const auto& sample = *snap->table("u")->stats.sample;
    std::set<std::int64_t> d;
    for (const auto& r : sample.rows) d.insert(r[0]->as_int());
    const double N = rows, n = static_cast<double>(sample.size()), dd = static_cast<double>(d.size());
    const double est = SampleModel(snap, std::nullopt).ndv("u", {"a"}).ndv;
    EXPECT_LE(dd, est + 1e-9);
    EXPECT_LE(est, std::min(N, std::sqrt(N / n) * dd) + 1e-9);
    if (sample.size() == rows) {
      EXPECT_DOUBLE_EQ(est, static_cast<double>(exact_ndv(t, {"a"})));
    }
  }
}

TEST(Oracle, ExactCounts) {
  auto data = std::make_shared<DataDirectory>();
  data->tables.push_back(grid_table());
  OracleModel m(data);
  EXPECT_DOUBLE_EQ(m.cardinality("g", {RangeCond::between("a", Scalar::of_int(1), Scalar::of_int(10))}).rows, 1000.0);
  EXPECT_DOUBLE_EQ(m.cardinality("g", {RangeCond::equal("a", Scalar::of_int(3)), RangeCond::lower("b", Scalar::of_int(8), false)}).rows,
                   20.0);
  EXPECT_DOUBLE_EQ(m.ndv("g", {"b", "a"}).ndv, 100.0);
}

TEST(Oracle, IndependenceMedianQErrorOnUniformData) {
  auto t = videx::testing::uniform_table("u", 10000, 1000, 100, 8);
  auto data = std::make_shared<DataDirectory>();
  data->tables.push_back(t);
  OracleModel oracle(data);
  IndependenceModel indep(snapshot_of({t}), std::nullopt);
  std::mt19937_64 rng(10);
  std::vector<double> qs;
  for (int i = 0; i < 200; ++i) {
    int lo = std::uniform_int_distribution<int>(1, 800)(rng);
    std::vector<RangeCond> conds{RangeCond::between("a", Scalar::of_int(lo), Scalar::of_int(lo + 200)),
                                 RangeCond::lower("b", Scalar::of_int(std::uniform_int_distribution<int>(1, 80)(rng)), true)};
    qs.push_back(q_error(indep.cardinality("u", conds).rows, oracle.cardinality("u", conds).rows));
  }
  std::nth_element(qs.begin(), qs.begin() + 100, qs.end());
  EXPECT_LE(qs[100], 1.2);
}

TEST(Registry, BuiltinsAndErrors) {
  auto reg = ModelRegistry::with_builtin_models();
  EXPECT_EQ(reg.names(), (std::vector<std::string>{"independence", "oracle", "sample"}));
  EXPECT_EQ(reg.create_model("independence", ndv_snapshot(10, 1, 1))->name(), "independence");
  try {
    reg.create_model("nonexistent", ndv_snapshot(10, 1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownModel);
    EXPECT_NE(e.message().find("{independence, oracle, sample}"), std::string::npos);
  }
  EXPECT_THROW(reg.register_model("sample", nullptr), Error);
}

TEST(Model, RejectsUnknownNamesAndTypes) {
  IndependenceModel m(snapshot_of({grid_table()}), std::nullopt);
  EXPECT_THROW(m.cardinality("nope", {}), Error);
  EXPECT_THROW(m.cardinality("g", {RangeCond::equal("zz", Scalar::of_int(1))}), Error);
  try {
    m.cardinality("g", {RangeCond::equal("a", Scalar::of_float(1.0))});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TypeMismatch);
    EXPECT_EQ(e.path(), "/conditions/0/data_type");
  }
}

TEST(QError, Conventions) {
  EXPECT_DOUBLE_EQ(q_error(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(q_error(100, 108), 1.08);
  EXPECT_DOUBLE_EQ(q_error(108, 100), 1.08);
  EXPECT_DOUBLE_EQ(q_error(0, 9), 10.0);
  EXPECT_DOUBLE_EQ(q_error(9, 0), 10.0);
}
