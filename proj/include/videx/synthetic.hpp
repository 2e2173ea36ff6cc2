#pragma once

// Deterministic synthetic databases and SPJ workloads for benchmarking and
// tests: an order-processing schema with uniform independent columns and
// foreign keys, and a two-column table whose columns are perfectly correlated.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "videx/catalog.hpp"
#include "videx/collector.hpp"
#include "videx/scalar.hpp"

namespace videx {

struct SyntheticConfig {
  std::int64_t customers = 3000;
  std::int64_t orders = 10000;
  std::int64_t lineitems = 12000;
  std::uint64_t seed = 7;
};

namespace synth_detail {

inline const std::vector<std::string>& segments() {
  static const std::vector<std::string> v{"AUTOMOBILE", "BUILDING", "FURNITURE", "HOUSEHOLD", "MACHINERY"};
  return v;
}
inline const std::vector<std::string>& priorities() {
  static const std::vector<std::string> v{"1-URGENT", "2-HIGH", "3-MEDIUM", "4-NOT SPECIFIED", "5-LOW"};
  return v;
}

inline constexpr std::int64_t kDateSpan = 2400;  // days from the first order date
inline std::int64_t first_date() { return *parse_date("1992-01-01"); }

inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}
inline double uniform_cents(std::mt19937_64& rng, double lo, double hi) {
  return std::round(std::uniform_real_distribution<double>(lo, hi)(rng) * 100.0) / 100.0;
}
inline std::string date_literal(std::int64_t days) { return "'" + format_date(days) + "'"; }

}  // namespace synth_detail

inline DataDirectory generate_order_database(const SyntheticConfig& cfg = {}) {
  using namespace synth_detail;
  std::mt19937_64 rng(cfg.seed);
  const std::int64_t d0 = first_date();

  DataTable customer{"customer",
                     {{"c_custkey", DataType::Int, false},
                      {"c_nationkey", DataType::Int, false},
                      {"c_acctbal", DataType::Float, false},
                      {"c_mktsegment", DataType::String, false}},
                     {{"pk_customer", "customer", {"c_custkey"}, true, IndexOrigin::Real},
                      {"idx_c_nationkey", "customer", {"c_nationkey"}, false, IndexOrigin::Real}},
                     {}};
  for (std::int64_t k = 1; k <= cfg.customers; ++k) {
    customer.rows.push_back({Scalar::of_int(k), Scalar::of_int(uniform_int(rng, 0, 24)),
                             Scalar::of_float(uniform_cents(rng, -999.99, 9999.99)),
                             Scalar::of_string(segments()[static_cast<std::size_t>(uniform_int(rng, 0, 4))])});
  }

  DataTable orders{"orders",
                   {{"o_orderkey", DataType::Int, false},
                    {"o_custkey", DataType::Int, false},
                    {"o_orderdate", DataType::Date, false},
                    {"o_totalprice", DataType::Float, false},
                    {"o_orderpriority", DataType::String, false}},
                   {{"pk_orders", "orders", {"o_orderkey"}, true, IndexOrigin::Real},
                    {"idx_o_custkey", "orders", {"o_custkey"}, false, IndexOrigin::Real},
                    {"idx_o_orderdate", "orders", {"o_orderdate"}, false, IndexOrigin::Real}},
                   {}};
  for (std::int64_t k = 1; k <= cfg.orders; ++k) {
    orders.rows.push_back({Scalar::of_int(k), Scalar::of_int(uniform_int(rng, 1, cfg.customers)),
                           Scalar::of_date(d0 + uniform_int(rng, 0, kDateSpan)),
                           Scalar::of_float(uniform_cents(rng, 850.0, 450000.0)),
                           Scalar::of_string(priorities()[static_cast<std::size_t>(uniform_int(rng, 0, 4))])});
  }

  DataTable lineitem{"lineitem",
                     {{"l_orderkey", DataType::Int, false},
                      {"l_linenumber", DataType::Int, false},
                      {"l_quantity", DataType::Int, false},
                      {"l_extendedprice", DataType::Float, false},
                      {"l_discount", DataType::Float, false},
                      {"l_shipdate", DataType::Date, false}},
                     {{"idx_l_orderkey", "lineitem", {"l_orderkey", "l_linenumber"}, false, IndexOrigin::Real}},
                     {}};
  for (std::int64_t k = 1; k <= cfg.lineitems; ++k) {
    lineitem.rows.push_back({Scalar::of_int(uniform_int(rng, 1, cfg.orders)), Scalar::of_int(uniform_int(rng, 1, 7)),
                             Scalar::of_int(uniform_int(rng, 1, 50)),
                             Scalar::of_float(uniform_cents(rng, 900.0, 100000.0)),
                             Scalar::of_float(static_cast<double>(uniform_int(rng, 0, 10)) / 100.0),
                             Scalar::of_date(d0 + uniform_int(rng, 1, kDateSpan + 120))});
  }

  DataDirectory dir;
  dir.tables = {std::move(customer), std::move(orders), std::move(lineitem)};
  return dir;
}

/// Select-project-join queries over the order schema: single tables, the two
/// foreign-key joins and the three-way chain, with 0-2 filters per table.
inline std::vector<std::string> generate_order_workload(std::size_t count, std::uint64_t seed,
                                                        const SyntheticConfig& cfg = {}) {
  using namespace synth_detail;
  std::mt19937_64 rng(seed);
  const std::int64_t d0 = first_date();

  auto customer_filter = [&](int which) -> std::string {
    switch (which) {
      case 0: return "c.c_nationkey = " + std::to_string(uniform_int(rng, 0, 24));
      case 1: {
        std::int64_t lo = uniform_int(rng, -900, 8000);
        return "c.c_acctbal BETWEEN " + std::to_string(lo) + " AND " + std::to_string(lo + uniform_int(rng, 50, 2000));
      }
      case 2: return "c.c_mktsegment = '" + segments()[static_cast<std::size_t>(uniform_int(rng, 0, 4))] + "'";
      default: return "c.c_custkey <= " + std::to_string(uniform_int(rng, 10, cfg.customers));
    }
  };
  auto orders_filter = [&](int which) -> std::string {
    switch (which) {
      case 0: {
        std::int64_t lo = uniform_int(rng, 0, kDateSpan - 30);
        return "o.o_orderdate BETWEEN " + date_literal(d0 + lo) + " AND " +
               date_literal(d0 + lo + uniform_int(rng, 5, 300));
      }
      case 1: return "o.o_totalprice > " + std::to_string(uniform_int(rng, 1000, 440000));
      case 2: return "o.o_orderpriority = '" + priorities()[static_cast<std::size_t>(uniform_int(rng, 0, 4))] + "'";
      default: return "o.o_orderkey < " + std::to_string(uniform_int(rng, 10, cfg.orders));
    }
  };
  auto lineitem_filter = [&](int which) -> std::string {
    switch (which) {
      case 0: {
        std::int64_t lo = uniform_int(rng, 0, kDateSpan);
        return "l.l_shipdate >= " + date_literal(d0 + lo) + " AND l.l_shipdate < " +
               date_literal(d0 + lo + uniform_int(rng, 7, 365));
      }
      case 1: return "l.l_quantity < " + std::to_string(uniform_int(rng, 2, 50));
      case 2: return "l.l_discount BETWEEN 0.0" + std::to_string(uniform_int(rng, 0, 4)) + " AND 0.0" +
                     std::to_string(uniform_int(rng, 5, 9));
      default: return "l.l_linenumber = " + std::to_string(uniform_int(rng, 1, 7));
    }
  };
  auto filters = [&](auto& gen, std::vector<std::string>& out, int max_filters) {
    int n = static_cast<int>(uniform_int(rng, 0, max_filters));
    int first = static_cast<int>(uniform_int(rng, 0, 3));
    for (int i = 0; i < n; ++i) out.push_back(gen((first + i) % 4));
  };

  std::vector<std::string> out;
  for (std::size_t q = 0; q < count; ++q) {
    const int shape = static_cast<int>(q % 5);
    std::vector<std::string> where;
    std::string select = uniform_int(rng, 0, 1) == 0 ? "COUNT(*)" : "";
    std::string from;
    switch (shape) {
      case 0:
        from = "customer c";
        filters(customer_filter, where, 2);
        if (where.empty()) where.push_back(customer_filter(0));
        if (select.empty()) select = "c.c_custkey, c.c_acctbal";
        break;
      case 1:
        from = "orders o";
        filters(orders_filter, where, 2);
        if (where.empty()) where.push_back(orders_filter(0));
        if (select.empty()) select = "o.o_orderdate";
        break;
      case 2:
        from = "customer c, orders o";
        where.push_back("c.c_custkey = o.o_custkey");
        filters(customer_filter, where, 2);
        filters(orders_filter, where, 1);
        if (select.empty()) select = "c.c_mktsegment, o.o_totalprice";
        break;
      case 3:
        from = "orders o, lineitem l";
        where.push_back("o.o_orderkey = l.l_orderkey");
        filters(orders_filter, where, 1);
        filters(lineitem_filter, where, 2);
        if (select.empty()) select = "o.o_orderdate, l.l_quantity";
        break;
      default:
        from = "customer c, orders o, lineitem l";
        where.push_back("c.c_custkey = o.o_custkey");
        where.push_back("o.o_orderkey = l.l_orderkey");
        filters(customer_filter, where, 1);
        filters(orders_filter, where, 1);
        filters(lineitem_filter, where, 1);
        if (select.empty()) select = "c.c_nationkey, l.l_extendedprice";
        break;
    }
    std::string sql = "SELECT " + select + " FROM " + from;
    for (std::size_t i = 0; i < where.size(); ++i) sql += (i == 0 ? " WHERE " : " AND ") + where[i];
    out.push_back(std::move(sql));
  }
  return out;
}

/// Table `pairs(id, a, b)` with b = a and a uniform over [1, domain].
inline DataDirectory generate_correlated_database(std::int64_t rows = 10000, std::int64_t domain = 1000,
                                                  std::uint64_t seed = 11) {
  std::mt19937_64 rng(seed);
  DataTable t{"pairs",
              {{"id", DataType::Int, false}, {"a", DataType::Int, false}, {"b", DataType::Int, false}},
              {{"pk_pairs", "pairs", {"id"}, true, IndexOrigin::Real}},
              {}};
  for (std::int64_t i = 1; i <= rows; ++i) {
    std::int64_t a = synth_detail::uniform_int(rng, 1, domain);
    t.rows.push_back({Scalar::of_int(i), Scalar::of_int(a), Scalar::of_int(a)});
  }
  DataDirectory dir;
  dir.tables = {std::move(t)};
  return dir;
}

/// Conjunctions over both correlated columns (ranges and point lookups).
inline std::vector<std::string> generate_correlated_workload(std::size_t count, std::uint64_t seed,
                                                             std::int64_t domain = 1000) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  for (std::size_t q = 0; q < count; ++q) {
    if (q % 2 == 0) {
      std::int64_t x = synth_detail::uniform_int(rng, domain / 20, domain / 2);
      out.push_back("SELECT COUNT(*) FROM pairs p WHERE p.a <= " + std::to_string(x) + " AND p.b <= " +
                    std::to_string(x));
    } else {
      std::int64_t v = synth_detail::uniform_int(rng, 1, domain);
      out.push_back("SELECT COUNT(*) FROM pairs p WHERE p.a = " + std::to_string(v) + " AND p.b = " +
                    std::to_string(v));
    }
  }
  return out;
}

}  // namespace videx
