#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "videx/http.hpp"
#include "videx/videx.hpp"

using namespace videx;

namespace {

std::vector<std::string> read_workload(const std::string& path) {
  std::istringstream in(detail::read_file(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line.compare(first, 2, "--") == 0) continue;
    auto last = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path, path);
  out << text;
}

// "table(col, col)" -> (table, columns)
std::pair<std::string, std::vector<std::string>> parse_vindex(const std::string& spec) {
  auto open = spec.find('(');
  auto close = spec.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open || open == 0)
    throw Error(Errc::InvalidArgument, "virtual index must look like table(col,...): " + spec, spec);
  std::vector<std::string> cols;
  std::string cur;
  for (char c : spec.substr(open + 1, close - open - 1)) {
    if (c == ',') {
      cols.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  cols.push_back(cur);
  return {spec.substr(0, open), cols};
}

// Owns whatever backs a stats endpoint: a remote URL or an in-process server.
struct StatsBackend {
  std::unique_ptr<StatServer> local;
  std::shared_ptr<Transport> transport;

  explicit StatsBackend(const std::string& url) {
    if (url.empty()) {
      local = std::make_unique<StatServer>();
      transport = std::make_shared<InProcessTransport>(*local);
    } else {
      transport = std::make_shared<HttpTransport>(url);
    }
  }
};

// "model" or "model:path"
std::pair<std::string, std::optional<std::string>> parse_mode(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) return {spec, std::nullopt};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

int run(int argc, char** argv) {
  CLI::App app{"videx: statistics collection, estimation service and what-if planning"};
  app.require_subcommand(1);

  auto* collect = app.add_subcommand("collect", "Collect a statistics snapshot from a data directory");
  std::string data_dir, out_file;
  CollectConfig cc;
  collect->add_option("--data", data_dir, "Directory with schema.json and <table>.csv")->required();
  collect->add_option("--out", out_file, "Metadata file to write")->required();
  collect->add_option("--buckets", cc.bucket_count, "Histogram buckets per column")->capture_default_str();
  collect->add_option("--sample-cap", cc.sample_cap, "Maximum sample rows per table")->capture_default_str();
  collect->add_option("--seed", cc.seed, "Sampling seed")->capture_default_str();
  collect->add_option("--page-size", cc.page_size, "Page size in bytes")->capture_default_str();

  auto* serve_stats = app.add_subcommand("serve-stats", "Run the statistics service");
  int stats_port = 0;
  std::string host = "127.0.0.1";
  std::size_t max_body = StatServerOptions{}.max_body_bytes;
  serve_stats->add_option("--port", stats_port, "Port (0 picks a free one)")->required();
  serve_stats->add_option("--host", host, "Bind address")->capture_default_str();
  serve_stats->add_option("--max-body-bytes", max_body, "Request body limit")->capture_default_str();

  auto* serve_api = app.add_subcommand("serve-api", "Run the what-if HTTP API");
  int api_port = 0;
  std::string stats_url;
  serve_api->add_option("--port", api_port, "Port (0 picks a free one)")->required();
  serve_api->add_option("--host", host, "Bind address")->capture_default_str();
  serve_api->add_option("--stats-url", stats_url, "Statistics service base URL")->required();

  auto* explain_cmd = app.add_subcommand("explain", "Plan one query");
  std::string meta, model = "independence", sql, format = "json";
  std::optional<std::string> model_path;
  std::vector<std::string> vindexes;
  explain_cmd->add_option("--meta", meta, "Metadata file")->required();
  explain_cmd->add_option("--stats-url", stats_url, "Statistics service URL (in-process when omitted)");
  explain_cmd->add_option("--model", model, "Estimator model")->capture_default_str();
  explain_cmd->add_option("--model-path", model_path, "Model resource path (oracle: raw data directory)");
  explain_cmd->add_option("--sql", sql, "Query text")->required();
  explain_cmd->add_option("--vindex", vindexes, "Virtual index table(col,...), repeatable");
  explain_cmd->add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));

  auto* bench = app.add_subcommand("bench", "Compare plans of two estimator modes over a workload");
  std::string workload_file, mode_a = "oracle", mode_b = "independence";
  bench->add_option("--workload", workload_file, "File with one query per line")->required();
  bench->add_option("--meta", meta, "Metadata file")->required();
  bench->add_option("--stats-url", stats_url, "Statistics service URL (in-process when omitted)");
  bench->add_option("--mode-a", mode_a, "Reference mode, model[:model_path]")->capture_default_str();
  bench->add_option("--mode-b", mode_b, "Compared mode, model[:model_path]")->capture_default_str();

  auto* diff_cmd = app.add_subcommand("diff", "Diff two EXPLAIN documents");
  std::string file_a, file_b;
  diff_cmd->add_option("--a", file_a, "First document")->required();
  diff_cmd->add_option("--b", file_b, "Second document")->required();

  auto* route_cmd = app.add_subcommand("route", "Pick the statistics instance for a task");
  std::string task;
  std::vector<std::string> instances;
  route_cmd->add_option("--task", task, "Task id")->required();
  route_cmd->add_option("--instance", instances, "id[=task,task...], repeatable")->required();

  auto* gen = app.add_subcommand("gen-synthetic", "Write a synthetic data directory and workload");
  std::string kind = "orders", gen_out, gen_workload;
  std::size_t queries = 50;
  std::uint64_t gen_seed = 1;
  gen->add_option("--kind", kind, "orders or correlated")->check(CLI::IsMember({"orders", "correlated"}));
  gen->add_option("--out", gen_out, "Output data directory")->required();
  gen->add_option("--workload", gen_workload, "Also write a workload file here");
  gen->add_option("--queries", queries, "Workload size")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Workload seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (*collect) {
    auto snap = collect_snapshot(read_data_directory(data_dir), cc);
    write_text(out_file, serialize_metadata(snap));
    std::cout << "wrote " << out_file << " (" << snap.tables.size() << " tables, digest " << snapshot_digest(snap)
              << ")\n";
    return 0;
  }

  if (*serve_stats || *serve_api) {
    std::unique_ptr<StatServer> stats;
    std::unique_ptr<WhatIfService> api;
    std::shared_ptr<Transport> upstream;
    HttpServerOptions opts{host, *serve_stats ? stats_port : api_port, max_body};
    auto serve = [&](auto& service) {
      HttpServer server(service, opts);
      std::cout << "listening on " << server.url() << std::endl;
      server.run();
    };
    if (*serve_stats) {
      stats = std::make_unique<StatServer>(ModelRegistry::with_builtin_models(), StatServerOptions{max_body, true});
      serve(*stats);
    } else {
      upstream = std::make_shared<HttpTransport>(stats_url);
      api = std::make_unique<WhatIfService>(upstream);
      serve(*api);
    }
    return 0;
  }

  if (*explain_cmd) {
    StatsBackend backend(stats_url);
    auto session = create_session("cli", detail::read_file(meta), model, backend.transport, model_path);
    for (const auto& v : vindexes) {
      auto [table, cols] = parse_vindex(v);
      session->add_virtual_index(table, cols);
    }
    auto doc = session->explain_sql(sql);
    std::cout << (format == "table" ? render_explain_table(doc) : doc.serialize());
    return 0;
  }

  if (*bench) {
    StatsBackend backend(stats_url);
    const std::string metadata = detail::read_file(meta);
    auto [model_a, path_a] = parse_mode(mode_a);
    auto [model_b, path_b] = parse_mode(mode_b);
    auto a = create_session("a", metadata, model_a, backend.transport, path_a);
    auto b = create_session("b", metadata, model_b, backend.transport, path_b);
    auto report = qerror_report(read_workload(workload_file), *a, *b);
    std::cout << report.to_json().dump(2) << "\n" << report.render_table();
    return 0;
  }

  if (*diff_cmd) {
    ExplainDocument a{parse_json_body(detail::read_file(file_a))};
    ExplainDocument b{parse_json_body(detail::read_file(file_b))};
    std::cout << diff_plans(a, b).to_json().dump(2) << "\n";
    return 0;
  }

  if (*route_cmd) {
    std::vector<InstanceDescriptor> descs;
    for (const auto& spec : instances) {
      InstanceDescriptor d;
      auto eq = spec.find('=');
      d.id = spec.substr(0, eq);
      if (eq != std::string::npos) {
        std::stringstream tasks(spec.substr(eq + 1));
        std::string t;
        while (std::getline(tasks, t, ',')) {
          if (!t.empty()) d.loaded_tasks.push_back(t);
        }
      }
      descs.push_back(std::move(d));
    }
    std::cout << route_task(task, descs) << "\n";
    return 0;
  }

  if (*gen) {
    DataDirectory dir = kind == "orders" ? generate_order_database() : generate_correlated_database();
    std::filesystem::create_directories(gen_out);
    write_data_directory(dir, gen_out);
    if (!gen_workload.empty()) {
      auto wl = kind == "orders" ? generate_order_workload(queries, gen_seed)
                                 : generate_correlated_workload(queries, gen_seed);
      std::string text;
      for (const auto& q : wl) text += q + "\n";
      write_text(gen_workload, text);
    }
    std::cout << "wrote " << gen_out << "\n";
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << errc_name(e.code()) << ": " << e.message() << "\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v.path << ": " << v.rule << ": " << v.message << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << errc_name(e.code()) << ": " << e.message();
    if (!e.path().empty()) std::cerr << " (at " << e.path() << ")";
    std::cerr << "\n";
    return 2;
  }
}
