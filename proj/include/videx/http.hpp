#pragma once

// Socket binding for any service exposing `HttpResponse handle(const HttpRequest&)`,
// and a Transport that talks to such a service over HTTP/1.1.

#include <httplib.h>

#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "videx/common.hpp"
#include "videx/wire.hpp"

namespace videx {

struct HttpServerOptions {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 binds an ephemeral port
  std::size_t max_body_bytes = 256u << 20;
};

template <typename Service>
class HttpServer {
 public:
  HttpServer(Service& service, HttpServerOptions options) : service_(service), options_(std::move(options)) {
    // One byte of slack lets the service itself produce the 413 body.
    server_.set_payload_max_length(options_.max_body_bytes + 1);
    server_.set_tcp_nodelay(true);
    auto route = [this](const httplib::Request& req, httplib::Response& res) {
      HttpRequest r;
      r.method = req.method;
      r.path = req.path;
      for (const auto& [k, v] : req.params) r.query.emplace(k, v);
      r.body = req.body;
      HttpResponse out = service_.handle(r);
      res.status = out.status;
      res.set_content(out.body, "application/json");
    };
    server_.Get(".*", route);
    server_.Post(".*", route);
    server_.Delete(".*", route);
    server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      Errc code = res.status == 413 ? Errc::PayloadTooLarge : Errc::BadRequest;
      res.set_content(Json{{"code", errc_name(code)}, {"message", "HTTP " + std::to_string(res.status)}, {"path", ""}}.dump(),
                      "application/json");
    });
    if (options_.port == 0) {
      port_ = server_.bind_to_any_port(options_.host);
    } else if (server_.bind_to_port(options_.host, options_.port)) {
      port_ = options_.port;
    }
    if (port_ <= 0)
      throw Error(Errc::Io, "cannot bind " + options_.host + ":" + std::to_string(options_.port), options_.host);
  }

  ~HttpServer() { stop(); }

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  int port() const { return port_; }
  std::string url() const { return "http://" + options_.host + ":" + std::to_string(port_); }

  /// Serves on a background thread.
  void start() {
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  /// Serves on the calling thread until stop() is called elsewhere.
  void run() { server_.listen_after_bind(); }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

 private:
  Service& service_;
  HttpServerOptions options_;
  httplib::Server server_;
  int port_ = -1;
  std::thread thread_;
};

/// Keep-alive HTTP client; requests are serialized over one connection.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(std::string base_url) : base_url_(std::move(base_url)), client_(base_url_) {
    client_.set_keep_alive(true);
    client_.set_tcp_nodelay(true);
    client_.set_connection_timeout(5);
    client_.set_read_timeout(60);
  }

  std::string endpoint() const override { return base_url_; }

  HttpResponse send(const HttpRequest& request) override {
    std::string target = request.path;
    char sep = '?';
    for (const auto& [k, v] : request.query) {
      target += sep + httplib::detail::encode_query_param(k) + "=" + httplib::detail::encode_query_param(v);
      sep = '&';
    }
    std::lock_guard lock(mu_);
    httplib::Result res;
    if (request.method == "GET") {
      res = client_.Get(target);
    } else if (request.method == "POST") {
      res = client_.Post(target, request.body, "application/json");
    } else if (request.method == "DELETE") {
      res = client_.Delete(target);
    } else {
      throw Error(Errc::InvalidArgument, "unsupported method " + request.method, request.method);
    }
    if (!res)
      throw Error(Errc::Connect, "cannot reach " + base_url_ + ": " + httplib::to_string(res.error()), base_url_);
    return HttpResponse{res->status, res->body};
  }

 private:
  std::string base_url_;
  httplib::Client client_;
  std::mutex mu_;
};

}  // namespace videx
