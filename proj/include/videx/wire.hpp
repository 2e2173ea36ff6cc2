#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "videx/catalog.hpp"
#include "videx/common.hpp"

namespace videx {

struct HttpRequest {
  std::string method;  // GET, POST, DELETE
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;

  Json json() const { return Json::parse(body); }
};

inline int status_for(Errc code) {
  switch (code) {
    case Errc::UnknownTask:
    case Errc::UnknownSession:
    case Errc::NotFound: return 404;
    case Errc::VersionConflict:
    case Errc::DuplicateIndex:
    case Errc::DuplicateModel: return 409;
    case Errc::PayloadTooLarge: return 413;
    case Errc::Connect: return 502;
    case Errc::EstimatorFailure: return 502;
    case Errc::Io: return 500;
    default: return 400;
  }
}

/// Error body {code, message, path}; validation failures also list every violation.
inline HttpResponse error_response(const Error& e) {
  Json body = e.to_json();
  if (const auto* ve = dynamic_cast<const ValidationError*>(&e)) {
    body["violations"] = Json::array();
    for (const auto& v : ve->violations())
      body["violations"].push_back(Json{{"path", v.path}, {"rule", v.rule}, {"message", v.message}});
  }
  return {status_for(e.code()), body.dump()};
}

inline HttpResponse json_response(const Json& body, int status = 200) { return {status, body.dump()}; }

inline Json parse_json_body(const std::string& body) {
  try {
    return Json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::BadRequest, std::string("malformed JSON body: ") + e.what(), "byte " + std::to_string(e.byte));
  }
}

inline std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    std::size_t j = i;
    while (j < path.size() && path[j] != '/') ++j;
    if (j > i) parts.emplace_back(path.substr(i, j - i));
    i = j;
  }
  return parts;
}

/// Client side of a JSON-over-HTTP service; implementations either call a
/// handler in-process or go over a socket.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
  virtual std::string endpoint() const = 0;

  HttpResponse post(const std::string& path, std::string body, std::map<std::string, std::string> query = {}) {
    return send(HttpRequest{"POST", path, std::move(query), std::move(body)});
  }
  HttpResponse get(const std::string& path) { return send(HttpRequest{"GET", path, {}, {}}); }
  HttpResponse del(const std::string& path) { return send(HttpRequest{"DELETE", path, {}, {}}); }
};

/// Calls a service's handler directly, without a socket.
class InProcessTransport : public Transport {
 public:
  using Handler = std::function<HttpResponse(const HttpRequest&)>;

  template <typename Service>
  explicit InProcessTransport(Service& service, std::string name = "inproc://local")
      : handler_([&service](const HttpRequest& r) { return service.handle(r); }), name_(std::move(name)) {}

  HttpResponse send(const HttpRequest& request) override { return handler_(request); }
  std::string endpoint() const override { return name_; }

 private:
  Handler handler_;
  std::string name_;
};

/// Raises the error carried by a non-2xx response.
inline const HttpResponse& expect_ok(const HttpResponse& r, std::string_view what) {
  if (r.status >= 200 && r.status < 300) return r;
  Json body;
  try {
    body = Json::parse(r.body);
  } catch (...) {
    throw Error(Errc::EstimatorFailure, std::string(what) + ": HTTP " + std::to_string(r.status), "");
  }
  std::string code = body.value("code", "");
  std::string message = body.value("message", "HTTP " + std::to_string(r.status));
  std::string path = body.value("path", "");
  for (int c = 0; c <= static_cast<int>(Errc::Io); ++c) {
    if (errc_name(static_cast<Errc>(c)) == code) throw Error(static_cast<Errc>(c), std::string(what) + ": " + message, path);
  }
  throw Error(Errc::EstimatorFailure, std::string(what) + ": " + message, path);
}

}  // namespace videx
