#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "json.hpp"

namespace videx {

using Json = nlohmann::json;

// Error codes surface verbatim in wire error bodies ({code, message, path}).
enum class Errc {
  ParseError,
  ValidationError,
  UnsupportedVersion,
  TypeMismatch,
  UnknownTable,
  UnknownColumn,
  UnknownIndex,
  UnknownModel,
  UnknownTask,
  UnknownSession,
  DuplicateModel,
  DuplicateIndex,
  VersionConflict,
  SyntaxError,
  Unsupported,
  AmbiguousColumn,
  InvalidArgument,
  NoSample,
  BadRequest,
  PayloadTooLarge,
  NotFound,
  Connect,
  EstimatorFailure,
  QueryMismatch,
  Io,
};

inline std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::ParseError: return "PARSE_ERROR";
    case Errc::ValidationError: return "VALIDATION_ERROR";
    case Errc::UnsupportedVersion: return "UNSUPPORTED_VERSION";
    case Errc::TypeMismatch: return "TYPE_MISMATCH";
    case Errc::UnknownTable: return "UNKNOWN_TABLE";
    case Errc::UnknownColumn: return "UNKNOWN_COLUMN";
    case Errc::UnknownIndex: return "UNKNOWN_INDEX";
    case Errc::UnknownModel: return "UNKNOWN_MODEL";
    case Errc::UnknownTask: return "UNKNOWN_TASK";
    case Errc::UnknownSession: return "UNKNOWN_SESSION";
    case Errc::DuplicateModel: return "DUPLICATE_MODEL";
    case Errc::DuplicateIndex: return "DUPLICATE_INDEX";
    case Errc::VersionConflict: return "VERSION_CONFLICT";
    case Errc::SyntaxError: return "SYNTAX_ERROR";
    case Errc::Unsupported: return "UNSUPPORTED";
    case Errc::AmbiguousColumn: return "AMBIGUOUS_COLUMN";
    case Errc::InvalidArgument: return "INVALID_ARGUMENT";
    case Errc::NoSample: return "NO_SAMPLE";
    case Errc::BadRequest: return "BAD_REQUEST";
    case Errc::PayloadTooLarge: return "PAYLOAD_TOO_LARGE";
    case Errc::NotFound: return "NOT_FOUND";
    case Errc::Connect: return "CONNECT";
    case Errc::EstimatorFailure: return "ESTIMATOR_FAILURE";
    case Errc::QueryMismatch: return "QUERY_MISMATCH";
    case Errc::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, std::string path = {})
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        message_(std::move(message)),
        path_(std::move(path)) {}

  Errc code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }
  const std::string& path() const noexcept { return path_; }

  Json to_json() const {
    return Json{{"code", errc_name(code_)}, {"message", message_}, {"path", path_}};
  }

 private:
  Errc code_;
  std::string message_;
  std::string path_;
};

// Stable 64-bit hashing. std::hash is not stable across builds, and digests
// and routing decisions must be.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
    v >>= 4;
  }
  return out;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    char x = a[i], y = b[i];
    if (x >= 'A' && x <= 'Z') x = static_cast<char>(x - 'A' + 'a');
    if (y >= 'A' && y <= 'Z') y = static_cast<char>(y - 'A' + 'a');
    if (x != y) return false;
  }
  return true;
}

}  // namespace videx
