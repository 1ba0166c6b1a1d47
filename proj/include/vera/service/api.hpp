#pragma once

#include <map>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "vera/service/store.hpp"
#include "vera/traits/trait_store.hpp"

namespace vera::service {

inline constexpr std::uint32_t kMaxSimulationMonths = 600;

struct ApiRequest {
  std::string method;  // "GET", "POST", ...
  std::string path;    // decoded, without the query string
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// The HTTP API as a transport-free function of the request. Routes:
///
///   GET    /models                      list (id, name, revision, updated_at)
///   POST   /models                      create from a model document -> 201
///   GET    /models/{id}
///   PUT    /models/{id}                 {"revision": n, "model": {...}}
///   DELETE /models/{id}                 -> 204
///   POST   /models/{id}/validate        validation report
///   GET    /models/{id}/scores          {"complexity", "creativity"}
///   POST   /models/{id}/simulate        {"seed", "months"} -> run record
///   GET    /runs/{run_id}
///   GET    /runs/{run_id}/series.csv
///   GET    /species?q=
///   GET    /species/{taxon_id}/attributes
///   GET    /health
///
/// Failures carry `{"code", "message", "details"}` with status 400 (bad
/// request body or query), 404, 405, 409 (stale revision), 422 (invalid
/// model; the report is in details), 500 (engine invariant) or 502 (trait
/// endpoint unreachable). Thread-safe.
class Api {
 public:
  Api(DocumentStore& store, const TraitStore& traits) : store_(store), traits_(traits) {}

  ApiResponse handle(const ApiRequest& request) const;

 private:
  ApiResponse route(const ApiRequest& request) const;
  ApiResponse create_model(const ApiRequest& request) const;
  ApiResponse update_model(const std::string& id, const ApiRequest& request) const;
  ApiResponse simulate(const std::string& id, const ApiRequest& request) const;

  DocumentStore& store_;
  const TraitStore& traits_;
};

ApiResponse json_response(int status, const nlohmann::json& body);
ApiResponse error_response(int status, const std::string& code, const std::string& message,
                           const nlohmann::json& details);

}  // namespace vera::service
