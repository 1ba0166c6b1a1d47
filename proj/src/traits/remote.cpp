#include "vera/traits/remote.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "detail/json_reader.hpp"
#include "vera/error.hpp"

namespace vera {

using nlohmann::json;

namespace {

// Splits "http://host:port/prefix" into ("http://host:port", "/prefix").
std::pair<std::string, std::string> split_base_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  if (path_start == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path_start), prefix};
}

json parse_body(const httplib::Result& result, const std::string& what) {
  try {
    return json::parse(result->body);
  } catch (const json::exception& e) {
    throw TransportError(what + ": malformed response body: " + e.what());
  }
}

}  // namespace

RemoteTraitStore::RemoteTraitStore(std::string base_url, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  auto [host, prefix] = split_base_url(base_url);
  scheme_host_port_ = std::move(host);
  path_prefix_ = std::move(prefix);
}

std::vector<TaxonRecord> RemoteTraitStore::search_species(std::string_view query) const {
  const auto first = query.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) throw InvalidQueryError("species query must not be blank");

  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  const std::string what = "GET " + path_prefix_ + "/search";
  auto result = client.Get(path_prefix_ + "/search", httplib::Params{{"q", std::string(query)}},
                           httplib::Headers{});
  if (!result) throw TransportError(what + ": " + httplib::to_string(result.error()));
  if (result->status < 200 || result->status >= 300) {
    throw TransportError(what + ": HTTP " + std::to_string(result->status));
  }
  const json body = parse_body(result, what);
  if (!body.is_array()) throw TransportError(what + ": expected a JSON array");

  std::vector<TaxonRecord> records;
  try {
    for (const json& item : body) records.push_back(taxon_record_from_json(item));
  } catch (const DecodeError& e) {
    throw TransportError(what + ": " + e.what());
  }
  return records;
}

AttributeBundle RemoteTraitStore::fetch_attributes(std::string_view taxon_id) const {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  const std::string path = path_prefix_ + "/taxa/" +
                           httplib::detail::encode_query_param(std::string(taxon_id)) +
                           "/attributes";
  auto result = client.Get(path);
  if (!result) throw TransportError("GET " + path + ": " + httplib::to_string(result.error()));
  if (result->status == 404) throw NotFoundError("unknown taxon '" + std::string(taxon_id) + "'");
  if (result->status < 200 || result->status >= 300) {
    throw TransportError("GET " + path + ": HTTP " + std::to_string(result->status));
  }
  try {
    return bundle_from_wire_json(parse_body(result, "GET " + path));
  } catch (const DecodeError& e) {
    throw TransportError("GET " + path + ": " + e.what());
  }
}

void mount_trait_protocol(httplib::Server& server, const TraitStore& store) {
  server.Get("/search", [&store](const httplib::Request& req, httplib::Response& res) {
    try {
      json out = json::array();
      for (const TaxonRecord& r : store.search_species(req.get_param_value("q"))) {
        out.push_back(taxon_record_to_json(r));
      }
      res.set_content(out.dump(), "application/json");
    } catch (const InvalidQueryError& e) {
      res.status = 400;
      res.set_content(json{{"code", e.code()}, {"message", e.what()}}.dump(), "application/json");
    }
  });
  server.Get(R"(/taxa/([^/]+)/attributes)",
             [&store](const httplib::Request& req, httplib::Response& res) {
               try {
                 res.set_content(bundle_to_wire_json(store.fetch_attributes(req.matches[1].str())).dump(),
                                 "application/json");
               } catch (const NotFoundError& e) {
                 res.status = 404;
                 res.set_content(json{{"code", e.code()}, {"message", e.what()}}.dump(),
                                 "application/json");
               }
             });
}

}  // namespace vera
