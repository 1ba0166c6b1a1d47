#include "vera/service/server.hpp"

#include <cstdlib>

#include <httplib.h>

#include "vera/traits/remote.hpp"

namespace vera::service {

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig config;
  if (const char* v = std::getenv("VERA_LISTEN"); v && *v) config.listen = v;
  if (const char* v = std::getenv("VERA_STORE_DIR"); v && *v) config.store_dir = v;
  if (const char* v = std::getenv("VERA_TRAIT_FIXTURE"); v && *v) config.trait_fixture = v;
  if (const char* v = std::getenv("VERA_REMOTE_TRAITS"); v && *v) config.remote_traits = v;
  return config;
}

std::pair<std::string, int> parse_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == listen.size()) {
    throw Error("invalid-listen", "listen address must look like host:port, got '" + listen + "'");
  }
  const std::string host = listen.substr(0, colon);
  const std::string port_text = listen.substr(colon + 1);
  char* end = nullptr;
  const long port = std::strtol(port_text.c_str(), &end, 10);
  if (*end != '\0' || port < 0 || port > 65535) {
    throw Error("invalid-listen", "bad port '" + port_text + "'");
  }
  return {host, static_cast<int>(port)};
}

namespace {

std::unique_ptr<TraitStore> open_traits(const ServiceConfig& config) {
  if (config.remote_traits) return std::make_unique<RemoteTraitStore>(*config.remote_traits);
  if (config.trait_fixture) {
    return std::make_unique<LocalTraitStore>(load_trait_fixture(*config.trait_fixture));
  }
  return std::make_unique<LocalTraitStore>();
}

}  // namespace

struct Server::Impl {
  explicit Impl(ServiceConfig c)
      : config(std::move(c)),
        store(config.store_dir, config.log),
        traits(open_traits(config)),
        api(store, *traits) {}

  ServiceConfig config;
  DocumentStore store;
  std::unique_ptr<TraitStore> traits;
  Api api;
  httplib::Server http;
  std::string host;
  int port = 0;
};

Server::Server(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  httplib::Server& http = impl_->http;
  if (impl_->config.serve_trait_protocol) mount_trait_protocol(http, *impl_->traits);

  const Api& api = impl_->api;
  auto forward = [&api](const httplib::Request& req, httplib::Response& res) {
    ApiRequest request;
    request.method = req.method;
    request.path = req.path;
    for (const auto& [key, value] : req.params) request.query.emplace(key, value);
    request.body = req.body;
    const ApiResponse response = api.handle(request);
    res.status = response.status;
    if (!response.body.empty()) res.set_content(response.body, response.content_type);
  };
  http.Get(".*", forward);
  http.Post(".*", forward);
  http.Put(".*", forward);
  http.Delete(".*", forward);
  http.Patch(".*", forward);
  http.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS"},
                            {"Access-Control-Allow-Headers", "Content-Type"}});

  auto [host, port] = parse_listen(impl_->config.listen);
  impl_->host = host;
  if (port == 0) {
    impl_->port = http.bind_to_any_port(host);
    if (impl_->port < 0) throw Error("bind-failed", "cannot bind " + host);
  } else {
    if (!http.bind_to_port(host, port)) {
      throw Error("bind-failed", "cannot bind " + impl_->config.listen);
    }
    impl_->port = port;
  }
}

Server::~Server() { stop(); }

int Server::port() const { return impl_->port; }
const std::string& Server::host() const { return impl_->host; }

void Server::serve() { impl_->http.listen_after_bind(); }
void Server::stop() { impl_->http.stop(); }

DocumentStore& Server::store() { return impl_->store; }
const Api& Server::api() const { return impl_->api; }

}  // namespace vera::service
