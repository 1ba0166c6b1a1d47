#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "vera/service/api.hpp"
#include "vera/service/store.hpp"
#include "vera/traits/trait_store.hpp"

namespace vera::service {

struct ServiceConfig {
  std::string listen = "127.0.0.1:8080";  // host:port; port 0 picks a free one
  std::filesystem::path store_dir = "vera-store";
  std::optional<std::filesystem::path> trait_fixture;
  std::optional<std::string> remote_traits;  // base URL; takes precedence over the fixture
  bool serve_trait_protocol = false;         // also answer /search and /taxa/<id>/attributes
  LogSink log;

  /// Defaults overridden by VERA_LISTEN, VERA_STORE_DIR, VERA_TRAIT_FIXTURE
  /// and VERA_REMOTE_TRAITS when set.
  static ServiceConfig from_env();
};

/// Splits "host:port"; throws Error("invalid-listen") on malformed input.
std::pair<std::string, int> parse_listen(const std::string& listen);

/// Store + trait backend + API behind an HTTP listener.
class Server {
 public:
  /// Opens the store (throws Error("store-unavailable")) and the trait
  /// backend, and binds the listener (throws Error("bind-failed")).
  explicit Server(ServiceConfig config);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  int port() const;
  const std::string& host() const;

  /// Blocks until stop() is called from another thread.
  void serve();
  void stop();

  DocumentStore& store();
  const Api& api() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vera::service
