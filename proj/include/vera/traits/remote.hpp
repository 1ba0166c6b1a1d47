#pragma once

#include <chrono>
#include <string>

#include "vera/traits/trait_store.hpp"

namespace httplib {
class Server;
}

namespace vera {

/// HTTP adapter for a remote trait backend speaking
///
///   GET /search?q=<text>          -> [TaxonRecord, ...]
///   GET /taxa/<id>/attributes     -> {taxon_id, attributes: {field: {value, unit}}}
///
/// Each call opens its own connection; the object holds only configuration.
/// Connection failures, timeouts and non-2xx responses raise TransportError,
/// except 404 on the attributes endpoint which raises NotFoundError.
class RemoteTraitStore final : public TraitStore {
 public:
  /// `base_url` like "http://localhost:8080" (an optional path prefix is kept).
  explicit RemoteTraitStore(std::string base_url,
                            std::chrono::milliseconds timeout = std::chrono::seconds(5));

  std::vector<TaxonRecord> search_species(std::string_view query) const override;
  AttributeBundle fetch_attributes(std::string_view taxon_id) const override;

 private:
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::chrono::milliseconds timeout_;
};

/// Serves `store` over the remote protocol on `server`. Used by tests as a
/// recorded-fixture stand-in and by `vera serve` so one instance can back another.
void mount_trait_protocol(httplib::Server& server, const TraitStore& store);

}  // namespace vera
