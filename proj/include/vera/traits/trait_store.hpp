#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vera/cmp/attributes.hpp"

namespace vera {

struct TaxonRecord {
  std::string taxon_id;
  std::string scientific_name;
  std::vector<std::string> common_names;
  std::uint64_t attribute_record_count = 0;

  friend bool operator==(const TaxonRecord&, const TaxonRecord&) = default;
};

enum class Provenance { Store, Default };

std::string_view to_string(Provenance provenance);

/// A partial set of species attributes in canonical units, with per-field
/// provenance for the fields that are present.
class AttributeBundle {
 public:
  AttributeBundle() = default;
  explicit AttributeBundle(std::string taxon_id) : taxon_id_(std::move(taxon_id)) {}

  const std::string& taxon_id() const noexcept { return taxon_id_; }

  bool has(AttributeField field) const { return values_[index(field)].has_value(); }
  std::optional<double> get(AttributeField field) const { return values_[index(field)]; }
  std::optional<Provenance> provenance(AttributeField field) const {
    return provenance_[index(field)];
  }

  void set(AttributeField field, double value, Provenance provenance = Provenance::Store) {
    values_[index(field)] = value;
    provenance_[index(field)] = provenance;
  }

  std::size_t present_count() const;
  bool complete() const { return present_count() == kAttributeFieldCount; }

  /// Throws Error("incomplete-bundle") unless all nine fields are present.
  SpeciesAttributes to_attributes() const;

  friend bool operator==(const AttributeBundle&, const AttributeBundle&) = default;

 private:
  static std::size_t index(AttributeField field) { return static_cast<std::size_t>(field); }

  std::string taxon_id_;
  std::array<std::optional<double>, kAttributeFieldCount> values_{};
  std::array<std::optional<Provenance>, kAttributeFieldCount> provenance_{};
};

/// Values used for any attribute the store lacks. `version` is bumped whenever
/// a value changes so scenario tests can pin the table they were written for.
struct DefaultAttributeTable {
  int version;
  SpeciesAttributes values;
};

inline constexpr DefaultAttributeTable kDefaultAttributes{
    1,
    SpeciesAttributes{
        .lifespan = 24.0,
        .body_mass = 1.0,
        .carbon_biomass = 0.2,
        .respiratory_rate = 1.0e-9,
        .photosynthesis_rate = 0.0,
        .assimilation_efficiency = 0.25,
        .reproductive_maturity = 6.0,
        .reproductive_interval = 6.0,
        .offspring_count = 2.0,
    },
};

/// Completes a bundle: present fields are range-checked and kept, missing
/// fields come from kDefaultAttributes and are marked Default. When a table
/// default would break a cross-field invariant against a stored partner
/// (maturity < lifespan, carbon_biomass <= body_mass), the default is
/// derived from the partner using the table's ratio instead. Idempotent.
/// Throws AttrRangeError naming the first out-of-range stored field.
AttributeBundle fill_defaults(const AttributeBundle& bundle);

/// fill_defaults(...).to_attributes().
SpeciesAttributes resolve_attributes(const AttributeBundle& bundle);

/// Converts a stored value to the field's canonical unit. Accepted units:
/// months|years for durations, kg|g for masses, kg/s|g/s for rates,
/// fraction for assimilation_efficiency, count for offspring_count.
/// Throws DecodeError("unsupported-unit") otherwise.
double normalize_unit(AttributeField field, double value, std::string_view unit);

/// Read interface shared by the local fixture store and the remote adapter.
class TraitStore {
 public:
  virtual ~TraitStore() = default;

  /// Case-insensitive substring match on scientific or common names. Exact
  /// name matches come first, then descending attribute_record_count, then
  /// scientific name. Throws InvalidQueryError for blank queries.
  virtual std::vector<TaxonRecord> search_species(std::string_view query) const = 0;

  /// Whatever canonical-unit attributes the store holds. Throws NotFoundError.
  virtual AttributeBundle fetch_attributes(std::string_view taxon_id) const = 0;
};

struct TraitEntry {
  TaxonRecord record;
  AttributeBundle attributes;
};

/// In-memory store over an immutable snapshot of entries. Reads are safe from
/// any thread; `replace` swaps the snapshot atomically.
class LocalTraitStore final : public TraitStore {
 public:
  LocalTraitStore() : LocalTraitStore(std::vector<TraitEntry>{}) {}
  explicit LocalTraitStore(std::vector<TraitEntry> entries);

  static LocalTraitStore from_file(const std::filesystem::path& path);

  std::vector<TaxonRecord> search_species(std::string_view query) const override;
  AttributeBundle fetch_attributes(std::string_view taxon_id) const override;

  void replace(std::vector<TraitEntry> entries);
  std::size_t size() const;

 private:
  using Snapshot = std::vector<TraitEntry>;

  std::shared_ptr<const Snapshot> snapshot() const;

  mutable std::mutex mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
};

/// Parses and validates a fixture document (array of taxon entries with
/// `{field: {value, unit}}` attributes). Units are normalized here; any
/// unknown field, unit, duplicate id or out-of-range value rejects the file.
std::vector<TraitEntry> parse_trait_fixture(std::string_view text);
std::vector<TraitEntry> load_trait_fixture(const std::filesystem::path& path);

// Wire shapes shared by the remote adapter and the service.
nlohmann::json taxon_record_to_json(const TaxonRecord& record);
TaxonRecord taxon_record_from_json(const nlohmann::json& value);
/// `{taxon_id, attributes: {field: {value, unit}}}` in canonical units.
nlohmann::json bundle_to_wire_json(const AttributeBundle& bundle);
AttributeBundle bundle_from_wire_json(const nlohmann::json& value);
/// `{taxon_id, attributes: {field: value}, provenance: {field: "store"|"default"}}`.
nlohmann::json bundle_to_json(const AttributeBundle& bundle);

}  // namespace vera
