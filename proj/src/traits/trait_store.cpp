#include "vera/traits/trait_store.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "detail/json_reader.hpp"
#include "vera/error.hpp"

namespace vera {

using nlohmann::json;
using detail::JsonReader;

std::string_view to_string(Provenance provenance) {
  return provenance == Provenance::Store ? "store" : "default";
}

std::size_t AttributeBundle::present_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](const auto& v) { return v.has_value(); }));
}

SpeciesAttributes AttributeBundle::to_attributes() const {
  SpeciesAttributes attrs;
  for (AttributeField field : kAllAttributeFields) {
    auto value = get(field);
    if (!value) {
      throw Error("incomplete-bundle", "attribute bundle for '" + taxon_id_ + "' lacks " +
                                           std::string(field_name(field)));
    }
    set_field(attrs, field, *value);
  }
  return attrs;
}

namespace {

double table(AttributeField field) { return get_field(kDefaultAttributes.values, field); }

// Default for `field` given a stored `partner`, keeping the table's ratio when
// the plain table value would violate the pair invariant.
double derived_default(AttributeField field, const AttributeBundle& in) {
  using F = AttributeField;
  const double plain = table(field);
  switch (field) {
    case F::CarbonBiomass:
      if (auto mass = in.get(F::BodyMass); mass && plain > *mass) {
        return *mass * (table(F::CarbonBiomass) / table(F::BodyMass));
      }
      break;
    case F::BodyMass:
      if (auto carbon = in.get(F::CarbonBiomass); carbon && *carbon > plain) {
        return *carbon * (table(F::BodyMass) / table(F::CarbonBiomass));
      }
      break;
    case F::ReproductiveMaturity:
      if (auto life = in.get(F::Lifespan); life && plain >= *life) {
        return *life * (table(F::ReproductiveMaturity) / table(F::Lifespan));
      }
      break;
    case F::Lifespan:
      if (auto maturity = in.get(F::ReproductiveMaturity); maturity && *maturity >= plain) {
        return *maturity * (table(F::Lifespan) / table(F::ReproductiveMaturity));
      }
      break;
    default:
      break;
  }
  return plain;
}

}  // namespace

AttributeBundle fill_defaults(const AttributeBundle& bundle) {
  for (AttributeField field : kAllAttributeFields) {
    if (auto value = bundle.get(field)) {
      if (auto problem = check_field_range(field, *value)) {
        throw AttrRangeError(std::string(field_name(field)), "taxon '" + bundle.taxon_id() +
                                                                 "': " + *problem);
      }
    }
  }

  AttributeBundle out = bundle;
  for (AttributeField field : kAllAttributeFields) {
    if (!out.has(field)) out.set(field, derived_default(field, bundle), Provenance::Default);
  }

  const SpeciesAttributes attrs = out.to_attributes();
  for (const auto& violation : {check_maturity(attrs), check_carbon_fraction(attrs)}) {
    if (violation) {
      throw AttrRangeError(std::string(field_name(violation->field)),
                           "taxon '" + bundle.taxon_id() + "': " + violation->message);
    }
  }
  return out;
}

SpeciesAttributes resolve_attributes(const AttributeBundle& bundle) {
  return fill_defaults(bundle).to_attributes();
}

double normalize_unit(AttributeField field, double value, std::string_view unit) {
  using F = AttributeField;
  switch (field) {
    case F::Lifespan:
    case F::ReproductiveMaturity:
    case F::ReproductiveInterval:
      if (unit == "months") return value;
      if (unit == "years") return value * 12.0;
      break;
    case F::BodyMass:
    case F::CarbonBiomass:
      if (unit == "kg") return value;
      if (unit == "g") return value * 0.001;
      break;
    case F::RespiratoryRate:
    case F::PhotosynthesisRate:
      if (unit == "kg/s") return value;
      if (unit == "g/s") return value * 0.001;
      break;
    case F::AssimilationEfficiency:
      if (unit == "fraction") return value;
      break;
    case F::OffspringCount:
      if (unit == "count") return value;
      break;
  }
  throw DecodeError("unsupported-unit", "unit '" + std::string(unit) + "' is not accepted for " +
                                            std::string(field_name(field)));
}

// ---------------------------------------------------------------------------
// JSON shapes

json taxon_record_to_json(const TaxonRecord& record) {
  return {
      {"taxon_id", record.taxon_id},
      {"scientific_name", record.scientific_name},
      {"common_names", record.common_names},
      {"attribute_record_count", record.attribute_record_count},
  };
}

namespace {

TaxonRecord record_from(const JsonReader& r) {
  r.expect_object();
  TaxonRecord record;
  record.taxon_id = r.at("taxon_id").as_string();
  record.scientific_name = r.at("scientific_name").as_string();
  if (r.has("common_names")) {
    const JsonReader names = r.at("common_names");
    names.expect_array();
    for (std::size_t i = 0; i < names.size(); ++i) {
      record.common_names.push_back(names.at(i).as_string());
    }
  }
  if (r.has("attribute_record_count")) {
    record.attribute_record_count = r.at("attribute_record_count").as_count();
  }
  return record;
}

AttributeBundle wire_attributes_from(const JsonReader& r, const std::string& taxon_id) {
  AttributeBundle bundle(taxon_id);
  if (!r.has("attributes")) return bundle;
  const JsonReader attrs = r.at("attributes");
  attrs.expect_object();
  for (const auto& [key, ignored] : attrs.value().items()) {
    const auto field = parse_field_name(key);
    if (!field) attrs.fail("unknown attribute '" + key + "'");
    const JsonReader entry = attrs.at(key.c_str());
    const double raw = entry.at("value").as_number();
    const std::string unit = entry.at("unit").as_string();
    double value = 0.0;
    try {
      value = normalize_unit(*field, raw, unit);
    } catch (const DecodeError& e) {
      throw DecodeError(e.code(), entry.path() + ": " + e.what(), entry.path());
    }
    if (auto problem = check_field_range(*field, value)) {
      throw DecodeError("attr-range", entry.path() + ": " + *problem, entry.path());
    }
    bundle.set(*field, value, Provenance::Store);
  }
  return bundle;
}

}  // namespace

TaxonRecord taxon_record_from_json(const json& value) { return record_from(JsonReader(value, "")); }

json bundle_to_wire_json(const AttributeBundle& bundle) {
  json attrs = json::object();
  for (AttributeField field : kAllAttributeFields) {
    if (auto value = bundle.get(field)) {
      attrs[std::string(field_name(field))] = {{"value", *value},
                                               {"unit", canonical_unit(field)}};
    }
  }
  return {{"taxon_id", bundle.taxon_id()}, {"attributes", std::move(attrs)}};
}

AttributeBundle bundle_from_wire_json(const json& value) {
  JsonReader r(value, "");
  r.expect_object();
  return wire_attributes_from(r, r.at("taxon_id").as_string());
}

json bundle_to_json(const AttributeBundle& bundle) {
  json attrs = json::object();
  json provenance = json::object();
  for (AttributeField field : kAllAttributeFields) {
    const std::string name(field_name(field));
    if (auto value = bundle.get(field)) {
      attrs[name] = *value;
      provenance[name] = to_string(*bundle.provenance(field));
    }
  }
  return {{"taxon_id", bundle.taxon_id()},
          {"attributes", std::move(attrs)},
          {"provenance", std::move(provenance)}};
}

std::vector<TraitEntry> parse_trait_fixture(std::string_view text) {
  const json document = detail::parse_json(text);
  JsonReader root(document, "");
  root.expect_array();

  std::vector<TraitEntry> entries;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const JsonReader r = root.at(i);
    TraitEntry entry;
    entry.record = record_from(r);
    entry.attributes = wire_attributes_from(r, entry.record.taxon_id);
    if (!r.has("attribute_record_count")) {
      entry.record.attribute_record_count = entry.attributes.present_count();
    } else if (entry.record.attribute_record_count < entry.attributes.present_count()) {
      r.fail("attribute_record_count is smaller than the number of attributes present");
    }
    if (!ids.insert(entry.record.taxon_id).second) {
      r.fail("duplicate taxon_id '" + entry.record.taxon_id + "'");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<TraitEntry> load_trait_fixture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open trait fixture " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_trait_fixture(buffer.str());
}

// ---------------------------------------------------------------------------
// LocalTraitStore

namespace {

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

std::string_view trim(std::string_view text) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  auto begin = std::find_if(text.begin(), text.end(), not_space);
  auto end = std::find_if(text.rbegin(), text.rend(), not_space).base();
  return begin < end ? std::string_view(&*begin, static_cast<std::size_t>(end - begin))
                     : std::string_view{};
}

bool matches(const TaxonRecord& record, const std::string& needle) {
  if (lowercase(record.scientific_name).find(needle) != std::string::npos) return true;
  return std::any_of(record.common_names.begin(), record.common_names.end(),
                     [&](const std::string& name) {
                       return lowercase(name).find(needle) != std::string::npos;
                     });
}

}  // namespace

LocalTraitStore::LocalTraitStore(std::vector<TraitEntry> entries)
    : snapshot_(std::make_shared<const Snapshot>(std::move(entries))) {}

LocalTraitStore LocalTraitStore::from_file(const std::filesystem::path& path) {
  return LocalTraitStore(load_trait_fixture(path));
}

std::shared_ptr<const LocalTraitStore::Snapshot> LocalTraitStore::snapshot() const {
  std::lock_guard lock(mutex_);
  return snapshot_;
}

void LocalTraitStore::replace(std::vector<TraitEntry> entries) {
  auto next = std::make_shared<const Snapshot>(std::move(entries));
  std::lock_guard lock(mutex_);
  snapshot_ = std::move(next);
}

std::size_t LocalTraitStore::size() const { return snapshot()->size(); }

std::vector<TaxonRecord> LocalTraitStore::search_species(std::string_view query) const {
  const std::string_view trimmed = trim(query);
  if (trimmed.empty()) throw InvalidQueryError("species query must not be blank");
  const std::string needle = lowercase(trimmed);

  std::vector<TaxonRecord> hits;
  for (const TraitEntry& entry : *snapshot()) {
    if (matches(entry.record, needle)) hits.push_back(entry.record);
  }
  // Exact name matches outrank partial ones.
  const auto exact = [&](const TaxonRecord& r) {
    if (lowercase(r.scientific_name) == needle) return true;
    return std::any_of(r.common_names.begin(), r.common_names.end(),
                       [&](const std::string& name) { return lowercase(name) == needle; });
  };
  std::stable_sort(hits.begin(), hits.end(), [&](const TaxonRecord& a, const TaxonRecord& b) {
    if (exact(a) != exact(b)) return exact(a);
    if (a.attribute_record_count != b.attribute_record_count) {
      return a.attribute_record_count > b.attribute_record_count;
    }
    if (a.scientific_name != b.scientific_name) return a.scientific_name < b.scientific_name;
    return a.taxon_id < b.taxon_id;
  });
  return hits;
}

AttributeBundle LocalTraitStore::fetch_attributes(std::string_view taxon_id) const {
  const auto snap = snapshot();
  for (const TraitEntry& entry : *snap) {
    if (entry.record.taxon_id == taxon_id) return entry.attributes;
  }
  throw NotFoundError("unknown taxon '" + std::string(taxon_id) + "'");
}

}  // namespace vera
