#include "vera/cmp/codec.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "detail/json_reader.hpp"

namespace vera {

using nlohmann::json;
using detail::JsonReader;

namespace {

json params_to_json(const InteractionParams& p) {
  json out = json::object();
  if (p.growth_modifier) out["growth_modifier"] = *p.growth_modifier;
  if (p.produce_probability) out["produce_probability"] = *p.produce_probability;
  if (p.produce_amount) out["produce_amount"] = *p.produce_amount;
  if (p.encounter_half_saturation) out["encounter_half_saturation"] = *p.encounter_half_saturation;
  if (p.destroy_fraction) out["destroy_fraction"] = *p.destroy_fraction;
  return out;
}

json component_to_json(const Component& c) {
  json out = {
      {"id", c.id},
      {"name", c.name},
      {"kind", to_string(c.kind)},
      {"category", to_string(c.category)},
      {"unlimited", c.unlimited},
  };
  if (c.taxon_id) out["taxon_id"] = *c.taxon_id;
  if (c.attributes) out["attributes"] = attributes_to_json(*c.attributes);
  if (c.is_biotic() || c.initial_population != 0) out["initial_population"] = c.initial_population;
  if (!c.is_biotic() || c.initial_amount != 0.0) out["initial_amount"] = c.initial_amount;
  if (c.habitat_id) out["habitat_id"] = *c.habitat_id;
  return out;
}

SpeciesAttributes attributes_from(const JsonReader& r) {
  r.expect_object();
  for (const auto& [key, ignored] : r.value().items()) {
    if (!parse_field_name(key)) r.fail("unknown attribute '" + key + "'");
  }
  SpeciesAttributes attrs;
  for (AttributeField field : kAllAttributeFields) {
    const std::string name(field_name(field));
    set_field(attrs, field, r.at(name.c_str()).as_number());
  }
  return attrs;
}

template <typename Enum, typename Parser>
Enum enum_from(const JsonReader& r, Parser parse, const char* what, const char* error_code) {
  std::string text = r.as_string();
  if (auto v = parse(text)) return *v;
  throw DecodeError(error_code, r.path() + ": unsupported " + what + " '" + text + "'", r.path());
}

Component component_from(const JsonReader& r) {
  r.expect_object();
  Component c;
  c.id = r.at("id").as_string();
  c.name = r.has("name") ? r.at("name").as_string() : c.id;
  c.kind = enum_from<ComponentKind>(r.at("kind"), parse_component_kind, "component kind",
                                    "unsupported-kind");
  c.category = r.has("category") ? enum_from<Category>(r.at("category"), parse_category,
                                                       "category", "unsupported-kind")
                                 : Category::Uncategorized;
  c.taxon_id = r.optional_string("taxon_id");
  if (r.has("attributes")) c.attributes = attributes_from(r.at("attributes"));
  if (r.has("initial_population")) c.initial_population = r.at("initial_population").as_count();
  if (r.has("initial_amount")) c.initial_amount = r.at("initial_amount").as_number();
  if (r.has("unlimited")) c.unlimited = r.at("unlimited").as_bool();
  c.habitat_id = r.optional_string("habitat_id");
  return c;
}

InteractionParams params_from(const JsonReader& r) {
  r.expect_object();
  static constexpr const char* kKnown[] = {"growth_modifier", "produce_probability",
                                           "produce_amount", "encounter_half_saturation",
                                           "destroy_fraction"};
  for (const auto& [key, ignored] : r.value().items()) {
    bool known = false;
    for (const char* k : kKnown) known = known || key == k;
    if (!known) r.fail("unknown interaction parameter '" + key + "'");
  }
  InteractionParams p;
  p.growth_modifier = r.optional_number("growth_modifier");
  p.produce_probability = r.optional_number("produce_probability");
  p.produce_amount = r.optional_number("produce_amount");
  p.encounter_half_saturation = r.optional_number("encounter_half_saturation");
  p.destroy_fraction = r.optional_number("destroy_fraction");
  return p;
}

Interaction interaction_from(const JsonReader& r) {
  r.expect_object();
  Interaction i;
  i.id = r.at("id").as_string();
  i.kind = enum_from<InteractionKind>(r.at("kind"), parse_interaction_kind, "interaction kind",
                                      "unsupported-kind");
  i.source_id = r.at("source_id").as_string();
  i.target_id = r.at("target_id").as_string();
  if (r.has("params")) i.params = params_from(r.at("params"));
  return i;
}

}  // namespace

json attributes_to_json(const SpeciesAttributes& attrs) {
  json out = json::object();
  for (AttributeField field : kAllAttributeFields) {
    out[std::string(field_name(field))] = get_field(attrs, field);
  }
  return out;
}

json model_to_json(const ConceptualModel& model) {
  json components = json::array();
  for (const Component& c : model.components) components.push_back(component_to_json(c));

  json interactions = json::array();
  for (const Interaction& i : model.interactions) {
    interactions.push_back({
        {"id", i.id},
        {"kind", to_string(i.kind)},
        {"source_id", i.source_id},
        {"target_id", i.target_id},
        {"params", params_to_json(i.params)},
    });
  }

  json habitats = json::array();
  for (const Habitat& h : model.habitats) habitats.push_back({{"id", h.id}, {"name", h.name}});

  json out = {
      {"version", kModelDocumentVersion},
      {"id", model.id},
      {"name", model.name},
      {"components", std::move(components)},
      {"interactions", std::move(interactions)},
      {"habitats", std::move(habitats)},
      {"baseline", model.baseline_component_ids},
  };
  if (model.notes) out["notes"] = *model.notes;
  return out;
}

ConceptualModel model_from_json(const json& document) {
  JsonReader root(document, "");
  root.expect_object();

  const JsonReader version = root.at("version");
  if (!version.value().is_number_integer() || version.value().get<int>() != kModelDocumentVersion) {
    throw DecodeError("unsupported-version",
                      "/version: unsupported model document version " + version.value().dump(),
                      "/version");
  }

  ConceptualModel model;
  model.id = root.has("id") ? root.at("id").as_string() : std::string{};
  model.name = root.at("name").as_string();
  model.notes = root.optional_string("notes");

  const JsonReader components = root.at("components");
  components.expect_array();
  for (std::size_t i = 0; i < components.size(); ++i) {
    model.components.push_back(component_from(components.at(i)));
  }

  if (root.has("interactions")) {
    const JsonReader interactions = root.at("interactions");
    interactions.expect_array();
    for (std::size_t i = 0; i < interactions.size(); ++i) {
      model.interactions.push_back(interaction_from(interactions.at(i)));
    }
  }

  if (root.has("habitats")) {
    const JsonReader habitats = root.at("habitats");
    habitats.expect_array();
    for (std::size_t i = 0; i < habitats.size(); ++i) {
      const JsonReader h = habitats.at(i);
      h.expect_object();
      const std::string id = h.at("id").as_string();
      model.habitats.push_back({id, h.has("name") ? h.at("name").as_string() : id});
    }
  }

  if (root.has("baseline")) {
    const JsonReader baseline = root.at("baseline");
    baseline.expect_array();
    for (std::size_t i = 0; i < baseline.size(); ++i) {
      model.baseline_component_ids.insert(baseline.at(i).as_string());
    }
  }
  return model;
}

std::string encode_model(const ConceptualModel& model) { return model_to_json(model).dump(2); }

ConceptualModel decode_model(std::string_view text) {
  return model_from_json(detail::parse_json(text));
}

ConceptualModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open model file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return decode_model(buffer.str());
}

json report_to_json(const ValidationReport& report) {
  json issues = json::array();
  for (const ValidationIssue& issue : report.issues) {
    json item = {{"severity", issue.severity == Severity::Error ? "error" : "warning"},
                 {"code", issue.code},
                 {"message", issue.message}};
    if (issue.subject_id) item["subject_id"] = *issue.subject_id;
    issues.push_back(std::move(item));
  }
  return {{"valid", report.valid},
          {"error_count", report.error_count()},
          {"warning_count", report.warning_count()},
          {"issues", std::move(issues)}};
}

}  // namespace vera
