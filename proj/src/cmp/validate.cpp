#include "vera/cmp/validate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace vera {

namespace {

class ReportBuilder {
 public:
  void error(std::string code, std::string message, std::optional<std::string> subject = {}) {
    report_.issues.push_back({Severity::Error, std::move(code), std::move(message),
                              std::move(subject)});
    report_.valid = false;
  }

  void warning(std::string code, std::string message, std::optional<std::string> subject = {}) {
    report_.issues.push_back({Severity::Warning, std::move(code), std::move(message),
                              std::move(subject)});
  }

  void add(Severity severity, std::string code, std::string message,
           std::optional<std::string> subject) {
    if (severity == Severity::Error) {
      error(std::move(code), std::move(message), std::move(subject));
    } else {
      warning(std::move(code), std::move(message), std::move(subject));
    }
  }

  ValidationReport take() { return std::move(report_); }

 private:
  ValidationReport report_;
};

template <typename Range, typename IdOf>
void check_unique_ids(const Range& items, IdOf id_of, std::string_view what, ReportBuilder& out) {
  std::set<std::string> seen;
  for (const auto& item : items) {
    const std::string& id = id_of(item);
    if (id.empty()) {
      out.error("duplicate-id", std::string(what) + " has an empty id");
      continue;
    }
    if (!seen.insert(id).second) {
      out.error("duplicate-id", std::string(what) + " id '" + id + "' is not unique", id);
    }
  }
}

void check_attributes(const Component& c, const ValidationOptions& options, ReportBuilder& out) {
  const SpeciesAttributes& attrs = *c.attributes;
  bool fields_ok = true;
  for (AttributeField field : kAllAttributeFields) {
    if (auto problem = check_field_range(field, get_field(attrs, field))) {
      out.error("attr-range", c.id + ": " + *problem, c.id);
      fields_ok = false;
    }
  }
  if (!fields_ok) return;
  if (auto v = check_maturity(attrs)) {
    out.add(options.maturity_violation_is_warning ? Severity::Warning : Severity::Error,
            "attr-range", c.id + ": " + v->message, c.id);
  }
  if (auto v = check_carbon_fraction(attrs)) {
    out.error("attr-range", c.id + ": " + v->message, c.id);
  }
}

void check_component(const Component& c, const std::set<std::string>& habitat_ids,
                     const ValidationOptions& options, ReportBuilder& out) {
  if (c.habitat_id && habitat_ids.count(*c.habitat_id) == 0) {
    out.error("dangling-habitat",
              c.id + " references unknown habitat '" + *c.habitat_id + "'", c.id);
  }
  if (c.is_biotic()) {
    if (!c.attributes) {
      out.error("missing-attributes", "biotic component " + c.id + " has no attributes", c.id);
    } else {
      check_attributes(c, options, out);
    }
    if (c.initial_amount != 0.0) {
      out.error("kind-mismatch", "biotic component " + c.id + " must not set initial_amount",
                c.id);
    }
  } else {
    if (c.attributes) {
      out.error("kind-mismatch", "abiotic component " + c.id + " must not carry attributes",
                c.id);
    }
    if (c.initial_population != 0) {
      out.error("kind-mismatch",
                "abiotic component " + c.id + " must not set initial_population", c.id);
    }
    if (!std::isfinite(c.initial_amount) || c.initial_amount < 0.0) {
      out.error("initial-range", "abiotic component " + c.id + " initial_amount must be >= 0",
                c.id);
    }
  }
  if (c.category == Category::Uncategorized) {
    out.warning("uncategorized", c.id + " has no category", c.id);
  }
}

struct ParamSpec {
  bool growth = false;
  bool produce = false;
  bool encounter = false;
  bool destroy = false;
};

ParamSpec allowed_params(InteractionKind kind) {
  switch (kind) {
    case InteractionKind::Affects:
    case InteractionKind::Infects:
    case InteractionKind::ParasiteOf:
      return {.growth = true};
    case InteractionKind::Produces:
      return {.produce = true};
    case InteractionKind::Consumes:
      return {.encounter = true};
    case InteractionKind::Destroys:
      return {.encounter = true, .destroy = true};
    case InteractionKind::BecomesOnDeath:
      return {};
  }
  return {};
}

void check_params(const Interaction& i, ReportBuilder& out) {
  const InteractionParams& p = i.params;
  const ParamSpec spec = allowed_params(i.kind);
  const std::string kind(to_string(i.kind));

  auto mismatch = [&](bool present, bool allowed, std::string_view field) {
    if (present && !allowed) {
      out.error("params-mismatch",
                i.id + ": " + std::string(field) + " is not a parameter of " + kind, i.id);
    }
  };
  mismatch(p.growth_modifier.has_value(), spec.growth, "growth_modifier");
  mismatch(p.produce_probability.has_value(), spec.produce, "produce_probability");
  mismatch(p.produce_amount.has_value(), spec.produce, "produce_amount");
  mismatch(p.encounter_half_saturation.has_value(), spec.encounter, "encounter_half_saturation");
  mismatch(p.destroy_fraction.has_value(), spec.destroy, "destroy_fraction");

  auto range = [&](const std::optional<double>& v, bool allowed, std::string_view field,
                   auto predicate, std::string_view requirement) {
    if (!allowed || !v) return;
    if (!std::isfinite(*v) || !predicate(*v)) {
      std::ostringstream msg;
      msg << i.id << ": " << field << " = " << *v << " must be " << requirement;
      out.error("param-range", msg.str(), i.id);
    }
  };
  range(p.growth_modifier, spec.growth, "growth_modifier",
        [](double v) { return v >= -1.0 && v <= 1.0; }, "in [-1, 1]");
  range(p.produce_probability, spec.produce, "produce_probability",
        [](double v) { return v >= 0.0 && v <= 1.0; }, "in [0, 1]");
  range(p.produce_amount, spec.produce, "produce_amount", [](double v) { return v > 0.0; },
        "> 0 kg");
  range(p.encounter_half_saturation, spec.encounter, "encounter_half_saturation",
        [](double v) { return v > 0.0; }, "> 0");
  range(p.destroy_fraction, spec.destroy, "destroy_fraction",
        [](double v) { return v > 0.0 && v <= 1.0; }, "in (0, 1]");

  if (spec.growth && !p.growth_modifier) {
    out.error("params-missing", i.id + ": " + kind + " requires growth_modifier", i.id);
  }
  if ((i.kind == InteractionKind::Infects || i.kind == InteractionKind::ParasiteOf) &&
      p.growth_modifier && std::isfinite(*p.growth_modifier) && *p.growth_modifier >= 0.0) {
    out.error("param-range", i.id + ": " + kind + " requires a negative growth_modifier", i.id);
  }
  if (spec.produce && !p.produce_probability) {
    out.error("params-missing", i.id + ": produces requires produce_probability", i.id);
  }
  if (spec.produce && !p.produce_amount) {
    out.error("params-missing", i.id + ": produces requires produce_amount", i.id);
  }
}

void check_interaction(const Interaction& i, const ConceptualModel& model, ReportBuilder& out) {
  const Component* source = model.find_component(i.source_id);
  const Component* target = model.find_component(i.target_id);
  if (!source) {
    out.error("dangling-endpoint", i.id + ": source '" + i.source_id + "' does not exist", i.id);
  }
  if (!target) {
    out.error("dangling-endpoint", i.id + ": target '" + i.target_id + "' does not exist", i.id);
  }
  if (is_encounter(i.kind) && i.source_id == i.target_id) {
    out.error("self-interaction",
              i.id + ": " + std::string(to_string(i.kind)) + " cannot target its own source",
              i.id);
  }
  check_params(i, out);

  if (source && i.kind == InteractionKind::Consumes && !source->is_biotic()) {
    out.error("consumer-not-biotic", i.id + ": consumer " + source->id + " must be biotic", i.id);
  }
  if (target && i.kind == InteractionKind::Produces && target->is_biotic()) {
    out.error("produce-target-not-abiotic",
              i.id + ": produced component " + target->id + " must be abiotic", i.id);
  }
  if (target && i.kind == InteractionKind::BecomesOnDeath && target->is_biotic()) {
    out.error("becomes-target-not-abiotic",
              i.id + ": " + target->id + " must be abiotic to receive carbon on death", i.id);
  }
  if (source && target && source->habitat_id && target->habitat_id &&
      *source->habitat_id != *target->habitat_id) {
    out.warning("habitat-mismatch",
                i.id + ": " + source->id + " and " + target->id +
                    " live in different habitats; the interaction never fires",
                i.id);
  }
}

bool feeds_itself(const Component& c) {
  return c.attributes && c.attributes->photosynthesis_rate > c.attributes->respiratory_rate;
}

}  // namespace

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(std::count_if(issues.begin(), issues.end(), [](const auto& i) {
    return i.severity == Severity::Error;
  }));
}

std::size_t ValidationReport::warning_count() const { return issues.size() - error_count(); }

bool ValidationReport::has_code(std::string_view code) const {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const ValidationIssue& i) { return i.code == code; });
}

ValidationReport validate_model(const ConceptualModel& model, const ValidationOptions& options) {
  ReportBuilder out;

  check_unique_ids(model.components, [](const Component& c) -> const std::string& { return c.id; },
                   "component", out);
  check_unique_ids(model.interactions,
                   [](const Interaction& i) -> const std::string& { return i.id; }, "interaction",
                   out);
  check_unique_ids(model.habitats, [](const Habitat& h) -> const std::string& { return h.id; },
                   "habitat", out);

  std::set<std::string> habitat_ids;
  for (const Habitat& h : model.habitats) habitat_ids.insert(h.id);

  for (const Component& c : model.components) check_component(c, habitat_ids, options, out);
  for (const std::string& id : model.baseline_component_ids) {
    if (!model.find_component(id)) {
      out.error("dangling-baseline", "baseline id '" + id + "' is not a component", id);
    }
  }
  for (const Interaction& i : model.interactions) check_interaction(i, model, out);

  for (const Component& c : model.components) {
    if (!c.is_biotic() || c.unlimited || feeds_itself(c)) continue;
    bool has_food = std::any_of(model.interactions.begin(), model.interactions.end(),
                                [&](const Interaction& i) {
                                  return i.kind == InteractionKind::Consumes && i.source_id == c.id;
                                });
    if (!has_food) {
      out.warning("no-food-source", c.id + " has no food source and will starve", c.id);
    }
  }
  return out.take();
}

namespace {

std::string summarize(const ValidationReport& report) {
  for (const ValidationIssue& issue : report.issues) {
    if (issue.severity == Severity::Error) {
      return "model is invalid: [" + issue.code + "] " + issue.message;
    }
  }
  return "model is invalid";
}

}  // namespace

ValidationError::ValidationError(ValidationReport report)
    : Error("validation", summarize(report)), report_(std::move(report)) {}

void require_valid(const ConceptualModel& model) {
  ValidationReport report = validate_model(model);
  if (!report.valid) throw ValidationError(std::move(report));
}

}  // namespace vera
