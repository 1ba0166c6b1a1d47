#include <algorithm>
#include <cctype>
#include <cmath>

#include "vera/cmp/validate.hpp"
#include "vera/compiler/program.hpp"
#include "vera/error.hpp"

namespace vera {

namespace {

int phase_of(RuleKind kind) {
  switch (kind) {
    case RuleKind::Metabolism: return 0;
    case RuleKind::Affect: return 1;
    case RuleKind::Consume:
    case RuleKind::Destroy: return 2;
    case RuleKind::Produce: return 3;
    case RuleKind::Aging: return 4;
    case RuleKind::BecomeOnDeath: return 5;
    case RuleKind::Reproduction: return 6;
  }
  return 7;
}

RuleKind rule_kind_for(InteractionKind kind) {
  switch (kind) {
    case InteractionKind::Consumes: return RuleKind::Consume;
    case InteractionKind::Destroys: return RuleKind::Destroy;
    case InteractionKind::Produces: return RuleKind::Produce;
    case InteractionKind::BecomesOnDeath: return RuleKind::BecomeOnDeath;
    case InteractionKind::Affects:
    case InteractionKind::Infects:
    case InteractionKind::ParasiteOf: return RuleKind::Affect;
  }
  return RuleKind::Affect;
}

PopulationSchema schema_for(const Component& c, const SimSettings& settings) {
  PopulationSchema p;
  p.component_id = c.id;
  p.name = c.name;
  p.kind = c.kind;
  p.unlimited = c.unlimited;
  p.habitat_id = c.habitat_id;
  if (c.is_biotic()) {
    p.attributes = *c.attributes;
    p.monthly_respiration = p.attributes.respiratory_rate * settings.seconds_per_month;
    p.monthly_photosynthesis = p.attributes.photosynthesis_rate * settings.seconds_per_month;
    p.initial_count = c.initial_population;
    if (p.initial_count > settings.agent_cap) {
      p.scale = (p.initial_count + settings.agent_cap - 1) / settings.agent_cap;
    }
  } else {
    p.initial_amount = c.initial_amount;
  }
  return p;
}

}  // namespace

std::string_view to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::Metabolism: return "METABOLISM";
    case RuleKind::Affect: return "AFFECT";
    case RuleKind::Consume: return "CONSUME";
    case RuleKind::Destroy: return "DESTROY";
    case RuleKind::Produce: return "PRODUCE";
    case RuleKind::Aging: return "AGING";
    case RuleKind::BecomeOnDeath: return "BECOME_ON_DEATH";
    case RuleKind::Reproduction: return "REPRODUCTION";
  }
  return "UNKNOWN";
}

void check_settings(const SimSettings& s) {
  if (s.duration == 0) throw Error("invalid-settings", "duration must be at least 1 month");
  if (s.agent_cap == 0) throw Error("invalid-settings", "agent_cap must be at least 1");
  if (!(s.starvation_fraction > 0.0 && s.starvation_fraction < 1.0)) {
    throw Error("invalid-settings", "starvation_fraction must lie in (0, 1)");
  }
  if (!(s.seconds_per_month > 0.0) || !std::isfinite(s.seconds_per_month)) {
    throw Error("invalid-settings", "seconds_per_month must be positive");
  }
}

std::size_t SimProgram::interaction_rule_count() const {
  return static_cast<std::size_t>(
      std::count_if(rules.begin(), rules.end(), [](const Rule& r) { return r.from_interaction(); }));
}

SimProgram compile(const ConceptualModel& model, const SimSettings& settings) {
  check_settings(settings);
  // Reported by the validator too; checked first so the compiler's own error
  // code surfaces.
  for (const Interaction& i : model.interactions) {
    const Component* target = model.find_component(i.target_id);
    if (i.kind == InteractionKind::BecomesOnDeath && target && target->is_biotic()) {
      throw CompileError("becomes-target-not-abiotic",
                         i.id + ": " + i.source_id + " becomes " + i.target_id +
                             " on death, but " + i.target_id + " is biotic");
    }
  }
  require_valid(model);

  SimProgram program;
  program.settings = settings;
  program.source_model_id = model.id;

  auto index_of = [&](const std::string& component_id) {
    auto it = std::find_if(model.components.begin(), model.components.end(),
                           [&](const Component& c) { return c.id == component_id; });
    return static_cast<std::size_t>(it - model.components.begin());
  };

  for (const Component& c : model.components) {
    program.populations.push_back(schema_for(c, settings));
  }

  std::vector<Rule> rules;
  for (std::size_t p = 0; p < program.populations.size(); ++p) {
    const PopulationSchema& pop = program.populations[p];
    if (!pop.is_biotic()) continue;
    for (RuleKind kind : {RuleKind::Metabolism, RuleKind::Aging, RuleKind::Reproduction}) {
      Rule r;
      r.kind = kind;
      r.source = r.target = p;
      std::string suffix(to_string(kind));
      std::transform(suffix.begin(), suffix.end(), suffix.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      r.rule_id = pop.component_id + "/" + suffix;
      rules.push_back(std::move(r));
    }
  }

  for (const Interaction& i : model.interactions) {
    Rule r;
    r.rule_id = i.id;
    r.kind = rule_kind_for(i.kind);
    r.origin = i.kind;
    r.source = index_of(i.source_id);
    r.target = index_of(i.target_id);
    const auto& src = program.populations[r.source];
    const auto& dst = program.populations[r.target];
    r.active = !(src.habitat_id && dst.habitat_id && *src.habitat_id != *dst.habitat_id);
    switch (r.kind) {
      case RuleKind::Consume:
        r.half_saturation = i.params.encounter_half_saturation.value_or(kDefaultHalfSaturation);
        break;
      case RuleKind::Destroy:
        r.half_saturation = i.params.encounter_half_saturation.value_or(kDefaultHalfSaturation);
        r.destroy_fraction = i.params.destroy_fraction.value_or(kDefaultDestroyFraction);
        break;
      case RuleKind::Produce:
        r.produce_probability = *i.params.produce_probability;
        r.produce_amount = *i.params.produce_amount;
        break;
      case RuleKind::Affect:
        r.growth_modifier = *i.params.growth_modifier;
        break;
      default:
        break;
    }
    rules.push_back(std::move(r));
  }

  std::stable_sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) {
    return phase_of(a.kind) < phase_of(b.kind);
  });
  program.rules = std::move(rules);
  return program;
}

}  // namespace vera
