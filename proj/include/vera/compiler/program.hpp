#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vera/cmp/model.hpp"

namespace vera {

/// Length of one simulation tick (a 30-day month) in seconds. Every
/// per-second rate is converted through this constant.
inline constexpr double kSecondsPerMonth = 2'592'000.0;

struct SimSettings {
  std::uint32_t duration = 60;      // months
  std::uint64_t seed = 0;
  std::uint64_t agent_cap = 10'000;  // agents per population before super-individuals
  double starvation_fraction = 0.25;
  double seconds_per_month = kSecondsPerMonth;

  friend bool operator==(const SimSettings&, const SimSettings&) = default;
};

/// Throws Error("invalid-settings") unless every field is positive and the
/// starvation fraction lies in (0, 1).
void check_settings(const SimSettings& settings);

/// One simulated population, resolved from a model component.
struct PopulationSchema {
  std::string component_id;
  std::string name;
  ComponentKind kind = ComponentKind::Biotic;
  double monthly_respiration = 0.0;     // kg/month per individual
  double monthly_photosynthesis = 0.0;  // kg/month per individual
  SpeciesAttributes attributes;         // Biotic only
  std::uint64_t initial_count = 0;      // Biotic
  double initial_amount = 0.0;          // Abiotic, kg
  bool unlimited = false;
  std::uint64_t scale = 1;  // individuals represented by one agent
  std::optional<std::string> habitat_id;

  bool is_biotic() const noexcept { return kind == ComponentKind::Biotic; }
  /// Carbon held by a freshly created agent of this population.
  double reference_carbon() const { return attributes.carbon_biomass * static_cast<double>(scale); }

  friend bool operator==(const PopulationSchema&, const PopulationSchema&) = default;
};

enum class RuleKind {
  Metabolism,
  Affect,
  Consume,
  Destroy,
  Produce,
  Aging,
  BecomeOnDeath,
  Reproduction,
};

std::string_view to_string(RuleKind kind);

/// An executable rule. Interaction rules carry the originating interaction;
/// lifecycle rules (Metabolism, Aging, Reproduction) have source == target.
struct Rule {
  std::string rule_id;
  RuleKind kind = RuleKind::Metabolism;
  std::optional<InteractionKind> origin;  // unset for lifecycle rules
  std::size_t source = 0;                 // population index
  std::size_t target = 0;
  /// False when the endpoints live in different habitats; the rule never fires.
  bool active = true;

  double half_saturation = 0.0;      // Consume, Destroy
  double destroy_fraction = 0.0;     // Destroy
  double produce_probability = 0.0;  // Produce
  double produce_amount = 0.0;       // Produce, kg per individual or per event
  double growth_modifier = 0.0;      // Affect

  bool from_interaction() const noexcept { return origin.has_value(); }

  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Compiled model. Rules are sorted into engine phase order; within a phase
/// they keep model order.
struct SimProgram {
  std::vector<PopulationSchema> populations;
  std::vector<Rule> rules;
  SimSettings settings;
  std::string source_model_id;

  std::size_t interaction_rule_count() const;

  friend bool operator==(const SimProgram&, const SimProgram&) = default;
};

/// Validates then compiles. Pure and deterministic.
///
/// Throws ValidationError for invalid models, CompileError
/// ("becomes-target-not-abiotic") for a becomes-on-death edge into a biotic
/// population, and Error("invalid-settings") for bad settings.
SimProgram compile(const ConceptualModel& model, const SimSettings& settings = {});

/// Stable textual rendering of a program: a header line with the program
/// hash and settings, one line per population, then one line per rule as
/// `KIND source -> target {param=value unit, ...}`.
std::string emit_listing(const SimProgram& program);

/// FNV-1a 64 over the settings line plus the listing body, as 16 hex digits.
std::string program_hash(const SimProgram& program);

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

}  // namespace vera
