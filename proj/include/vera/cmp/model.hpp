#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vera/cmp/attributes.hpp"

namespace vera {

enum class ComponentKind { Biotic, Abiotic };

/// Modeler-assigned role annotation, used for creativity scoring.
enum class Category {
  Predator,
  Prey,
  Competitor,
  Pathogen,
  SocialFactor,
  EnvironmentalFactor,
  Uncategorized,
};

/// Closed set of relationship kinds. Infects and ParasiteOf run as negative
/// Affects but stay distinct for scoring.
enum class InteractionKind {
  Destroys,
  Produces,
  Consumes,
  BecomesOnDeath,
  Affects,
  Infects,
  ParasiteOf,
};

inline constexpr double kDefaultHalfSaturation = 100.0;
inline constexpr double kDefaultDestroyFraction = 1.0;

/// Kind-specific knobs. Unset fields take the defaults above where one exists;
/// setting a field that does not belong to the interaction kind is an error.
struct InteractionParams {
  std::optional<double> growth_modifier;            // Affects/Infects/ParasiteOf, [-1, 1]
  std::optional<double> produce_probability;        // Produces, [0, 1]
  std::optional<double> produce_amount;             // Produces, kg > 0
  std::optional<double> encounter_half_saturation;  // Consumes/Destroys, > 0
  std::optional<double> destroy_fraction;           // Destroys, (0, 1]

  friend bool operator==(const InteractionParams&, const InteractionParams&) = default;
};

struct Component {
  std::string id;
  std::string name;
  ComponentKind kind = ComponentKind::Biotic;
  Category category = Category::Uncategorized;
  std::optional<std::string> taxon_id;
  std::optional<SpeciesAttributes> attributes;  // Biotic only
  std::uint64_t initial_population = 0;         // Biotic
  double initial_amount = 0.0;                  // Abiotic, kg
  bool unlimited = false;
  std::optional<std::string> habitat_id;

  bool is_biotic() const noexcept { return kind == ComponentKind::Biotic; }

  friend bool operator==(const Component&, const Component&) = default;
};

struct Habitat {
  std::string id;
  std::string name;

  friend bool operator==(const Habitat&, const Habitat&) = default;
};

struct Interaction {
  std::string id;
  InteractionKind kind = InteractionKind::Consumes;
  std::string source_id;
  std::string target_id;
  InteractionParams params;

  friend bool operator==(const Interaction&, const Interaction&) = default;
};

/// A CMP conceptual model: components, directed interactions between them,
/// and the habitats they live in.
struct ConceptualModel {
  std::string id;
  std::string name;
  std::vector<Component> components;
  std::vector<Interaction> interactions;
  std::vector<Habitat> habitats;
  std::set<std::string> baseline_component_ids;
  std::optional<std::string> notes;

  const Component* find_component(std::string_view component_id) const;
  bool is_baseline(std::string_view component_id) const;

  friend bool operator==(const ConceptualModel&, const ConceptualModel&) = default;
};

std::string_view to_string(ComponentKind kind);
std::string_view to_string(Category category);
std::string_view to_string(InteractionKind kind);

std::optional<ComponentKind> parse_component_kind(std::string_view text);
std::optional<Category> parse_category(std::string_view text);
std::optional<InteractionKind> parse_interaction_kind(std::string_view text);

/// Infects and ParasiteOf share Affects' runtime semantics.
constexpr bool is_affect_like(InteractionKind kind) {
  return kind == InteractionKind::Affects || kind == InteractionKind::Infects ||
         kind == InteractionKind::ParasiteOf;
}

constexpr bool is_encounter(InteractionKind kind) {
  return kind == InteractionKind::Consumes || kind == InteractionKind::Destroys;
}

}  // namespace vera
