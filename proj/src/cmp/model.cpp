#include "vera/cmp/model.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace vera {

namespace {

template <typename Enum, std::size_t N>
using NameTable = std::array<std::pair<Enum, std::string_view>, N>;

constexpr NameTable<ComponentKind, 2> kComponentKinds = {{
    {ComponentKind::Biotic, "biotic"},
    {ComponentKind::Abiotic, "abiotic"},
}};

constexpr NameTable<Category, 7> kCategories = {{
    {Category::Predator, "predator"},
    {Category::Prey, "prey"},
    {Category::Competitor, "competitor"},
    {Category::Pathogen, "pathogen"},
    {Category::SocialFactor, "social_factor"},
    {Category::EnvironmentalFactor, "environmental_factor"},
    {Category::Uncategorized, "uncategorized"},
}};

constexpr NameTable<InteractionKind, 7> kInteractionKinds = {{
    {InteractionKind::Destroys, "destroys"},
    {InteractionKind::Produces, "produces"},
    {InteractionKind::Consumes, "consumes"},
    {InteractionKind::BecomesOnDeath, "becomes_on_death"},
    {InteractionKind::Affects, "affects"},
    {InteractionKind::Infects, "infects"},
    {InteractionKind::ParasiteOf, "parasite_of"},
}};

template <typename Enum, std::size_t N>
std::string_view lookup_name(const NameTable<Enum, N>& table, Enum value) {
  for (const auto& [e, name] : table) {
    if (e == value) return name;
  }
  return "unknown";
}

template <typename Enum, std::size_t N>
std::optional<Enum> lookup_value(const NameTable<Enum, N>& table, std::string_view text) {
  for (const auto& [e, name] : table) {
    if (name == text) return e;
  }
  return std::nullopt;
}

}  // namespace

const Component* ConceptualModel::find_component(std::string_view component_id) const {
  auto it = std::find_if(components.begin(), components.end(),
                         [&](const Component& c) { return c.id == component_id; });
  return it == components.end() ? nullptr : &*it;
}

bool ConceptualModel::is_baseline(std::string_view component_id) const {
  return baseline_component_ids.count(std::string(component_id)) != 0;
}

std::string_view to_string(ComponentKind kind) { return lookup_name(kComponentKinds, kind); }
std::string_view to_string(Category category) { return lookup_name(kCategories, category); }
std::string_view to_string(InteractionKind kind) { return lookup_name(kInteractionKinds, kind); }

std::optional<ComponentKind> parse_component_kind(std::string_view text) {
  return lookup_value(kComponentKinds, text);
}
std::optional<Category> parse_category(std::string_view text) {
  return lookup_value(kCategories, text);
}
std::optional<InteractionKind> parse_interaction_kind(std::string_view text) {
  return lookup_value(kInteractionKinds, text);
}

}  // namespace vera
