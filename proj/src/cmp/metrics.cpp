#include "vera/cmp/metrics.hpp"

#include <set>

#include "vera/cmp/validate.hpp"

namespace vera {

namespace {

std::size_t complexity_unchecked(const ConceptualModel& model) {
  return model.components.size() + model.interactions.size();
}

std::size_t creativity_unchecked(const ConceptualModel& model) {
  std::set<Category> categories;
  for (const Component& c : model.components) {
    if (model.is_baseline(c.id) || c.category == Category::Uncategorized) continue;
    categories.insert(c.category);
  }
  std::set<InteractionKind> kinds;
  for (const Interaction& i : model.interactions) {
    if (model.is_baseline(i.source_id) && model.is_baseline(i.target_id)) continue;
    kinds.insert(i.kind);
  }
  return categories.size() + kinds.size();
}

}  // namespace

std::size_t complexity_score(const ConceptualModel& model) {
  require_valid(model);
  return complexity_unchecked(model);
}

std::size_t creativity_score(const ConceptualModel& model) {
  require_valid(model);
  return creativity_unchecked(model);
}

ModelScores score_model(const ConceptualModel& model) {
  require_valid(model);
  return {complexity_unchecked(model), creativity_unchecked(model)};
}

}  // namespace vera
