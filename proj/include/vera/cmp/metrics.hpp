#pragma once

#include <cstddef>

#include "vera/cmp/model.hpp"

namespace vera {

struct ModelScores {
  std::size_t complexity = 0;
  std::size_t creativity = 0;

  friend bool operator==(const ModelScores&, const ModelScores&) = default;
};

/// Number of components plus number of interactions. Habitats are regions,
/// not components, and are not counted. Throws ValidationError on invalid models.
std::size_t complexity_score(const ConceptualModel& model);

/// Distinct categories among non-baseline components plus distinct
/// interaction kinds among interactions touching a non-baseline component.
/// Uncategorized additions contribute no category. Throws ValidationError on
/// invalid models.
std::size_t creativity_score(const ConceptualModel& model);

ModelScores score_model(const ConceptualModel& model);

}  // namespace vera
