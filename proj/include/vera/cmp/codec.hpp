#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "vera/cmp/model.hpp"
#include "vera/cmp/validate.hpp"

namespace vera {

inline constexpr int kModelDocumentVersion = 1;

// Model documents are UTF-8 JSON:
//
//   {"version": 1, "id": ..., "name": ..., "notes": ...,
//    "components": [...], "interactions": [...], "habitats": [...],
//    "baseline": [component ids]}
//
// Enums are lowercase strings ("biotic", "becomes_on_death"). Attribute
// units are implied by field name and never written.

nlohmann::json model_to_json(const ConceptualModel& model);

/// Throws DecodeError ("decode", "unsupported-kind", "unsupported-version").
ConceptualModel model_from_json(const nlohmann::json& document);

std::string encode_model(const ConceptualModel& model);
ConceptualModel decode_model(std::string_view text);

ConceptualModel load_model_file(const std::filesystem::path& path);

nlohmann::json attributes_to_json(const SpeciesAttributes& attrs);

/// `{"valid", "error_count", "warning_count", "issues": [{severity, code,
/// message, subject_id?}]}`.
nlohmann::json report_to_json(const ValidationReport& report);

}  // namespace vera
