#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vera/cmp/model.hpp"
#include "vera/error.hpp"

namespace vera {

enum class Severity { Error, Warning };

struct ValidationIssue {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  std::optional<std::string> subject_id;

  friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

struct ValidationReport {
  bool valid = true;
  std::vector<ValidationIssue> issues;

  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool has_code(std::string_view code) const;

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

struct ValidationOptions {
  /// Report `reproductive_maturity >= lifespan` as a Warning instead of an Error.
  bool maturity_violation_is_warning = false;
};

/// Checks structural and range constraints. Never throws; every problem is
/// reported as an issue. Issues are ordered by model position.
///
/// Error codes: duplicate-id, dangling-endpoint, dangling-habitat,
/// dangling-baseline, self-interaction, missing-attributes, kind-mismatch,
/// attr-range, initial-range, params-mismatch, params-missing, param-range,
/// consumer-not-biotic, produce-target-not-abiotic, becomes-target-not-abiotic.
/// Warning codes: no-food-source, uncategorized, habitat-mismatch.
ValidationReport validate_model(const ConceptualModel& model,
                                const ValidationOptions& options = {});

/// Thrown by operations that require a valid model.
class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report);

  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// Throws ValidationError when `validate_model` reports errors.
void require_valid(const ConceptualModel& model);

}  // namespace vera
