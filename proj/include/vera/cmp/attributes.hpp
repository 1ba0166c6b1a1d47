#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace vera {

/// Per-species parameters driving the simulation. Units are fixed by field:
/// months, kg, kg/s, fraction, count.
struct SpeciesAttributes {
  double lifespan = 0.0;                 // months, > 0
  double body_mass = 0.0;                // kg, > 0
  double carbon_biomass = 0.0;           // kg, > 0, <= body_mass
  double respiratory_rate = 0.0;         // kg/s, >= 0
  double photosynthesis_rate = 0.0;      // kg/s, >= 0
  double assimilation_efficiency = 0.0;  // [0, 1]
  double reproductive_maturity = 0.0;    // months, >= 0, < lifespan
  double reproductive_interval = 0.0;    // months, > 0
  double offspring_count = 0.0;          // count, >= 0

  friend bool operator==(const SpeciesAttributes&, const SpeciesAttributes&) = default;
};

enum class AttributeField : std::size_t {
  Lifespan,
  BodyMass,
  CarbonBiomass,
  RespiratoryRate,
  PhotosynthesisRate,
  AssimilationEfficiency,
  ReproductiveMaturity,
  ReproductiveInterval,
  OffspringCount,
};

inline constexpr std::size_t kAttributeFieldCount = 9;

inline constexpr std::array<AttributeField, kAttributeFieldCount> kAllAttributeFields = {
    AttributeField::Lifespan,           AttributeField::BodyMass,
    AttributeField::CarbonBiomass,      AttributeField::RespiratoryRate,
    AttributeField::PhotosynthesisRate, AttributeField::AssimilationEfficiency,
    AttributeField::ReproductiveMaturity, AttributeField::ReproductiveInterval,
    AttributeField::OffspringCount,
};

/// Serialized field name, e.g. "carbon_biomass".
std::string_view field_name(AttributeField field);
/// Canonical unit label, e.g. "kg/s".
std::string_view canonical_unit(AttributeField field);
std::optional<AttributeField> parse_field_name(std::string_view name);

double get_field(const SpeciesAttributes& attrs, AttributeField field);
void set_field(SpeciesAttributes& attrs, AttributeField field, double value);

/// Single-field range check; returns a message describing the violation.
std::optional<std::string> check_field_range(AttributeField field, double value);

/// Cross-field checks (maturity < lifespan, carbon_biomass <= body_mass).
struct CrossFieldViolation {
  AttributeField field;
  std::string message;
};
std::optional<CrossFieldViolation> check_maturity(const SpeciesAttributes& attrs);
std::optional<CrossFieldViolation> check_carbon_fraction(const SpeciesAttributes& attrs);

}  // namespace vera
