#include "vera/cmp/attributes.hpp"

#include <cmath>
#include <sstream>

namespace vera {

namespace {

struct FieldInfo {
  std::string_view name;
  std::string_view unit;
  double SpeciesAttributes::*member;
};

constexpr std::array<FieldInfo, kAttributeFieldCount> kFields = {{
    {"lifespan", "months", &SpeciesAttributes::lifespan},
    {"body_mass", "kg", &SpeciesAttributes::body_mass},
    {"carbon_biomass", "kg", &SpeciesAttributes::carbon_biomass},
    {"respiratory_rate", "kg/s", &SpeciesAttributes::respiratory_rate},
    {"photosynthesis_rate", "kg/s", &SpeciesAttributes::photosynthesis_rate},
    {"assimilation_efficiency", "fraction", &SpeciesAttributes::assimilation_efficiency},
    {"reproductive_maturity", "months", &SpeciesAttributes::reproductive_maturity},
    {"reproductive_interval", "months", &SpeciesAttributes::reproductive_interval},
    {"offspring_count", "count", &SpeciesAttributes::offspring_count},
}};

const FieldInfo& info(AttributeField field) { return kFields[static_cast<std::size_t>(field)]; }

std::string describe(AttributeField field, double value, std::string_view requirement) {
  std::ostringstream out;
  out << info(field).name << " = " << value << " " << info(field).unit << " must be "
      << requirement;
  return out.str();
}

}  // namespace

std::string_view field_name(AttributeField field) { return info(field).name; }

std::string_view canonical_unit(AttributeField field) { return info(field).unit; }

std::optional<AttributeField> parse_field_name(std::string_view name) {
  for (std::size_t i = 0; i < kFields.size(); ++i) {
    if (kFields[i].name == name) return static_cast<AttributeField>(i);
  }
  return std::nullopt;
}

double get_field(const SpeciesAttributes& attrs, AttributeField field) {
  return attrs.*(info(field).member);
}

void set_field(SpeciesAttributes& attrs, AttributeField field, double value) {
  attrs.*(info(field).member) = value;
}

std::optional<std::string> check_field_range(AttributeField field, double value) {
  if (!std::isfinite(value)) return describe(field, value, "finite");
  switch (field) {
    case AttributeField::Lifespan:
    case AttributeField::BodyMass:
    case AttributeField::CarbonBiomass:
    case AttributeField::ReproductiveInterval:
      if (!(value > 0.0)) return describe(field, value, "> 0");
      break;
    case AttributeField::RespiratoryRate:
    case AttributeField::PhotosynthesisRate:
    case AttributeField::ReproductiveMaturity:
    case AttributeField::OffspringCount:
      if (!(value >= 0.0)) return describe(field, value, ">= 0");
      break;
    case AttributeField::AssimilationEfficiency:
      if (!(value >= 0.0 && value <= 1.0)) return describe(field, value, "in [0.0, 1.0]");
      break;
  }
  return std::nullopt;
}

std::optional<CrossFieldViolation> check_maturity(const SpeciesAttributes& attrs) {
  if (attrs.reproductive_maturity < attrs.lifespan) return std::nullopt;
  std::ostringstream out;
  out << "reproductive_maturity (" << attrs.reproductive_maturity
      << " months) must be < lifespan (" << attrs.lifespan << " months)";
  return CrossFieldViolation{AttributeField::ReproductiveMaturity, out.str()};
}

std::optional<CrossFieldViolation> check_carbon_fraction(const SpeciesAttributes& attrs) {
  if (attrs.carbon_biomass <= attrs.body_mass) return std::nullopt;
  std::ostringstream out;
  out << "carbon_biomass (" << attrs.carbon_biomass << " kg) must be <= body_mass ("
      << attrs.body_mass << " kg)";
  return CrossFieldViolation{AttributeField::CarbonBiomass, out.str()};
}

}  // namespace vera
