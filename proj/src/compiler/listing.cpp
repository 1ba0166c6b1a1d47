#include <charconv>
#include <cstdio>
#include <sstream>

#include "vera/compiler/program.hpp"

namespace vera {

std::string format_number(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buffer, end);
}

namespace {

std::string settings_text(const SimSettings& s) {
  std::ostringstream out;
  out << "duration=" << s.duration << " seed=" << s.seed << " agent_cap=" << s.agent_cap
      << " starvation_fraction=" << format_number(s.starvation_fraction)
      << " seconds_per_month=" << format_number(s.seconds_per_month);
  return out.str();
}

void write_population(std::ostream& out, const PopulationSchema& p) {
  out << "POPULATION " << p.component_id << " {kind=" << to_string(p.kind);
  if (p.is_biotic()) {
    const SpeciesAttributes& a = p.attributes;
    out << ", initial_count=" << p.initial_count << " count, scale=" << p.scale << " count"
        << ", monthly_respiration=" << format_number(p.monthly_respiration) << " kg/month"
        << ", monthly_photosynthesis=" << format_number(p.monthly_photosynthesis) << " kg/month"
        << ", carbon_biomass=" << format_number(a.carbon_biomass) << " kg"
        << ", body_mass=" << format_number(a.body_mass) << " kg"
        << ", assimilation_efficiency=" << format_number(a.assimilation_efficiency) << " fraction";
  } else {
    out << ", initial_amount=" << format_number(p.initial_amount) << " kg";
  }
  out << ", unlimited=" << (p.unlimited ? "true" : "false")
      << ", habitat=" << p.habitat_id.value_or("-") << "}";
  if (p.name != p.component_id) out << " name=\"" << p.name << "\"";
  out << "\n";
}

void write_rule(std::ostream& out, const SimProgram& program, const Rule& r,
                double starvation_fraction) {
  const PopulationSchema& src = program.populations[r.source];
  const PopulationSchema& dst = program.populations[r.target];
  out << to_string(r.kind) << " " << src.component_id << " -> " << dst.component_id << " {";
  const SpeciesAttributes& a = src.attributes;
  switch (r.kind) {
    case RuleKind::Metabolism:
      out << "respiration=" << format_number(src.monthly_respiration) << " kg/month"
          << ", photosynthesis=" << format_number(src.monthly_photosynthesis) << " kg/month";
      break;
    case RuleKind::Aging:
      out << "lifespan=" << format_number(a.lifespan) << " months"
          << ", starvation_threshold="
          << format_number(starvation_fraction * src.reference_carbon()) << " kg";
      break;
    case RuleKind::Reproduction:
      out << "maturity=" << format_number(a.reproductive_maturity) << " months"
          << ", interval=" << format_number(a.reproductive_interval) << " months"
          << ", offspring=" << format_number(a.offspring_count) << " count"
          << ", offspring_carbon=" << format_number(src.reference_carbon()) << " kg";
      break;
    case RuleKind::Consume:
      out << "half_saturation=" << format_number(r.half_saturation) << " count"
          << ", assimilation_efficiency=" << format_number(a.assimilation_efficiency)
          << " fraction";
      break;
    case RuleKind::Destroy:
      out << "half_saturation=" << format_number(r.half_saturation) << " count"
          << ", destroy_fraction=" << format_number(r.destroy_fraction) << " fraction";
      break;
    case RuleKind::Produce:
      out << "probability=" << format_number(r.produce_probability) << " fraction"
          << ", amount=" << format_number(r.produce_amount) << " kg";
      break;
    case RuleKind::Affect:
      out << "growth_modifier=" << format_number(r.growth_modifier) << " 1";
      break;
    case RuleKind::BecomeOnDeath:
      out << "carbon_share=1 fraction";
      break;
  }
  out << "}";
  if (r.origin) out << " origin=" << to_string(*r.origin) << " id=" << r.rule_id;
  if (!r.active) out << " inactive";
  if ((r.kind == RuleKind::Metabolism || r.kind == RuleKind::Aging ||
       r.kind == RuleKind::Reproduction) &&
      src.unlimited) {
    out << " static";
  }
  out << "\n";
}

std::string listing_body(const SimProgram& program) {
  std::ostringstream out;
  for (const PopulationSchema& p : program.populations) write_population(out, p);
  for (const Rule& r : program.rules) {
    write_rule(out, program, r, program.settings.starvation_fraction);
  }
  return out.str();
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

}  // namespace

std::string program_hash(const SimProgram& program) {
  return fnv1a_hex(settings_text(program.settings) + "\n" + listing_body(program));
}

std::string emit_listing(const SimProgram& program) {
  const std::string body = listing_body(program);
  const std::string settings = settings_text(program.settings);
  std::ostringstream out;
  out << "# program " << fnv1a_hex(settings + "\n" + body) << " model="
      << (program.source_model_id.empty() ? "-" : program.source_model_id) << " " << settings
      << "\n"
      << body;
  return out.str();
}

}  // namespace vera
