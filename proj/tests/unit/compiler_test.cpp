#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/model_gen.hpp"
#include "vera/compiler/program.hpp"

namespace vera {
namespace {

using testing::load_fixture;

TEST(Compile, PopulationsFollowComponents) {
  const ConceptualModel m = load_fixture("wolf_sheep_grass.json");
  const SimProgram p = compile(m);
  ASSERT_EQ(p.populations.size(), m.components.size());
  for (std::size_t i = 0; i < m.components.size(); ++i) {
    EXPECT_EQ(p.populations[i].component_id, m.components[i].id);
  }
  EXPECT_EQ(p.source_model_id, "wolf-sheep-grass");
  EXPECT_EQ(p.interaction_rule_count(), m.interactions.size());
  // Metabolism, aging and reproduction per biotic population.
  EXPECT_EQ(p.rules.size(), m.interactions.size() + 3 * 3);
}

TEST(Compile, RulesInPhaseOrder) {
  const SimProgram p = compile(load_fixture("p10_model.json"));
  auto phase = [](RuleKind k) {
    switch (k) {
      case RuleKind::Metabolism: return 0;
      case RuleKind::Affect: return 1;
      case RuleKind::Consume:
      case RuleKind::Destroy: return 2;
      case RuleKind::Produce: return 3;
      case RuleKind::Aging: return 4;
      case RuleKind::BecomeOnDeath: return 5;
      case RuleKind::Reproduction: return 6;
    }
    return 7;
  };
  for (std::size_t r = 1; r < p.rules.size(); ++r) {
    EXPECT_LE(phase(p.rules[r - 1].kind), phase(p.rules[r].kind)) << r;
  }
}

TEST(Compile, ConvertsRatesToMonthly) {
  const SimProgram p = compile(load_fixture("wolf_sheep_grass.json"));
  const PopulationSchema& sheep = p.populations[1];
  EXPECT_DOUBLE_EQ(sheep.monthly_respiration, 1e-9 * 30 * 86400);
  EXPECT_NEAR(sheep.monthly_respiration, 2.592e-3, 1e-15);
  const PopulationSchema& grass = p.populations[0];
  EXPECT_DOUBLE_EQ(grass.monthly_photosynthesis, 4e-8 * 2'592'000.0);
}

TEST(Compile, AppliesParameterDefaults) {
  ConceptualModel m = load_fixture("wolf_sheep_grass.json");
  const SimProgram p = compile(m);
  for (const Rule& r : p.rules) {
    if (r.rule_id == "sheep-eats-grass") EXPECT_EQ(r.half_saturation, kDefaultHalfSaturation);
    if (r.rule_id == "wolf-eats-sheep") EXPECT_EQ(r.half_saturation, 500.0);
  }
}

TEST(Compile, SuperIndividualsAboveCap) {
  SimSettings s;
  s.agent_cap = 300;
  const SimProgram p = compile(load_fixture("wolf_sheep_grass.json"), s);
  EXPECT_EQ(p.populations[0].scale, 4u);  // 1000 grass / 300
  EXPECT_EQ(p.populations[1].scale, 1u);
}

TEST(Compile, HabitatMismatchDeactivatesRule) {
  ConceptualModel m = load_fixture("wolf_sheep_grass.json");
  m.habitats = {{"north", "North"}, {"south", "South"}};
  testing::component(m, "wolf").habitat_id = "north";
  testing::component(m, "sheep").habitat_id = "south";
  const SimProgram p = compile(m);
  for (const Rule& r : p.rules) {
    if (r.rule_id == "wolf-eats-sheep") EXPECT_FALSE(r.active);
    if (r.rule_id == "sheep-eats-grass") EXPECT_TRUE(r.active);  // grass has no habitat
  }
}

TEST(Compile, BecomesOnDeathIntoBioticIsCompileError) {
  ConceptualModel m = load_fixture("wolf_sheep_grass.json");
  Interaction i;
  i.id = "wolf-becomes-grass";
  i.kind = InteractionKind::BecomesOnDeath;
  i.source_id = "wolf";
  i.target_id = "grass";
  m.interactions.push_back(i);
  try {
    compile(m);
    FAIL() << "expected CompileError";
  } catch (const CompileError& e) {
    EXPECT_EQ(e.code(), "becomes-target-not-abiotic");
  }
}

TEST(Compile, InvalidModelAndSettings) {
  EXPECT_THROW(compile(load_fixture("bad_model.json")), ValidationError);
  SimSettings s;
  s.duration = 0;
  EXPECT_THROW(compile(load_fixture("p4_model.json"), s), Error);
  s = {};
  s.starvation_fraction = 1.0;
  EXPECT_THROW(compile(load_fixture("p4_model.json"), s), Error);
}

TEST(Compile, DeterministicAndPure) {
  const ConceptualModel m = load_fixture("p14_model.json");
  const ConceptualModel copy = m;
  EXPECT_EQ(compile(m), compile(m));
  EXPECT_EQ(m, copy);
}

TEST(Compile, GeneratedCorpusCompiles) {
  testing::ModelGenerator gen(99);
  for (int n = 0; n < 500; ++n) {
    const ConceptualModel m = gen.next();
    SimProgram p;
    ASSERT_NO_THROW(p = compile(m)) << encode_model(m);
    EXPECT_EQ(p.interaction_rule_count(), m.interactions.size());
  }
}

TEST(Listing, StableAndHashed) {
  const SimProgram p = compile(load_fixture("wolf_sheep_grass.json"));
  const std::string listing = emit_listing(p);
  EXPECT_EQ(listing, emit_listing(compile(load_fixture("wolf_sheep_grass.json"))));
  const std::string hash = program_hash(p);
  EXPECT_EQ(hash.size(), 16u);
  EXPECT_NE(listing.find(hash), std::string::npos);
  EXPECT_NE(listing.find("CONSUME sheep -> grass"), std::string::npos);
  EXPECT_NE(listing.find("kg/month"), std::string::npos);
}

TEST(Listing, HashTracksSettingsAndParameters) {
  const ConceptualModel m = load_fixture("wolf_sheep_grass.json");
  const std::string base = program_hash(compile(m));
  SimSettings s;
  s.seed = 5;
  EXPECT_NE(program_hash(compile(m, s)), base);
  ConceptualModel changed = m;
  changed.interactions[0].params.encounter_half_saturation = 42.0;
  EXPECT_NE(program_hash(compile(changed)), base);
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(2.592e-3), "0.002592");
  EXPECT_EQ(format_number(20.0), "20");
  for (double v : {1.0 / 3.0, 1e-300, 123456.789, -0.0}) {
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
}

}  // namespace
}  // namespace vera
