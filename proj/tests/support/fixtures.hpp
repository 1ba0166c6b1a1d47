#pragma once

// Shared paths and scenario builders for unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>

#include "vera/cmp/codec.hpp"
#include "vera/compiler/program.hpp"
#include "vera/engine/engine.hpp"
#include "vera/traits/trait_store.hpp"

namespace vera::testing {

inline std::filesystem::path data_dir() { return VERA_DATA_DIR; }
inline std::filesystem::path model_path(const std::string& name) {
  return data_dir() / "models" / name;
}
inline ConceptualModel load_fixture(const std::string& name) {
  return load_model_file(model_path(name));
}
inline std::filesystem::path trait_fixture_path() { return data_dir() / "traits.json"; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    for (;;) {
      path_ = std::filesystem::temp_directory_path() /
              ("vera-test-" + std::to_string(rd()) + std::to_string(rd()));
      if (std::filesystem::create_directory(path_)) break;
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Attributes for the best store match of `query`, gaps filled with defaults.
inline SpeciesAttributes store_attributes(const TraitStore& store, const std::string& query,
                                          std::string* taxon_id = nullptr) {
  const auto hits = store.search_species(query);
  if (hits.empty()) throw std::runtime_error("no trait record for " + query);
  if (taxon_id) *taxon_id = hits.front().taxon_id;
  return resolve_attributes(store.fetch_attributes(hits.front().taxon_id));
}

inline Component& component(ConceptualModel& model, const std::string& id) {
  for (Component& c : model.components) {
    if (c.id == id) return c;
  }
  throw std::runtime_error("no component " + id);
}

/// Phase 3: the limited-grass model with sheep parameters from the trait store.
inline ConceptualModel build_phase3(const TraitStore& store) {
  ConceptualModel model = load_fixture("phase2_limited_grass.json");
  model.id = "phase3";
  model.name = "Sheep with trait-store parameters";
  Component& sheep = component(model, "sheep");
  std::string taxon;
  sheep.attributes = store_attributes(store, "Ovis aries", &taxon);
  sheep.taxon_id = taxon;
  return model;
}

/// Phase 4: phase 3 plus a wolf population with trait-store parameters.
inline ConceptualModel build_phase4(const TraitStore& store) {
  ConceptualModel model = build_phase3(store);
  model.id = "phase4";
  model.name = "Wolf, sheep and grass";
  Component wolf;
  wolf.id = "wolf";
  wolf.name = "Wolf";
  wolf.kind = ComponentKind::Biotic;
  wolf.category = Category::Predator;
  std::string taxon;
  wolf.attributes = store_attributes(store, "Canis lupus", &taxon);
  wolf.taxon_id = taxon;
  wolf.initial_population = 6;
  model.components.push_back(wolf);
  Interaction hunt;
  hunt.id = "wolf-eats-sheep";
  hunt.kind = InteractionKind::Consumes;
  hunt.source_id = "wolf";
  hunt.target_id = "sheep";
  hunt.params.encounter_half_saturation = 500.0;
  model.interactions.push_back(hunt);
  return model;
}

/// Runs step by step, recomputing the carbon identity independently of the
/// engine's own check. `max_residual` is relative to the largest quantity
/// involved in each step.
struct CheckedRun {
  RunResult result;
  double max_residual = 0.0;
  std::size_t steps = 0;
};

inline CheckedRun run_with_ledger_check(const SimProgram& program, std::uint64_t seed,
                                        std::uint32_t duration) {
  CheckedRun out;
  out.result = run(program, seed, duration);

  WorldState world = init_world(program, seed);
  auto carbon = [&] {
    long double sum = 0.0L;
    for (const PoolState& pool : world.pools) {
      sum += pool.amount;
      for (const Agent& a : pool.agents) sum += a.carbon;
    }
    for (double d : world.ledger.detritus_by_pool) sum += d;
    return sum;
  };
  for (std::uint32_t m = 0; m < duration; ++m) {
    const long double before = carbon();
    const CarbonLedger prev = world.ledger;
    step(world, program);
    const long double after = carbon();
    const long double fixed = world.ledger.fixed_total - prev.fixed_total;
    const long double imported = world.ledger.imported_total - prev.imported_total;
    const long double respired = world.ledger.respired_total - prev.respired_total;
    const long double egested = world.ledger.egested_total - prev.egested_total;
    const long double destroyed = world.ledger.destroyed_total - prev.destroyed_total;
    const long double residual =
        std::fabs((after - before) - (fixed + imported - respired - egested - destroyed));
    const long double scale = std::max({std::fabs(before), std::fabs(after), fixed, imported,
                                        respired, egested, destroyed, 1e-300L});
    out.max_residual = std::max(out.max_residual, static_cast<double>(residual / scale));
    ++out.steps;
  }
  return out;
}

}  // namespace vera::testing
