#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vera/compiler/program.hpp"

namespace vera {

/// A step that leaves more than kAgentLimitFactor * agent_cap agents alive
/// across all pools aborts the run with AgentLimitError. Scales are fixed at
/// compile time, so an unchecked exponential population would otherwise
/// exhaust memory.
inline constexpr std::uint64_t kAgentLimitFactor = 100;

struct Agent {
  std::uint64_t id = 0;  // stable identity; keys the agent's random streams
  double age = 0.0;      // months
  double carbon = 0.0;   // kg, covers all `scale` individuals
  double months_since_reproduction = 0.0;
  std::uint64_t scale = 1;

  friend bool operator==(const Agent&, const Agent&) = default;
};

/// Live state of one population: agents for biotic pools, an amount for
/// abiotic ones.
struct PoolState {
  std::vector<Agent> agents;
  double amount = 0.0;  // kg, abiotic only

  friend bool operator==(const PoolState&, const PoolState&) = default;
};

/// Cumulative carbon bookkeeping. Unlimited pools are never drawn down, so
/// carbon taken from them enters the system through `imported_total`.
struct CarbonLedger {
  double fixed_total = 0.0;      // photosynthesis
  double imported_total = 0.0;   // drawn from unlimited pools
  double respired_total = 0.0;
  double egested_total = 0.0;    // unassimilated consumption
  double destroyed_total = 0.0;  // removed by Destroy, no transfer
  std::vector<double> detritus_by_pool;

  double detritus_total() const;

  friend bool operator==(const CarbonLedger&, const CarbonLedger&) = default;
};

/// Carbon flows of a single step.
struct StepFlows {
  double fixed = 0.0;
  double imported = 0.0;
  double respired = 0.0;
  double egested = 0.0;
  double destroyed = 0.0;

  double net() const { return fixed + imported - respired - egested - destroyed; }
};

struct WorldState {
  std::uint32_t month = 0;
  std::uint64_t seed = 0;  // with `month`, the whole PRNG state
  std::vector<PoolState> pools;  // parallel to SimProgram::populations
  CarbonLedger ledger;

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

/// Agent carbon + abiotic amounts + detritus, summed with compensation.
double total_carbon(const WorldState& world);

/// Represented individuals (biotic) or kg (abiotic) for pool `index`.
double pool_value(const WorldState& world, const SimProgram& program, std::size_t index);

/// Builds month 0. Each biotic pool gets ceil(initial_count / scale) agents
/// carrying carbon_biomass * scale, with ages uniform in [0, lifespan) and
/// reproduction counters uniform in [0, interval).
WorldState init_world(const SimProgram& program, std::uint64_t seed);

/// Advances `world` by one month through the fixed phase order:
/// metabolism, affect, consume/destroy, produce, aging and mortality,
/// reproduction. Checks the carbon identity and non-negativity afterwards
/// and throws EngineInvariantError if either fails, or AgentLimitError when
/// the agent budget is exceeded.
StepFlows step(WorldState& world, const SimProgram& program);

struct PopulationSeries {
  std::string component_id;
  std::string name;
  ComponentKind kind = ComponentKind::Biotic;
  std::vector<double> values;  // index = month

  friend bool operator==(const PopulationSeries&, const PopulationSeries&) = default;
};

struct PoolSummary {
  std::string component_id;
  double final_value = 0.0;
  std::size_t agent_count = 0;

  friend bool operator==(const PoolSummary&, const PoolSummary&) = default;
};

struct RunResult {
  std::vector<PopulationSeries> series;  // each of length duration + 1
  std::vector<PoolSummary> final_state;
  CarbonLedger ledger;
  SimSettings settings;  // as run: duration and seed reflect this run
  std::uint64_t seed = 0;
  std::string program_hash;

  std::uint32_t duration() const { return settings.duration; }

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// init_world + `duration` steps, recording every month including 0.
RunResult run(const SimProgram& program, std::uint64_t seed, std::uint32_t duration);
/// Uses the program's own seed and duration.
RunResult run(const SimProgram& program);

struct SeriesSummary {
  std::string component_id;
  std::string name;
  std::vector<double> mean;
  std::vector<double> min;
  std::vector<double> max;

  friend bool operator==(const SeriesSummary&, const SeriesSummary&) = default;
};

struct BatchResult {
  std::vector<RunResult> runs;  // runs[i] used seeds[i]
  std::vector<SeriesSummary> summary;
};

/// Pointwise mean/min/max per population and month. The result does not
/// depend on the order of `runs`.
std::vector<SeriesSummary> summarize_runs(std::span<const RunResult> runs);

/// Runs every seed, in parallel when `threads` > 1 (0 = hardware concurrency).
/// Throws Error("invalid-seeds") for an empty seed list.
BatchResult batch_run(const SimProgram& program, std::span<const std::uint64_t> seeds,
                      std::uint32_t duration, unsigned threads = 0);

}  // namespace vera
