#include "vera/engine/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "vera/engine/rng.hpp"
#include "vera/error.hpp"

namespace vera {

namespace {

constexpr std::uint64_t kInitChannel = std::numeric_limits<std::uint64_t>::max();
constexpr double kLedgerTolerance = 1e-9;

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double represented(const PoolState& pool) {
  double n = 0.0;
  for (const Agent& a : pool.agents) n += static_cast<double>(a.scale);
  return n;
}

bool is_live(const PoolState& pool, const PopulationSchema& schema) {
  if (schema.is_biotic()) return !pool.agents.empty();
  return schema.unlimited || pool.amount > 0.0;
}

/// Density used by the type II encounter probability.
double density(const PoolState& pool, const PopulationSchema& schema) {
  return schema.is_biotic() ? represented(pool) : pool.amount;
}

void remove_agent(std::vector<Agent>& agents, std::size_t index) {
  agents[index] = agents.back();
  agents.pop_back();
}

class Stepper {
 public:
  Stepper(WorldState& world, const SimProgram& program)
      : world_(world),
        program_(program),
        multiplier_(program.populations.size(), 1.0) {}

  StepFlows run() {
    for (PoolState& pool : world_.pools) {
      std::sort(pool.agents.begin(), pool.agents.end(),
                [](const Agent& a, const Agent& b) { return a.id < b.id; });
    }
    for (std::size_t r = 0; r < program_.rules.size(); ++r) {
      const Rule& rule = program_.rules[r];
      if (!rule.active) continue;
      switch (rule.kind) {
        case RuleKind::Metabolism: metabolism(rule); break;
        case RuleKind::Affect: affect(rule); break;
        case RuleKind::Consume: consume(r, rule); break;
        case RuleKind::Destroy: destroy(r, rule); break;
        case RuleKind::Produce: produce(r, rule); break;
        case RuleKind::Aging: aging(rule); break;
        case RuleKind::BecomeOnDeath: break;  // applied by the aging rule
        case RuleKind::Reproduction: reproduction(r, rule); break;
      }
    }
    ++world_.month;
    CarbonLedger& ledger = world_.ledger;
    ledger.fixed_total += flows_.fixed;
    ledger.imported_total += flows_.imported;
    ledger.respired_total += flows_.respired;
    ledger.egested_total += flows_.egested;
    ledger.destroyed_total += flows_.destroyed;
    return flows_;
  }

 private:
  const PopulationSchema& schema(std::size_t index) const { return program_.populations[index]; }

  rng::SplitMix64 stream(std::size_t rule_index, std::uint64_t agent_id) const {
    return rng::stream({world_.seed, world_.month, rule_index, agent_id});
  }

  void metabolism(const Rule& rule) {
    const PopulationSchema& pop = schema(rule.source);
    if (pop.unlimited) return;
    for (Agent& a : world_.pools[rule.source].agents) {
      const double s = static_cast<double>(a.scale);
      const double gain = pop.monthly_photosynthesis * s;
      a.carbon += gain;
      flows_.fixed += gain;
      const double loss = std::min(pop.monthly_respiration * s, a.carbon);
      a.carbon -= loss;
      flows_.respired += loss;
    }
  }

  void affect(const Rule& rule) {
    if (!is_live(world_.pools[rule.source], schema(rule.source))) return;
    multiplier_[rule.target] = std::max(0.0, multiplier_[rule.target] * (1.0 + rule.growth_modifier));
  }

  // Carbon a consumer takes from a prey item when it cannot swallow it whole:
  // enough to cover this month's respiration and any shortfall below its
  // reference biomass, after assimilation losses.
  static double bite(const PopulationSchema& consumer, const Agent& agent) {
    const double s = static_cast<double>(agent.scale);
    const double deficit = consumer.monthly_respiration * s +
                           std::max(0.0, consumer.attributes.carbon_biomass * s - agent.carbon);
    const double e = consumer.attributes.assimilation_efficiency;
    return e > 0.0 ? deficit / e : deficit;
  }

  void consume(std::size_t rule_index, const Rule& rule) {
    const PopulationSchema& src = schema(rule.source);
    const PopulationSchema& dst = schema(rule.target);
    if (src.unlimited) return;  // static reservoirs do not feed
    PoolState& prey = world_.pools[rule.target];
    const double e = src.attributes.assimilation_efficiency;
    const bool whole = dst.is_biotic() && dst.attributes.carbon_biomass <= src.attributes.carbon_biomass;
    double n = density(prey, dst);

    for (Agent& consumer : world_.pools[rule.source].agents) {
      if (n <= 0.0) break;
      auto draws = stream(rule_index, consumer.id);
      if (!draws.bernoulli(n / (n + rule.half_saturation))) continue;

      double taken = 0.0;
      if (dst.is_biotic()) {
        const std::size_t victim = draws.below(prey.agents.size());
        Agent& item = prey.agents[victim];
        taken = whole ? item.carbon : std::min(item.carbon, bite(src, consumer));
        if (dst.unlimited) {
          flows_.imported += taken;
        } else if (whole) {
          n -= static_cast<double>(item.scale);
          remove_agent(prey.agents, victim);
        } else {
          item.carbon -= taken;
        }
      } else {
        taken = dst.unlimited ? bite(src, consumer) : std::min(prey.amount, bite(src, consumer));
        if (dst.unlimited) {
          flows_.imported += taken;
        } else {
          prey.amount -= taken;
          n = prey.amount;
        }
      }
      consumer.carbon += e * taken;
      flows_.egested += (1.0 - e) * taken;
    }
  }

  // One destroy attempt by an agent (or by an abiotic pool acting as a whole).
  void destroy_once(rng::SplitMix64& draws, const Rule& rule, const PopulationSchema& dst,
                    PoolState& victims, double& n) {
    if (n <= 0.0 || !draws.bernoulli(n / (n + rule.half_saturation))) return;
    double removed = 0.0;
    if (dst.is_biotic()) {
      const std::size_t victim = draws.below(victims.agents.size());
      Agent& item = victims.agents[victim];
      removed = rule.destroy_fraction * item.carbon;
      if (!dst.unlimited) {
        if (rule.destroy_fraction >= 1.0) {
          removed = item.carbon;
          n -= static_cast<double>(item.scale);
          remove_agent(victims.agents, victim);
        } else {
          item.carbon -= removed;
        }
      }
    } else {
      removed = rule.destroy_fraction * victims.amount;
      if (!dst.unlimited) {
        victims.amount -= removed;
        n = victims.amount;
      }
    }
    if (dst.unlimited) flows_.imported += removed;
    flows_.destroyed += removed;
  }

  void destroy(std::size_t rule_index, const Rule& rule) {
    const PopulationSchema& src = schema(rule.source);
    const PopulationSchema& dst = schema(rule.target);
    PoolState& victims = world_.pools[rule.target];
    double n = density(victims, dst);
    if (src.is_biotic()) {
      for (const Agent& attacker : world_.pools[rule.source].agents) {
        auto draws = stream(rule_index, attacker.id);
        destroy_once(draws, rule, dst, victims, n);
      }
    } else if (is_live(world_.pools[rule.source], src)) {
      auto draws = stream(rule_index, 0);
      destroy_once(draws, rule, dst, victims, n);
    }
  }

  void produce(std::size_t rule_index, const Rule& rule) {
    const PopulationSchema& src = schema(rule.source);
    PoolState& out = world_.pools[rule.target];
    const double mult = multiplier_[rule.target];
    if (src.is_biotic()) {
      for (Agent& a : world_.pools[rule.source].agents) {
        auto draws = stream(rule_index, a.id);
        if (!draws.bernoulli(rule.produce_probability)) continue;
        double amount = rule.produce_amount * static_cast<double>(a.scale) * mult;
        if (src.unlimited) {
          flows_.imported += amount;
        } else {
          amount = std::min(amount, a.carbon);
          a.carbon -= amount;
        }
        out.amount += amount;
      }
      return;
    }
    PoolState& in = world_.pools[rule.source];
    if (!is_live(in, src)) return;
    auto draws = stream(rule_index, 0);
    if (!draws.bernoulli(rule.produce_probability)) return;
    double amount = rule.produce_amount * mult;
    if (src.unlimited) {
      flows_.imported += amount;
    } else {
      amount = std::min(amount, in.amount);
      in.amount -= amount;
    }
    out.amount += amount;
  }

  void aging(const Rule& rule) {
    const PopulationSchema& pop = schema(rule.source);
    if (pop.unlimited) return;

    std::vector<std::size_t> sinks;
    for (const Rule& r : program_.rules) {
      if (r.kind == RuleKind::BecomeOnDeath && r.active && r.source == rule.source) {
        sinks.push_back(r.target);
      }
    }

    const double threshold = program_.settings.starvation_fraction * pop.attributes.carbon_biomass;
    std::vector<Agent>& agents = world_.pools[rule.source].agents;
    std::vector<Agent> survivors;
    survivors.reserve(agents.size());
    for (Agent& a : agents) {
      a.age += 1.0;
      a.months_since_reproduction += 1.0;
      const bool dies = a.age >= pop.attributes.lifespan ||
                        a.carbon < threshold * static_cast<double>(a.scale);
      if (!dies) {
        survivors.push_back(a);
        continue;
      }
      if (sinks.empty()) {
        world_.ledger.detritus_by_pool[rule.source] += a.carbon;
      } else {
        const double share = a.carbon / static_cast<double>(sinks.size());
        for (std::size_t sink : sinks) world_.pools[sink].amount += share;
      }
    }
    agents = std::move(survivors);
  }

  void reproduction(std::size_t rule_index, const Rule& rule) {
    const PopulationSchema& pop = schema(rule.source);
    if (pop.unlimited) return;
    const SpeciesAttributes& attrs = pop.attributes;
    const double expected = attrs.offspring_count * multiplier_[rule.source];
    const double whole_part = std::floor(expected);
    const double fraction = expected - whole_part;

    std::vector<Agent>& agents = world_.pools[rule.source].agents;
    std::vector<Agent> born;
    for (Agent& parent : agents) {
      if (parent.age < attrs.reproductive_maturity ||
          parent.months_since_reproduction < attrs.reproductive_interval) {
        continue;
      }
      auto draws = stream(rule_index, parent.id);
      const double k = whole_part + (draws.bernoulli(fraction) ? 1.0 : 0.0);
      const double child_carbon = attrs.carbon_biomass * static_cast<double>(parent.scale);
      const double surplus = parent.carbon - child_carbon;
      if (k <= 0.0 || surplus < child_carbon) continue;
      const auto children = static_cast<std::uint64_t>(std::min(k, std::floor(surplus / child_carbon)));
      for (std::uint64_t j = 0; j < children; ++j) {
        born.push_back(Agent{rng::derive_key({parent.id, world_.month, j}), 0.0, child_carbon, 0.0,
                             parent.scale});
      }
      parent.carbon -= child_carbon * static_cast<double>(children);
      parent.months_since_reproduction = 0.0;
    }
    agents.insert(agents.end(), born.begin(), born.end());
  }

  WorldState& world_;
  const SimProgram& program_;
  std::vector<double> multiplier_;
  StepFlows flows_;
};

void check_invariants(const WorldState& world, const SimProgram& program, double before,
                      const StepFlows& flows) {
  auto fail = [&](const std::string& what) {
    std::ostringstream out;
    out << "month " << world.month << ": " << what;
    throw EngineInvariantError(out.str());
  };
  for (std::size_t p = 0; p < world.pools.size(); ++p) {
    const PoolState& pool = world.pools[p];
    const PopulationSchema& pop = program.populations[p];
    if (!std::isfinite(pool.amount) || pool.amount < 0.0) fail(pop.component_id + " amount is negative");
    for (const Agent& a : pool.agents) {
      if (!std::isfinite(a.carbon) || a.carbon < 0.0) fail(pop.component_id + " agent carbon is negative");
      if (!pop.unlimited && a.age > pop.attributes.lifespan) fail(pop.component_id + " agent outlived its lifespan");
    }
  }
  const double after = total_carbon(world);
  const double residual = std::abs((after - before) - flows.net());
  const double magnitude = std::max({std::abs(before), std::abs(after), flows.fixed, flows.imported,
                                     flows.respired, flows.egested, flows.destroyed});
  if (residual > kLedgerTolerance * magnitude) {
    std::ostringstream msg;
    msg << "carbon identity violated (residual " << residual << " kg, scale " << magnitude << " kg)";
    fail(msg.str());
  }
}

}  // namespace

double CarbonLedger::detritus_total() const {
  CompensatedSum sum;
  for (double d : detritus_by_pool) sum.add(d);
  return sum.value();
}

double total_carbon(const WorldState& world) {
  CompensatedSum sum;
  for (const PoolState& pool : world.pools) {
    sum.add(pool.amount);
    for (const Agent& a : pool.agents) sum.add(a.carbon);
  }
  for (double d : world.ledger.detritus_by_pool) sum.add(d);
  return sum.value();
}

double pool_value(const WorldState& world, const SimProgram& program, std::size_t index) {
  return program.populations[index].is_biotic() ? represented(world.pools[index])
                                                : world.pools[index].amount;
}

WorldState init_world(const SimProgram& program, std::uint64_t seed) {
  WorldState world;
  world.seed = seed;
  world.pools.resize(program.populations.size());
  world.ledger.detritus_by_pool.assign(program.populations.size(), 0.0);
  for (std::size_t p = 0; p < program.populations.size(); ++p) {
    const PopulationSchema& pop = program.populations[p];
    PoolState& pool = world.pools[p];
    if (!pop.is_biotic()) {
      pool.amount = pop.initial_amount;
      continue;
    }
    const std::uint64_t agents = (pop.initial_count + pop.scale - 1) / pop.scale;
    pool.agents.reserve(agents);
    for (std::uint64_t i = 0; i < agents; ++i) {
      const std::uint64_t id = rng::derive_key({seed, p, i});
      auto draws = rng::stream({seed, 0, kInitChannel, id});
      Agent a;
      a.id = id;
      a.scale = pop.scale;
      a.carbon = pop.reference_carbon();
      a.age = draws.uniform() * pop.attributes.lifespan;
      a.months_since_reproduction = draws.uniform() * pop.attributes.reproductive_interval;
      pool.agents.push_back(a);
    }
  }
  return world;
}

StepFlows step(WorldState& world, const SimProgram& program) {
  if (world.pools.size() != program.populations.size()) {
    throw EngineInvariantError("world does not match program");
  }
  const double before = total_carbon(world);
  const StepFlows flows = Stepper(world, program).run();
  check_invariants(world, program, before, flows);
  std::uint64_t agents = 0;
  for (const PoolState& pool : world.pools) agents += pool.agents.size();
  const std::uint64_t limit = kAgentLimitFactor * program.settings.agent_cap;
  if (agents > limit) {
    throw AgentLimitError("month " + std::to_string(world.month) + ": " + std::to_string(agents) +
                          " agents exceed the limit of " + std::to_string(limit));
  }
  return flows;
}

RunResult run(const SimProgram& program, std::uint64_t seed, std::uint32_t duration) {
  if (duration == 0) throw Error("invalid-settings", "duration must be at least 1 month");
  RunResult result;
  result.seed = seed;
  result.settings = program.settings;
  result.settings.seed = seed;
  result.settings.duration = duration;
  result.program_hash = program_hash(program);

  WorldState world = init_world(program, seed);
  for (const PopulationSchema& pop : program.populations) {
    PopulationSeries s{pop.component_id, pop.name, pop.kind, {}};
    s.values.reserve(duration + 1);
    result.series.push_back(std::move(s));
  }
  auto record = [&] {
    for (std::size_t p = 0; p < program.populations.size(); ++p) {
      result.series[p].values.push_back(pool_value(world, program, p));
    }
  };
  record();
  for (std::uint32_t m = 0; m < duration; ++m) {
    step(world, program);
    record();
  }
  for (std::size_t p = 0; p < program.populations.size(); ++p) {
    result.final_state.push_back({program.populations[p].component_id,
                                  pool_value(world, program, p), world.pools[p].agents.size()});
  }
  result.ledger = world.ledger;
  return result;
}

RunResult run(const SimProgram& program) {
  return run(program, program.settings.seed, program.settings.duration);
}

std::vector<SeriesSummary> summarize_runs(std::span<const RunResult> runs) {
  std::vector<SeriesSummary> summary;
  if (runs.empty()) return summary;
  const RunResult& first = runs.front();
  for (std::size_t p = 0; p < first.series.size(); ++p) {
    SeriesSummary s{first.series[p].component_id, first.series[p].name, {}, {}, {}};
    const std::size_t months = first.series[p].values.size();
    std::vector<double> column(runs.size());
    for (std::size_t m = 0; m < months; ++m) {
      for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r].series[p].values.at(m);
      // Sorting first makes the sum independent of run order.
      std::sort(column.begin(), column.end());
      CompensatedSum sum;
      for (double v : column) sum.add(v);
      s.mean.push_back(sum.value() / static_cast<double>(column.size()));
      s.min.push_back(column.front());
      s.max.push_back(column.back());
    }
    summary.push_back(std::move(s));
  }
  return summary;
}

BatchResult batch_run(const SimProgram& program, std::span<const std::uint64_t> seeds,
                      std::uint32_t duration, unsigned threads) {
  if (seeds.empty()) throw Error("invalid-seeds", "batch needs at least one seed");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(seeds.size()));

  BatchResult batch;
  batch.runs.resize(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        batch.runs[i] = run(program, seeds[i], duration);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  batch.summary = summarize_runs(batch.runs);
  return batch;
}

}  // namespace vera
