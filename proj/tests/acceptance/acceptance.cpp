// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "support/fixtures.hpp"
#include "support/model_gen.hpp"
#include "vera/cmp/metrics.hpp"
#include "vera/io/series_io.hpp"
#include "vera/service/server.hpp"

namespace {

using namespace vera;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kSeeds = 100;

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream out;
  out.precision(precision);
  out << v;
  return out.str();
}

std::size_t index_of(const SimProgram& p, const std::string& id) {
  for (std::size_t i = 0; i < p.populations.size(); ++i) {
    if (p.populations[i].component_id == id) return i;
  }
  throw std::runtime_error("no population " + id);
}

struct Scenario {
  SimProgram program;
  std::vector<RunResult> runs;  // runs[s] used seed s + 1
  double seconds = 0.0;

  double at(std::size_t seed_index, const std::string& id, std::uint32_t month) const {
    return runs[seed_index].series[index_of(program, id)].values.at(month);
  }
};

Scenario simulate(const ConceptualModel& model, std::uint32_t months) {
  Scenario s;
  s.program = compile(model);
  const auto start = Clock::now();
  for (int seed = 1; seed <= kSeeds; ++seed) {
    s.runs.push_back(run(s.program, static_cast<std::uint64_t>(seed), months));
  }
  s.seconds = seconds_since(start);
  return s;
}

// Worst per-step residual over every scenario run, recomputed independently.
double ledger_worst = 0.0;
std::size_t ledger_steps = 0;

void check_ledger(const Scenario& s, std::uint32_t months) {
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const auto checked =
        testing::run_with_ledger_check(s.program, static_cast<std::uint64_t>(seed), months);
    ledger_worst = std::max(ledger_worst, checked.max_residual);
    ledger_steps += checked.steps;
  }
}

void metrics() {
  const auto start = Clock::now();
  const std::size_t c12 = complexity_score(testing::load_fixture("p10_model.json"));
  const std::size_t c3 = complexity_score(testing::load_fixture("p4_model.json"));
  const std::size_t k5 = creativity_score(testing::load_fixture("p14_model.json"));
  const std::size_t k2 = creativity_score(testing::load_fixture("p1_model.json"));
  const double t = seconds_since(start);
  report("metric-exactness", c12 == 12 && c3 == 3 && k5 == 5 && k2 == 2 && t < 1.0,
         "complexity " + std::to_string(c12) + "/12, " + std::to_string(c3) + "/3; creativity " +
             std::to_string(k5) + "/5, " + std::to_string(k2) + "/2; " + fmt(t) + " s");
}

void phase1a() {
  const Scenario s = simulate(testing::load_fixture("phase1a_sheep_alone.json"), 40);
  int extinct = 0;
  for (int i = 0; i < kSeeds; ++i) extinct += s.at(i, "sheep", 40) == 0.0;
  report("phase1a-sheep-alone", extinct >= 95 && s.seconds < 10.0,
         std::to_string(extinct) + "/100 extinct by month 40; " + fmt(s.seconds) + " s");
  check_ledger(s, 40);
}

void phase1b() {
  const Scenario s = simulate(testing::load_fixture("phase1b_unlimited_grass.json"), 60);
  const double initial = s.at(0, "sheep", 0);
  int grown = 0;
  for (int i = 0; i < kSeeds; ++i) grown += s.at(i, "sheep", 60) >= 5.0 * initial;
  report("phase1b-unlimited-grass", grown >= 90 && s.seconds < 30.0,
         std::to_string(grown) + "/100 runs with sheep >= 5x initial at month 60; " +
             fmt(s.seconds) + " s");
  check_ledger(s, 60);
}

void phase2() {
  const Scenario limited = simulate(testing::load_fixture("phase2_limited_grass.json"), 60);
  const double grass0 = limited.at(0, "grass", 0), sheep0 = limited.at(0, "sheep", 0);
  int declined = 0;
  for (int i = 0; i < kSeeds; ++i) {
    declined += limited.at(i, "grass", 60) < grass0 && limited.at(i, "sheep", 60) < sheep0;
  }
  report("phase2-limited-grass", declined >= 80,
         std::to_string(declined) + "/100 runs with both populations below initial at month 60");
  check_ledger(limited, 60);

  const Scenario sunny = simulate(testing::load_fixture("phase2b_sunlight.json"), 24);
  int greener = 0;
  for (int i = 0; i < kSeeds; ++i) greener += sunny.at(i, "grass", 24) > limited.at(i, "grass", 24);
  report("phase2b-sunlight", greener >= 90,
         std::to_string(greener) + "/100 seed pairs with more grass at month 24 under sunlight");
  check_ledger(sunny, 24);
}

void phase4(const TraitStore& traits) {
  const Scenario without = simulate(testing::build_phase3(traits), 60);
  const Scenario with = simulate(testing::build_phase4(traits), 60);
  int fewer = 0, surviving = 0;
  for (int i = 0; i < kSeeds; ++i) {
    fewer += with.at(i, "sheep", 60) < without.at(i, "sheep", 60);
    surviving += with.at(i, "sheep", 60) > 0.0;
  }
  report("phase4-wolf", fewer >= 90 && surviving >= 50,
         std::to_string(fewer) + "/100 pairs with fewer sheep at month 60; sheep alive in " +
             std::to_string(surviving) + "/100");
  check_ledger(without, 60);
  check_ledger(with, 60);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct RunningServer {
  explicit RunningServer(const std::filesystem::path& store_dir) {
    service::ServiceConfig config;
    config.listen = "127.0.0.1:0";
    config.store_dir = store_dir;
    config.trait_fixture = testing::trait_fixture_path();
    server = std::make_unique<service::Server>(config);
    thread = std::thread([this] { server->serve(); });
    client = std::make_unique<httplib::Client>("127.0.0.1", server->port());
    for (int i = 0; i < 200 && !client->Get("/health"); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  ~RunningServer() {
    server->stop();
    thread.join();
  }

  std::unique_ptr<service::Server> server;
  std::thread thread;
  std::unique_ptr<httplib::Client> client;
};

void determinism() {
  testing::GenOptions options;
  options.max_initial_population = 40;
  testing::ModelGenerator gen(20240601, options);
  std::mt19937_64 seeds(77);
  int identical = 0, pairs = 0;
  std::vector<std::pair<ConceptualModel, std::uint64_t>> cases;
  while (pairs < 20) {
    ConceptualModel m = gen.next();
    const std::uint64_t seed = seeds() % 100000;
    std::string a, b;
    try {
      const SimProgram p = compile(m);
      a = series_csv(run(p, seed, 36));
      b = series_csv(run(compile(m), seed, 36));
    } catch (const AgentLimitError&) {
      continue;  // runaway growth; draw another model
    }
    ++pairs;
    identical += a == b;
    cases.emplace_back(std::move(m), seed);
  }

  // CLI versus service for the same documents and seeds.
  testing::TempDir dir;
  int matching = 0, compared = 0;
  {
    RunningServer service(dir.path() / "store");
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto& [model, seed] = cases[i];
      const auto path = dir.path() / ("model-" + std::to_string(i) + ".json");
      std::ofstream(path) << encode_model(model);
      const auto csv = dir.path() / ("cli-" + std::to_string(i) + ".csv");
      const std::string cmd = std::string("'") + VERA_CLI_PATH + "' run '" + path.string() +
                              "' --seed " + std::to_string(seed) + " --months 36 --out '" +
                              csv.string() + "' >/dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      auto created = service.client->Post("/models", encode_model(model), "application/json");
      if (!created || created->status != 201) continue;
      const std::string id = json::parse(created->body)["id"];
      auto sim = service.client->Post(
          "/models/" + id + "/simulate",
          json{{"seed", seed}, {"months", 36}}.dump(), "application/json");
      if (!sim || sim->status != 200) continue;
      const std::string run_id = json::parse(sim->body)["run_id"];
      auto served = service.client->Get("/runs/" + run_id + "/series.csv");
      ++compared;
      if (served && served->status == 200 && WIFEXITED(status) && WEXITSTATUS(status) == 0 &&
          served->body == slurp(csv)) {
        ++matching;
      }
    }
  }
  report("determinism", identical == 20 && compared == 20 && matching == 20,
         std::to_string(identical) + "/20 byte-identical repeat runs; CLI and service CSVs match in " +
             std::to_string(matching) + "/20");
}

void compiler_totality() {
  testing::ModelGenerator gen(500500);
  int compiled = 0, bijective = 0;
  for (int n = 0; n < 500; ++n) {
    const ConceptualModel m = gen.next();
    try {
      const SimProgram p = compile(m);
      ++compiled;
      bijective += p.interaction_rule_count() == m.interactions.size();
    } catch (const Error&) {
    }
  }
  // Independent arithmetic: 30 days of 86400 s.
  const double expected = 1.0e-9 * 30.0 * 86400.0;
  SimSettings settings;
  ConceptualModel probe = testing::load_fixture("phase1a_sheep_alone.json");
  testing::component(probe, "sheep").attributes->respiratory_rate = 1.0e-9;
  const double converted = compile(probe, settings).populations[0].monthly_respiration;
  const bool units = std::fabs(converted - expected) <= 1e-15 && std::fabs(expected - 2.592e-3) <= 1e-15;
  report("compiler-totality", compiled == 500 && bijective == 500 && units,
         std::to_string(compiled) + "/500 compiled, " + std::to_string(bijective) +
             "/500 with one rule per interaction; 1e-9 kg/s -> " + format_number(converted) +
             " kg/month");
}

void trait_store(const LocalTraitStore& traits) {
  const auto hits = traits.search_species("pika");
  const bool pika = !hits.empty() && hits[0].common_names.size() > 0 &&
                    hits[0].common_names[0] == "American pika" &&
                    hits[0].attribute_record_count == 138;

  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int idempotent = 0;
  for (int n = 0; n < 1000; ++n) {
    AttributeBundle b("random");
    for (AttributeField f : kAllAttributeFields) {
      if (u(rng) < 0.5) continue;
      switch (f) {
        case AttributeField::AssimilationEfficiency: b.set(f, u(rng)); break;
        case AttributeField::RespiratoryRate:
        case AttributeField::PhotosynthesisRate: b.set(f, u(rng) * 1e-8); break;
        case AttributeField::OffspringCount: b.set(f, u(rng) * 8.0); break;
        case AttributeField::Lifespan: b.set(f, 1.0 + u(rng) * 200.0); break;
        case AttributeField::ReproductiveMaturity: b.set(f, u(rng) * 0.9 * 24.0); break;
        case AttributeField::BodyMass: b.set(f, 0.01 + u(rng) * 50.0); break;
        case AttributeField::CarbonBiomass: b.set(f, 0.001 + u(rng) * 0.19); break;
        case AttributeField::ReproductiveInterval: b.set(f, 0.5 + u(rng) * 24.0); break;
      }
    }
    // Keep stored values mutually consistent so every bundle is fillable.
    if (b.has(AttributeField::Lifespan) && b.has(AttributeField::ReproductiveMaturity) &&
        *b.get(AttributeField::ReproductiveMaturity) >= *b.get(AttributeField::Lifespan)) {
      b.set(AttributeField::ReproductiveMaturity, 0.5 * *b.get(AttributeField::Lifespan));
    }
    if (b.has(AttributeField::BodyMass) && b.has(AttributeField::CarbonBiomass) &&
        *b.get(AttributeField::CarbonBiomass) > *b.get(AttributeField::BodyMass)) {
      b.set(AttributeField::CarbonBiomass, 0.2 * *b.get(AttributeField::BodyMass));
    }
    try {
      const AttributeBundle once = fill_defaults(b);
      idempotent += once.complete() && fill_defaults(once) == once;
    } catch (const Error&) {
    }
  }
  report("trait-store", pika && idempotent == 1000,
         std::string("pika -> ") + (hits.empty() ? "none" : hits[0].taxon_id) + " with " +
             (hits.empty() ? "0" : std::to_string(hits[0].attribute_record_count)) +
             " records; fill_defaults idempotent on " + std::to_string(idempotent) + "/1000");
}

void service_durability() {
  testing::TempDir dir;
  const std::string doc = encode_model(testing::load_fixture("wolf_sheep_grass.json"));
  std::string id;
  json created_model;
  bool round_trip = false, conflict = false, deterministic = false;
  {
    RunningServer service(dir.path());
    auto r = service.client->Post("/models", doc, "application/json");
    if (r && r->status == 201) {
      const json body = json::parse(r->body);
      id = body["id"];
      created_model = body["model"];
    }
  }
  {
    RunningServer service(dir.path());
    auto r = service.client->Get("/models/" + id);
    round_trip = !id.empty() && r && r->status == 200 &&
                 json::parse(r->body)["model"] == created_model;

    const json edit = {{"revision", 1}, {"model", created_model}};
    auto first = service.client->Put("/models/" + id, edit.dump(), "application/json");
    auto stale = service.client->Put("/models/" + id, edit.dump(), "application/json");
    conflict = first && first->status == 200 && stale && stale->status == 409 &&
               json::parse(stale->body)["code"] == "stale-revision";

    const std::string sim = json{{"seed", 31}, {"months", 24}}.dump();
    auto a = service.client->Post("/models/" + id + "/simulate", sim, "application/json");
    auto b = service.client->Post("/models/" + id + "/simulate", sim, "application/json");
    if (a && b && a->status == 200 && b->status == 200) {
      const json ja = json::parse(a->body), jb = json::parse(b->body);
      auto ca = service.client->Get("/runs/" + ja["run_id"].get<std::string>() + "/series.csv");
      auto cb = service.client->Get("/runs/" + jb["run_id"].get<std::string>() + "/series.csv");
      deterministic = ja["result"] == jb["result"] && ca && cb && ca->body == cb->body &&
                      !ca->body.empty();
    }
  }
  report("service-durability", round_trip && conflict && deterministic,
         std::string("restart round-trip ") + (round_trip ? "ok" : "broken") + "; stale revision " +
             (conflict ? "409" : "not rejected") + "; simulate " +
             (deterministic ? "deterministic" : "not deterministic"));
}

}  // namespace

int main() {
  const auto start = Clock::now();
  const LocalTraitStore traits(load_trait_fixture(testing::trait_fixture_path()));
  const std::vector<std::pair<const char*, std::function<void()>>> checks = {
      {"metric-exactness", metrics},
      {"phase1a-sheep-alone", phase1a},
      {"phase1b-unlimited-grass", phase1b},
      {"phase2-limited-grass", phase2},
      {"phase4-wolf", [&] { phase4(traits); }},
      {"determinism", determinism},
      {"compiler-totality", compiler_totality},
      {"trait-store", [&] { trait_store(traits); }},
      {"service-durability", service_durability},
  };
  for (const auto& [name, check] : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      report(name, false, std::string("threw: ") + e.what());
    }
  }
  report("carbon-ledger", ledger_steps > 0 && ledger_worst <= 1e-9,
         "worst relative residual " + fmt(ledger_worst) + " over " + std::to_string(ledger_steps) +
             " steps of every phase run");
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << " in " << fmt(seconds_since(start)) << " s" << std::endl;
  return failures == 0 ? 0 : 1;
}
