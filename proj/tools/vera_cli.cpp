// vera: headless front end for model validation, scoring, compilation,
// simulation runs and the HTTP service.
//
// Exit codes: 0 success, 1 invalid input or model, 2 internal error.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vera/cmp/codec.hpp"
#include "vera/cmp/metrics.hpp"
#include "vera/cmp/validate.hpp"
#include "vera/compiler/program.hpp"
#include "vera/engine/engine.hpp"
#include "vera/io/series_io.hpp"
#include "vera/service/server.hpp"
#include "vera/traits/remote.hpp"
#include "vera/traits/trait_store.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitInternal = 2;

/// Error caused by the command line or its inputs.
struct UsageError : vera::Error {
  explicit UsageError(const std::string& message) : vera::Error("usage", message) {}
};

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  auto number = [&](const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw UsageError("bad seed '" + s + "' in '" + text + "'");
    }
    try {
      return static_cast<std::uint64_t>(std::stoull(s));
    } catch (const std::out_of_range&) {
      throw UsageError("seed '" + s + "' does not fit in 64 bits");
    }
  };
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(number(part));
      continue;
    }
    const std::uint64_t lo = number(part.substr(0, dots));
    const std::uint64_t hi = number(part.substr(dots + 2));
    if (hi < lo) throw UsageError("empty seed range '" + part + "'");
    if (hi - lo >= 1'000'000) throw UsageError("seed range '" + part + "' is too large");
    for (std::uint64_t s = lo;; ++s) {
      seeds.push_back(s);
      if (s == hi) break;
    }
  }
  if (seeds.empty()) throw UsageError("no seeds given");
  return seeds;
}

void write_output(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
    return;
  }
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  vera::write_file_atomic(target, contents);
}

std::optional<fs::path> default_trait_fixture() {
  if (const char* env = std::getenv("VERA_TRAIT_FIXTURE"); env && *env) return fs::path(env);
#ifdef VERA_DATA_DIR
  const fs::path bundled = fs::path(VERA_DATA_DIR) / "traits.json";
  if (fs::exists(bundled)) return bundled;
#endif
  return std::nullopt;
}

std::string issue_line(const vera::ValidationIssue& issue) {
  std::string line = issue.severity == vera::Severity::Error ? "error " : "warning ";
  line += issue.code;
  if (issue.subject_id) line += " [" + *issue.subject_id + "]";
  return line + ": " + issue.message;
}

struct SimOptions {
  std::uint64_t seed = 0;
  std::uint32_t months = 60;
  std::uint64_t agent_cap = 10'000;
  double starvation_fraction = 0.25;

  vera::SimSettings settings() const {
    vera::SimSettings s;
    s.seed = seed;
    s.duration = months;
    s.agent_cap = agent_cap;
    s.starvation_fraction = starvation_fraction;
    return s;
  }
};

void add_sim_options(CLI::App* cmd, SimOptions& o, bool with_seed) {
  if (with_seed) cmd->add_option("--seed", o.seed, "PRNG seed")->capture_default_str();
  cmd->add_option("--months", o.months, "Simulated months")
      ->check(CLI::Range(1u, 100'000u))
      ->capture_default_str();
  cmd->add_option("--agent-cap", o.agent_cap, "Agents per population before super-individuals")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--starvation-fraction", o.starvation_fraction,
                  "Death threshold as a fraction of reference carbon")
      ->capture_default_str();
}

int cmd_validate(const std::string& path, bool as_json) {
  const vera::ConceptualModel model = vera::load_model_file(path);
  const vera::ValidationReport report = vera::validate_model(model);
  if (as_json) {
    std::cout << vera::report_to_json(report).dump(2) << "\n";
  } else {
    for (const auto& issue : report.issues) std::cerr << issue_line(issue) << "\n";
    std::cout << (report.valid ? "valid" : "invalid") << " (" << report.error_count()
              << " errors, " << report.warning_count() << " warnings)\n";
  }
  return report.valid ? kExitOk : kExitInvalid;
}

int cmd_score(const std::string& path, bool as_json) {
  const vera::ModelScores scores = vera::score_model(vera::load_model_file(path));
  if (as_json) {
    std::cout << nlohmann::json{{"complexity", scores.complexity},
                                {"creativity", scores.creativity}}
                     .dump()
              << "\n";
  } else {
    std::cout << "complexity " << scores.complexity << "\ncreativity " << scores.creativity
              << "\n";
  }
  return kExitOk;
}

int cmd_compile(const std::string& path, const SimOptions& o) {
  std::cout << vera::emit_listing(vera::compile(vera::load_model_file(path), o.settings()));
  return kExitOk;
}

int cmd_run(const std::string& path, const SimOptions& o, const std::string& out,
            const std::string& svg) {
  const vera::SimProgram program = vera::compile(vera::load_model_file(path), o.settings());
  const vera::RunResult result = vera::run(program);
  write_output(out, vera::series_csv(result));
  if (!out.empty() && out != "-") {
    write_output(out + ".meta.json", vera::run_metadata(result).dump(2) + "\n");
  }
  if (!svg.empty()) {
    write_output(svg, vera::series_svg(result, program.source_model_id + " seed " +
                                                   std::to_string(result.seed)));
  }
  return kExitOk;
}

int cmd_batch(const std::string& path, const SimOptions& o, const std::string& seeds_text,
              const std::string& out_dir, unsigned threads) {
  const std::vector<std::uint64_t> seeds = parse_seeds(seeds_text);
  const vera::SimProgram program = vera::compile(vera::load_model_file(path), o.settings());
  const vera::BatchResult batch = vera::batch_run(program, seeds, o.months, threads);

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  nlohmann::json runs = nlohmann::json::array();
  for (const vera::RunResult& r : batch.runs) {
    const std::string name = "seed-" + std::to_string(r.seed) + ".csv";
    vera::write_file_atomic(dir / name, vera::series_csv(r));
    runs.push_back({{"seed", r.seed}, {"file", name}});
  }
  vera::write_file_atomic(dir / "summary.csv", vera::summary_csv(batch.summary));
  nlohmann::json meta = {{"program_hash", vera::program_hash(program)},
                         {"settings", vera::settings_to_json(program.settings)},
                         {"runs", std::move(runs)}};
  vera::write_file_atomic(dir / "batch.meta.json", meta.dump(2) + "\n");
  std::cout << "wrote " << batch.runs.size() << " runs and summary.csv to " << dir.string()
            << "\n";
  return kExitOk;
}

int cmd_species(const std::string& query, const std::string& fixture, const std::string& remote,
                bool as_json) {
  std::unique_ptr<vera::TraitStore> store;
  if (!remote.empty()) {
    store = std::make_unique<vera::RemoteTraitStore>(remote);
  } else {
    std::optional<fs::path> path = fixture.empty() ? default_trait_fixture() : fs::path(fixture);
    if (!path) throw UsageError("no trait fixture: pass --fixture or set VERA_TRAIT_FIXTURE");
    store = std::make_unique<vera::LocalTraitStore>(vera::load_trait_fixture(*path));
  }
  const auto records = store->search_species(query);
  if (as_json) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : records) out.push_back(vera::taxon_record_to_json(r));
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  }
  std::cout << "taxon_id\tscientific_name\tcommon_names\tattribute_records\n";
  for (const auto& r : records) {
    std::string names;
    for (const auto& n : r.common_names) names += (names.empty() ? "" : "; ") + n;
    std::cout << r.taxon_id << "\t" << r.scientific_name << "\t" << names << "\t"
              << r.attribute_record_count << "\n";
  }
  if (records.empty()) std::cerr << "no matches for '" << query << "'\n";
  return kExitOk;
}

vera::service::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(vera::service::ServiceConfig config) {
  config.log = [](std::string_view line) { std::cerr << "vera: " << line << "\n"; };
  vera::service::Server server(std::move(config));
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "vera: listening on " << server.host() << ":" << server.port() << "\n";
  server.serve();
  g_server = nullptr;
  return kExitOk;
}

int exit_code_for(const vera::Error& e) {
  if (dynamic_cast<const vera::EngineInvariantError*>(&e) ||
      dynamic_cast<const vera::TransportError*>(&e)) {
    return kExitInternal;
  }
  const std::string& code = e.code();
  if (code == "store-unavailable" || code == "bind-failed") return kExitInternal;
  return kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vera: conceptual ecosystem models, compiled and simulated"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "vera 1.0");

  std::string model_path;
  bool as_json = false;
  SimOptions sim;

  auto* validate = app.add_subcommand("validate", "Check a model document");
  validate->add_option("model", model_path, "Model JSON file")->required()->check(CLI::ExistingFile);
  validate->add_flag("--json", as_json, "Print the report as JSON");

  auto* score = app.add_subcommand("score", "Print complexity and creativity scores");
  score->add_option("model", model_path, "Model JSON file")->required()->check(CLI::ExistingFile);
  score->add_flag("--json", as_json, "Print JSON");

  auto* compile = app.add_subcommand("compile", "Print the compiled program listing");
  compile->add_option("model", model_path, "Model JSON file")->required()->check(CLI::ExistingFile);
  add_sim_options(compile, sim, true);

  std::string out, svg;
  auto* run = app.add_subcommand("run", "Simulate once and write the series CSV");
  run->add_option("model", model_path, "Model JSON file")->required()->check(CLI::ExistingFile);
  add_sim_options(run, sim, true);
  run->add_option("--out", out, "CSV path (default: stdout); also writes <out>.meta.json");
  run->add_option("--svg", svg, "Also write a line chart");

  std::string seeds, out_dir = "batch-out";
  unsigned threads = 0;
  auto* batch = app.add_subcommand("batch", "Simulate many seeds; per-seed CSVs plus summary.csv");
  batch->add_option("model", model_path, "Model JSON file")->required()->check(CLI::ExistingFile);
  add_sim_options(batch, sim, false);
  batch->add_option("--seeds", seeds, "Seeds: list and ranges, e.g. 1..100 or 1,5,9")->required();
  batch->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  batch->add_option("--threads", threads, "Worker threads (0 = hardware)")->capture_default_str();

  std::string query, fixture, remote;
  auto* species = app.add_subcommand("species", "Search the trait store");
  species->add_option("query", query, "Name fragment")->required();
  species->add_option("--fixture", fixture, "Trait fixture JSON (default: bundled)");
  species->add_option("--remote", remote, "Remote trait endpoint base URL");
  species->add_flag("--json", as_json, "Print JSON");

  vera::service::ServiceConfig config = vera::service::ServiceConfig::from_env();
  std::string store_dir = config.store_dir.string();
  std::string trait_fixture = config.trait_fixture ? config.trait_fixture->string() : "";
  std::string remote_traits = config.remote_traits.value_or("");
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--listen", config.listen, "host:port")->capture_default_str();
  serve->add_option("--store-dir", store_dir, "Document store directory")->capture_default_str();
  serve->add_option("--trait-fixture", trait_fixture, "Trait fixture JSON");
  serve->add_option("--remote-traits", remote_traits, "Remote trait endpoint base URL");
  serve->add_flag("--trait-protocol", config.serve_trait_protocol,
                  "Also serve the trait lookup protocol");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*validate) return cmd_validate(model_path, as_json);
    if (*score) return cmd_score(model_path, as_json);
    if (*compile) return cmd_compile(model_path, sim);
    if (*run) return cmd_run(model_path, sim, out, svg);
    if (*batch) return cmd_batch(model_path, sim, seeds, out_dir, threads);
    if (*species) return cmd_species(query, fixture, remote, as_json);
    if (*serve) {
      config.store_dir = store_dir;
      if (!trait_fixture.empty()) {
        config.trait_fixture = trait_fixture;
      } else {
        config.trait_fixture = default_trait_fixture();
      }
      if (!remote_traits.empty()) config.remote_traits = remote_traits;
      return cmd_serve(std::move(config));
    }
  } catch (const vera::ValidationError& e) {
    for (const auto& issue : e.report().issues) std::cerr << issue_line(issue) << "\n";
    std::cerr << "vera: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const vera::Error& e) {
    std::cerr << "vera: " << e.code() << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "vera: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
