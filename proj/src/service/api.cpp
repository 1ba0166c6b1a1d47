#include "vera/service/api.hpp"

#include <regex>

#include <nlohmann/json.hpp>

#include "detail/json_reader.hpp"
#include "vera/cmp/codec.hpp"
#include "vera/cmp/metrics.hpp"
#include "vera/cmp/validate.hpp"
#include "vera/compiler/program.hpp"
#include "vera/engine/engine.hpp"
#include "vera/io/series_io.hpp"

namespace vera::service {

using detail::JsonReader;
using nlohmann::json;

ApiResponse json_response(int status, const json& body) {
  return {status, "application/json", body.dump()};
}

ApiResponse error_response(int status, const std::string& code, const std::string& message,
                           const json& details) {
  return json_response(status, {{"code", code}, {"message", message}, {"details", details}});
}

namespace {

struct Route {
  std::regex pattern;
  std::string name;
};

const std::vector<Route>& routes() {
  static const std::vector<Route> table = [] {
    std::vector<Route> t;
    auto add = [&](const char* pattern, const char* name) { t.push_back({std::regex(pattern), name}); };
    add(R"(/models/?)", "models");
    add(R"(/models/([^/]+))", "model");
    add(R"(/models/([^/]+)/validate)", "validate");
    add(R"(/models/([^/]+)/scores)", "scores");
    add(R"(/models/([^/]+)/simulate)", "simulate");
    add(R"(/runs/([^/]+))", "run");
    add(R"(/runs/([^/]+)/series\.csv)", "series");
    add(R"(/species/?)", "species");
    add(R"(/species/([^/]+)/attributes)", "attributes");
    add(R"(/health)", "health");
    return t;
  }();
  return table;
}

ApiResponse method_not_allowed(const ApiRequest& request) {
  return error_response(405, "method-not-allowed",
                        request.method + " is not supported on " + request.path, json::object());
}

json model_summary(const StoredModel& stored) {
  return {{"id", stored.model.id},
          {"name", stored.model.name},
          {"revision", stored.revision},
          {"updated_at", stored.updated_at}};
}

void require_valid_for_storage(const ConceptualModel& model) {
  const ValidationReport report = validate_model(model);
  if (!report.valid) throw ValidationError(report);
}

}  // namespace

ApiResponse Api::handle(const ApiRequest& request) const {
  try {
    return route(request);
  } catch (const DecodeError& e) {
    return error_response(400, e.code(), e.what(), {{"path", e.path()}, {"offset", e.offset()}});
  } catch (const ValidationError& e) {
    return error_response(422, e.code(), e.what(), {{"report", report_to_json(e.report())}});
  } catch (const NotFoundError& e) {
    return error_response(404, e.code(), e.what(), json::object());
  } catch (const ConflictError& e) {
    return error_response(409, e.code(), e.what(), {{"current_revision", e.current_revision()}});
  } catch (const InvalidQueryError& e) {
    return error_response(400, e.code(), e.what(), json::object());
  } catch (const TransportError& e) {
    return error_response(502, e.code(), e.what(), json::object());
  } catch (const AttrRangeError& e) {
    return error_response(502, e.code(), e.what(), {{"field", e.field()}});
  } catch (const CompileError& e) {
    return error_response(422, e.code(), e.what(), json::object());
  } catch (const EngineInvariantError& e) {
    return error_response(500, e.code(), e.what(), json::object());
  } catch (const Error& e) {
    const int status = e.code() == "invalid-settings" ? 400 : 500;
    return error_response(status, e.code(), e.what(), json::object());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what(), json::object());
  }
}

ApiResponse Api::route(const ApiRequest& request) const {
  const std::string& method = request.method;
  for (const Route& r : routes()) {
    std::smatch match;
    if (!std::regex_match(request.path, match, r.pattern)) continue;
    const std::string id = match.size() > 1 ? match[1].str() : std::string{};

    if (r.name == "models") {
      if (method == "GET") {
        json out = json::array();
        for (const StoredModel& stored : store_.list_models()) out.push_back(model_summary(stored));
        return json_response(200, out);
      }
      if (method == "POST") return create_model(request);
    } else if (r.name == "model") {
      if (method == "GET") return json_response(200, stored_model_to_json(store_.get_model(id)));
      if (method == "PUT") return update_model(id, request);
      if (method == "DELETE") {
        store_.delete_model(id);
        return {204, "application/json", ""};
      }
    } else if (r.name == "validate") {
      if (method == "POST") {
        return json_response(200, report_to_json(validate_model(store_.get_model(id).model)));
      }
    } else if (r.name == "scores") {
      if (method == "GET") {
        const ModelScores scores = score_model(store_.get_model(id).model);
        return json_response(200, {{"complexity", scores.complexity},
                                   {"creativity", scores.creativity}});
      }
    } else if (r.name == "simulate") {
      if (method == "POST") return simulate(id, request);
    } else if (r.name == "run") {
      if (method == "GET") return json_response(200, run_record_to_json(store_.get_run(id)));
    } else if (r.name == "series") {
      if (method == "GET") {
        const RunRecord record = store_.get_run(id);
        if (!record.result) {
          return error_response(409, "run-not-done", "run '" + id + "' has no result",
                                {{"status", to_string(record.status)}});
        }
        return {200, "text/csv; charset=utf-8", series_csv(*record.result)};
      }
    } else if (r.name == "species") {
      if (method == "GET") {
        auto q = request.query.find("q");
        if (q == request.query.end()) throw InvalidQueryError("missing query parameter 'q'");
        json out = json::array();
        for (const TaxonRecord& rec : traits_.search_species(q->second)) {
          out.push_back(taxon_record_to_json(rec));
        }
        return json_response(200, out);
      }
    } else if (r.name == "attributes") {
      if (method == "GET") {
        return json_response(200, bundle_to_json(fill_defaults(traits_.fetch_attributes(id))));
      }
    } else if (r.name == "health") {
      if (method == "GET") return json_response(200, {{"status", "ok"}});
    }
    return method_not_allowed(request);
  }
  return error_response(404, "not-found", "no route for " + request.path, json::object());
}

ApiResponse Api::create_model(const ApiRequest& request) const {
  ConceptualModel model = decode_model(request.body);
  require_valid_for_storage(model);
  const StoredModel stored = store_.create_model(std::move(model));
  return json_response(201, stored_model_to_json(stored));
}

ApiResponse Api::update_model(const std::string& id, const ApiRequest& request) const {
  const json body = detail::parse_json(request.body);
  JsonReader r(body, "");
  r.expect_object();
  const std::uint64_t revision = r.at("revision").as_count();
  ConceptualModel model = model_from_json(r.at("model").value());
  if (!model.id.empty() && model.id != id) {
    throw DecodeError("id-mismatch", "/model/id: '" + model.id + "' does not match '" + id + "'",
                      "/model/id");
  }
  require_valid_for_storage(model);
  return json_response(200, stored_model_to_json(store_.update_model(id, revision, std::move(model))));
}

ApiResponse Api::simulate(const std::string& id, const ApiRequest& request) const {
  SimSettings settings;
  if (!request.body.empty()) {
    const json body = detail::parse_json(request.body);
    JsonReader r(body, "");
    r.expect_object();
    if (r.has("seed")) settings.seed = r.at("seed").as_count();
    if (r.has("months")) {
      const std::uint64_t months = r.at("months").as_count();
      if (months < 1 || months > kMaxSimulationMonths) {
        r.at("months").fail("months must be between 1 and " + std::to_string(kMaxSimulationMonths));
      }
      settings.duration = static_cast<std::uint32_t>(months);
    }
  }

  const StoredModel stored = store_.get_model(id);
  const SimProgram program = compile(stored.model, settings);

  RunRecord record;
  record.model_id = stored.model.id;
  record.revision = stored.revision;
  record.settings = settings;
  record = store_.create_run(std::move(record));

  try {
    record.result = run(program);
    record.status = RunStatus::Done;
  } catch (const Error& e) {
    record.status = RunStatus::Failed;
    record.error_code = e.code();
    record.error_message = e.what();
    store_.finish_run(record);
    const int status = dynamic_cast<const AgentLimitError*>(&e) ? 422 : 500;
    return error_response(status, e.code(), e.what(), {{"run_id", record.run_id}});
  }
  return json_response(200, run_record_to_json(store_.finish_run(std::move(record))));
}

}  // namespace vera::service
