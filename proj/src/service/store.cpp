#include "vera/service/store.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "detail/json_reader.hpp"
#include "vera/cmp/codec.hpp"
#include "vera/io/series_io.hpp"

namespace vera::service {

namespace fs = std::filesystem;
using detail::JsonReader;
using nlohmann::json;

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Running: return "running";
    case RunStatus::Done: return "done";
    case RunStatus::Failed: return "failed";
  }
  return "failed";
}

namespace {

RunStatus parse_status(const JsonReader& r) {
  const std::string text = r.as_string();
  if (text == "running") return RunStatus::Running;
  if (text == "done") return RunStatus::Done;
  if (text == "failed") return RunStatus::Failed;
  r.fail("unknown run status '" + text + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool is_temporary(const fs::path& file) {
  return file.filename().string().find(".tmp-") != std::string::npos;
}

}  // namespace

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto millis = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[40];
  const std::size_t n = std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%S", &tm);
  std::snprintf(buffer + n, sizeof(buffer) - n, ".%03dZ", static_cast<int>(millis));
  return buffer;
}

json stored_model_to_json(const StoredModel& stored) {
  return {{"id", stored.model.id},
          {"revision", stored.revision},
          {"created_at", stored.created_at},
          {"updated_at", stored.updated_at},
          {"model", model_to_json(stored.model)}};
}

StoredModel stored_model_from_json(const json& value) {
  JsonReader r(value, "");
  r.expect_object();
  StoredModel stored;
  stored.revision = r.at("revision").as_count();
  if (stored.revision == 0) r.at("revision").fail("revision must be at least 1");
  stored.created_at = r.at("created_at").as_string();
  stored.updated_at = r.at("updated_at").as_string();
  stored.model = model_from_json(r.at("model").value());
  if (stored.model.id != r.at("id").as_string()) r.fail("model id does not match record id");
  return stored;
}

json run_record_to_json(const RunRecord& record) {
  json out = {{"run_id", record.run_id},
              {"model_id", record.model_id},
              {"revision", record.revision},
              {"settings", settings_to_json(record.settings)},
              {"status", to_string(record.status)},
              {"created_at", record.created_at}};
  if (record.result) out["result"] = run_result_to_json(*record.result);
  if (record.error_code) {
    out["error"] = {{"code", *record.error_code}, {"message", record.error_message.value_or("")}};
  }
  return out;
}

RunRecord run_record_from_json(const json& value) {
  JsonReader r(value, "");
  r.expect_object();
  RunRecord record;
  record.run_id = r.at("run_id").as_string();
  record.model_id = r.at("model_id").as_string();
  record.revision = r.at("revision").as_count();
  record.settings = settings_from_json(r.at("settings").value());
  record.status = parse_status(r.at("status"));
  record.created_at = r.at("created_at").as_string();
  if (r.has("result")) record.result = run_result_from_json(r.at("result").value());
  if (r.has("error")) {
    const JsonReader error = r.at("error");
    record.error_code = error.at("code").as_string();
    record.error_message = error.at("message").as_string();
  }
  if ((record.status == RunStatus::Done) != record.result.has_value()) {
    r.fail("a run has a result exactly when it is done");
  }
  return record;
}

DocumentStore::DocumentStore(fs::path root, LogSink log)
    : root_(std::move(root)), log_(std::move(log)), ids_(std::random_device{}()) {
  std::error_code ec;
  for (const char* sub : {"models", "runs", "quarantine"}) {
    fs::create_directories(root_ / sub, ec);
    if (ec) {
      throw Error("store-unavailable",
                  "cannot create " + (root_ / sub).string() + ": " + ec.message());
    }
  }
  try {
    write_file_atomic(root_ / ".probe", "ok\n");
    fs::remove(root_ / ".probe");
  } catch (const Error& e) {
    throw Error("store-unavailable", std::string("store directory is not writable: ") + e.what());
  }
  load();
}

void DocumentStore::log(const std::string& message) const {
  if (log_) log_(message);
}

void DocumentStore::quarantine(const fs::path& file, const std::string& reason) {
  fs::path target = root_ / "quarantine" / file.filename();
  for (int n = 1; fs::exists(target); ++n) {
    target = root_ / "quarantine" / (file.filename().string() + "." + std::to_string(n));
  }
  std::error_code ec;
  fs::rename(file, target, ec);
  if (ec) {
    log("quarantine failed for " + file.string() + ": " + ec.message());
    return;
  }
  quarantined_.push_back(target);
  log("quarantined " + file.string() + " -> " + target.string() + ": " + reason);
}

template <typename T, typename Parse>
void DocumentStore::load_dir(const fs::path& dir, std::map<std::string, T, std::less<>>& into,
                             Parse parse) {
  std::vector<fs::path> files;
  for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  for (const fs::path& file : files) {
    if (is_temporary(file)) {
      log("removing incomplete write " + file.string());
      fs::remove(file);
      continue;
    }
    if (file.extension() != ".json") continue;
    try {
      T item = parse(detail::parse_json(read_file(file)));
      std::string id = file.stem().string();
      into.emplace(std::move(id), std::move(item));
    } catch (const Error& e) {
      quarantine(file, e.what());
    }
  }
}

void DocumentStore::load() {
  load_dir(root_ / "models", models_, [](const json& doc) { return stored_model_from_json(doc); });
  for (auto it = models_.begin(); it != models_.end();) {
    if (it->second.model.id != it->first) {
      quarantine(root_ / "models" / (it->first + ".json"), "record id does not match file name");
      it = models_.erase(it);
    } else {
      ++it;
    }
  }
  load_dir(root_ / "runs", runs_, [](const json& doc) { return run_record_from_json(doc); });
  for (auto& [id, record] : runs_) {
    if (record.status != RunStatus::Running) continue;
    record.status = RunStatus::Failed;
    record.error_code = "interrupted";
    record.error_message = "service stopped before the run finished";
    write_run(record);
    log("marked interrupted run " + id + " as failed");
  }
}

std::string DocumentStore::fresh_id(char prefix) {
  for (;;) {
    char buffer[24];
    std::snprintf(buffer, sizeof(buffer), "%c-%016llx", prefix,
                  static_cast<unsigned long long>(ids_()));
    std::string id = buffer;
    if (!models_.contains(id) && !runs_.contains(id)) return id;
  }
}

void DocumentStore::write_model(const StoredModel& stored) const {
  write_file_atomic(root_ / "models" / (stored.model.id + ".json"),
                    stored_model_to_json(stored).dump(2) + "\n");
}

void DocumentStore::write_run(const RunRecord& record) const {
  write_file_atomic(root_ / "runs" / (record.run_id + ".json"),
                    run_record_to_json(record).dump() + "\n");
}

StoredModel DocumentStore::create_model(ConceptualModel model) {
  std::unique_lock lock(mutex_);
  StoredModel stored;
  model.id = fresh_id('m');
  stored.model = std::move(model);
  stored.created_at = stored.updated_at = utc_timestamp();
  stored.revision = 1;
  write_model(stored);
  models_.emplace(stored.model.id, stored);
  return stored;
}

StoredModel DocumentStore::get_model(std::string_view id) const {
  std::shared_lock lock(mutex_);
  auto it = models_.find(id);
  if (it == models_.end()) throw NotFoundError("no model '" + std::string(id) + "'");
  return it->second;
}

std::vector<StoredModel> DocumentStore::list_models() const {
  std::shared_lock lock(mutex_);
  std::vector<StoredModel> out;
  out.reserve(models_.size());
  for (const auto& [id, stored] : models_) out.push_back(stored);
  return out;
}

StoredModel DocumentStore::update_model(std::string_view id, std::uint64_t expected_revision,
                                        ConceptualModel model) {
  std::unique_lock lock(mutex_);
  auto it = models_.find(id);
  if (it == models_.end()) throw NotFoundError("no model '" + std::string(id) + "'");
  if (it->second.revision != expected_revision) {
    throw ConflictError("model '" + std::string(id) + "' is at revision " +
                            std::to_string(it->second.revision) + ", not " +
                            std::to_string(expected_revision),
                        it->second.revision);
  }
  StoredModel next = it->second;
  model.id = next.model.id;
  next.model = std::move(model);
  next.revision += 1;
  next.updated_at = utc_timestamp();
  write_model(next);
  it->second = next;
  return next;
}

void DocumentStore::delete_model(std::string_view id) {
  std::unique_lock lock(mutex_);
  auto it = models_.find(id);
  if (it == models_.end()) throw NotFoundError("no model '" + std::string(id) + "'");
  fs::remove(root_ / "models" / (it->first + ".json"));
  models_.erase(it);
}

RunRecord DocumentStore::create_run(RunRecord record) {
  std::unique_lock lock(mutex_);
  record.run_id = fresh_id('r');
  record.created_at = utc_timestamp();
  record.status = RunStatus::Running;
  record.result.reset();
  write_run(record);
  runs_.emplace(record.run_id, record);
  return record;
}

RunRecord DocumentStore::finish_run(RunRecord record) {
  if (record.status == RunStatus::Running) {
    throw Error("invalid-run", "a finished run must be done or failed");
  }
  if ((record.status == RunStatus::Done) != record.result.has_value()) {
    throw Error("invalid-run", "a run has a result exactly when it is done");
  }
  std::unique_lock lock(mutex_);
  auto it = runs_.find(record.run_id);
  if (it == runs_.end()) throw NotFoundError("no run '" + record.run_id + "'");
  if (it->second.status != RunStatus::Running) {
    throw Error("run-immutable", "run '" + record.run_id + "' has already finished");
  }
  record.created_at = it->second.created_at;
  write_run(record);
  it->second = record;
  return record;
}

RunRecord DocumentStore::get_run(std::string_view run_id) const {
  std::shared_lock lock(mutex_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) throw NotFoundError("no run '" + std::string(run_id) + "'");
  return it->second;
}

std::size_t DocumentStore::model_count() const {
  std::shared_lock lock(mutex_);
  return models_.size();
}

std::size_t DocumentStore::run_count() const {
  std::shared_lock lock(mutex_);
  return runs_.size();
}

std::vector<fs::path> DocumentStore::quarantined() const {
  std::shared_lock lock(mutex_);
  return quarantined_;
}

}  // namespace vera::service
