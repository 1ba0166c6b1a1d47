#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vera/cmp/model.hpp"
#include "vera/engine/engine.hpp"
#include "vera/error.hpp"

namespace vera::service {

struct StoredModel {
  ConceptualModel model;  // model.id is the store id
  std::string created_at;  // RFC 3339 UTC
  std::string updated_at;
  std::uint64_t revision = 1;

  friend bool operator==(const StoredModel&, const StoredModel&) = default;
};

enum class RunStatus { Running, Done, Failed };
std::string_view to_string(RunStatus status);

struct RunRecord {
  std::string run_id;
  std::string model_id;
  std::uint64_t revision = 0;
  SimSettings settings;
  RunStatus status = RunStatus::Running;
  std::optional<RunResult> result;  // present iff Done
  std::optional<std::string> error_code;
  std::optional<std::string> error_message;
  std::string created_at;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Update carried a revision other than the current one.
class ConflictError : public Error {
 public:
  ConflictError(const std::string& message, std::uint64_t current_revision)
      : Error("stale-revision", message), current_revision_(current_revision) {}

  std::uint64_t current_revision() const noexcept { return current_revision_; }

 private:
  std::uint64_t current_revision_;
};

nlohmann::json stored_model_to_json(const StoredModel& stored);
StoredModel stored_model_from_json(const nlohmann::json& value);
nlohmann::json run_record_to_json(const RunRecord& record);
RunRecord run_record_from_json(const nlohmann::json& value);

/// Current time as RFC 3339 UTC with millisecond precision.
std::string utc_timestamp();

using LogSink = std::function<void(std::string_view)>;

/// File-backed document store.
///
/// Layout under the root directory:
///   models/<id>.json      one StoredModel per file
///   runs/<run_id>.json    one RunRecord per file
///   quarantine/           unreadable files moved aside at startup
///
/// Every write goes to a temporary file that is renamed into place. Opening
/// the store reloads everything; files that fail to parse are moved to
/// quarantine/ and reported through `log`, and leftover temporaries from an
/// interrupted write are deleted. All methods are thread-safe.
class DocumentStore {
 public:
  /// Throws Error("store-unavailable") if the directory cannot be created or
  /// written.
  explicit DocumentStore(std::filesystem::path root, LogSink log = {});

  const std::filesystem::path& root() const { return root_; }

  /// Assigns a fresh id (overwriting model.id), revision 1.
  StoredModel create_model(ConceptualModel model);
  /// Throws NotFoundError.
  StoredModel get_model(std::string_view id) const;
  std::vector<StoredModel> list_models() const;
  /// Throws NotFoundError, or ConflictError unless `expected_revision` is current.
  StoredModel update_model(std::string_view id, std::uint64_t expected_revision,
                           ConceptualModel model);
  /// Throws NotFoundError. Runs of the model are kept.
  void delete_model(std::string_view id);

  /// Assigns a fresh run id and stores the record. Records are immutable
  /// once Done or Failed; `finish_run` is the only transition.
  RunRecord create_run(RunRecord record);
  RunRecord finish_run(RunRecord record);
  /// Throws NotFoundError.
  RunRecord get_run(std::string_view run_id) const;

  std::size_t model_count() const;
  std::size_t run_count() const;
  /// Files moved to quarantine/ by this instance.
  std::vector<std::filesystem::path> quarantined() const;

 private:
  void load();
  template <typename T, typename Parse>
  void load_dir(const std::filesystem::path& dir, std::map<std::string, T, std::less<>>& into,
                Parse parse);
  void quarantine(const std::filesystem::path& file, const std::string& reason);
  std::string fresh_id(char prefix);
  void write_model(const StoredModel& stored) const;
  void write_run(const RunRecord& record) const;
  void log(const std::string& message) const;

  std::filesystem::path root_;
  LogSink log_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, StoredModel, std::less<>> models_;
  std::map<std::string, RunRecord, std::less<>> runs_;
  std::vector<std::filesystem::path> quarantined_;
  std::mt19937_64 ids_;
};

}  // namespace vera::service
