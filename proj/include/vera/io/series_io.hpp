#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "vera/engine/engine.hpp"

namespace vera {

/// `month,<population-name>,...` with one row per month. Names are quoted per
/// RFC 4180 when needed; numbers use the shortest round-trip form; rows end in CRLF.
std::string series_csv(const RunResult& result);

/// `month,<name>_mean,<name>_min,<name>_max,...`.
std::string summary_csv(std::span<const SeriesSummary> summary);

/// Sidecar metadata: seed, duration, settings, program hash, populations.
nlohmann::json run_metadata(const RunResult& result);

nlohmann::json settings_to_json(const SimSettings& settings);
SimSettings settings_from_json(const nlohmann::json& value);

/// Lossless: doubles are written in shortest round-trip form, so
/// run_result_from_json(run_result_to_json(r)) == r. Throws DecodeError.
nlohmann::json run_result_to_json(const RunResult& result);
RunResult run_result_from_json(const nlohmann::json& value);

/// Minimal line chart: one polyline per population, shared y scale, legend,
/// month axis. Pure function of the series.
std::string series_svg(const RunResult& result, std::string_view title = {});

std::string csv_quote(std::string_view field);

/// Writes via a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace vera
