#include "vera/io/series_io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include <nlohmann/json.hpp>

#include "detail/json_reader.hpp"
#include "vera/error.hpp"

namespace vera {

using nlohmann::json;

std::string csv_quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string series_csv(const RunResult& result) {
  std::string out = "month";
  for (const PopulationSeries& s : result.series) out += "," + csv_quote(s.name);
  out += "\r\n";
  const std::size_t months = result.series.empty() ? 0 : result.series.front().values.size();
  for (std::size_t m = 0; m < months; ++m) {
    out += std::to_string(m);
    for (const PopulationSeries& s : result.series) out += "," + format_number(s.values[m]);
    out += "\r\n";
  }
  return out;
}

std::string summary_csv(std::span<const SeriesSummary> summary) {
  std::string out = "month";
  for (const SeriesSummary& s : summary) {
    out += "," + csv_quote(s.name + "_mean") + "," + csv_quote(s.name + "_min") + "," +
           csv_quote(s.name + "_max");
  }
  out += "\r\n";
  const std::size_t months = summary.empty() ? 0 : summary.front().mean.size();
  for (std::size_t m = 0; m < months; ++m) {
    out += std::to_string(m);
    for (const SeriesSummary& s : summary) {
      out += "," + format_number(s.mean[m]) + "," + format_number(s.min[m]) + "," +
             format_number(s.max[m]);
    }
    out += "\r\n";
  }
  return out;
}

json settings_to_json(const SimSettings& s) {
  return {
      {"duration", s.duration},
      {"seed", s.seed},
      {"agent_cap", s.agent_cap},
      {"starvation_fraction", s.starvation_fraction},
      {"seconds_per_month", s.seconds_per_month},
  };
}

SimSettings settings_from_json(const json& value) {
  detail::JsonReader r(value, "");
  r.expect_object();
  SimSettings s;
  s.duration = static_cast<std::uint32_t>(r.at("duration").as_count());
  s.seed = r.at("seed").as_count();
  s.agent_cap = r.at("agent_cap").as_count();
  s.starvation_fraction = r.at("starvation_fraction").as_number();
  s.seconds_per_month = r.at("seconds_per_month").as_number();
  return s;
}

json run_metadata(const RunResult& result) {
  json populations = json::array();
  for (const PopulationSeries& s : result.series) {
    populations.push_back({{"component_id", s.component_id},
                           {"name", s.name},
                           {"kind", to_string(s.kind)},
                           {"unit", s.kind == ComponentKind::Biotic ? "count" : "kg"}});
  }
  return {
      {"seed", result.seed},
      {"duration", result.duration()},
      {"program_hash", result.program_hash},
      {"settings", settings_to_json(result.settings)},
      {"rng", "splitmix64-keyed-v1"},
      {"populations", std::move(populations)},
  };
}

json run_result_to_json(const RunResult& result) {
  json series = json::array();
  for (const PopulationSeries& s : result.series) {
    series.push_back({{"component_id", s.component_id},
                      {"name", s.name},
                      {"kind", to_string(s.kind)},
                      {"values", s.values}});
  }
  json final_state = json::array();
  for (const PoolSummary& p : result.final_state) {
    final_state.push_back({{"component_id", p.component_id},
                           {"final_value", p.final_value},
                           {"agent_count", p.agent_count}});
  }
  const CarbonLedger& l = result.ledger;
  return {
      {"seed", result.seed},
      {"duration", result.duration()},
      {"program_hash", result.program_hash},
      {"settings", settings_to_json(result.settings)},
      {"series", std::move(series)},
      {"final_state", std::move(final_state)},
      {"ledger",
       {{"fixed_total", l.fixed_total},
        {"imported_total", l.imported_total},
        {"respired_total", l.respired_total},
        {"egested_total", l.egested_total},
        {"destroyed_total", l.destroyed_total},
        {"detritus_by_pool", l.detritus_by_pool}}},
  };
}

RunResult run_result_from_json(const json& value) {
  detail::JsonReader r(value, "");
  r.expect_object();
  RunResult result;
  result.seed = r.at("seed").as_count();
  result.program_hash = r.at("program_hash").as_string();
  result.settings = settings_from_json(r.at("settings").value());

  const detail::JsonReader series = r.at("series");
  series.expect_array();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const detail::JsonReader item = series.at(i);
    PopulationSeries s;
    s.component_id = item.at("component_id").as_string();
    s.name = item.at("name").as_string();
    const auto kind = parse_component_kind(item.at("kind").as_string());
    if (!kind) item.at("kind").fail("unknown component kind");
    s.kind = *kind;
    const detail::JsonReader values = item.at("values");
    values.expect_array();
    for (std::size_t m = 0; m < values.size(); ++m) s.values.push_back(values.at(m).as_number());
    result.series.push_back(std::move(s));
  }

  const detail::JsonReader final_state = r.at("final_state");
  final_state.expect_array();
  for (std::size_t i = 0; i < final_state.size(); ++i) {
    const detail::JsonReader item = final_state.at(i);
    result.final_state.push_back({item.at("component_id").as_string(),
                                  item.at("final_value").as_number(),
                                  static_cast<std::size_t>(item.at("agent_count").as_count())});
  }

  const detail::JsonReader l = r.at("ledger");
  result.ledger.fixed_total = l.at("fixed_total").as_number();
  result.ledger.imported_total = l.at("imported_total").as_number();
  result.ledger.respired_total = l.at("respired_total").as_number();
  result.ledger.egested_total = l.at("egested_total").as_number();
  result.ledger.destroyed_total = l.at("destroyed_total").as_number();
  const detail::JsonReader detritus = l.at("detritus_by_pool");
  detritus.expect_array();
  for (std::size_t i = 0; i < detritus.size(); ++i) {
    result.ledger.detritus_by_pool.push_back(detritus.at(i).as_number());
  }
  return result;
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string fixed(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  return buffer;
}

}  // namespace

std::string series_svg(const RunResult& result, std::string_view title) {
  constexpr double kWidth = 800, kHeight = 450;
  constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  const std::size_t months = result.series.empty() ? 0 : result.series.front().values.size();
  double y_max = 0.0;
  for (const PopulationSeries& s : result.series) {
    for (double v : s.values) y_max = std::max(y_max, v);
  }
  if (y_max <= 0.0) y_max = 1.0;
  const double x_span = months > 1 ? static_cast<double>(months - 1) : 1.0;
  auto x_at = [&](double m) { return kLeft + plot_w * m / x_span; };
  auto y_at = [&](double v) { return kTop + plot_h * (1.0 - v / y_max); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
        << xml_escape(title) << "</text>\n";
  }
  svg << "<g stroke=\"#444\" stroke-width=\"1\">"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\"/>"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\"/></g>\n";

  svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">\n";
  const std::size_t step = std::max<std::size_t>(1, (months + 9) / 10);
  for (std::size_t m = 0; m < months; m += step) {
    svg << "<text x=\"" << fixed(x_at(static_cast<double>(m))) << "\" y=\""
        << kTop + plot_h + 16 << "\" text-anchor=\"middle\">" << m << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double v = y_max * i / 4.0;
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(y_at(v) + 4)
        << "\" text-anchor=\"end\">" << format_number(std::round(v * 100) / 100) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">month</text>\n</g>\n";

  for (std::size_t p = 0; p < result.series.size(); ++p) {
    const PopulationSeries& s = result.series[p];
    const char* color = kPalette[p % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t m = 0; m < s.values.size(); ++m) {
      if (m) svg << ' ';
      svg << fixed(x_at(static_cast<double>(m))) << ',' << fixed(y_at(s.values[m]));
    }
    svg << "\"/>\n";
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(p);
    svg << "<line x1=\"" << kLeft + plot_w + 15 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << kLeft + plot_w + 35 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>"
        << "<text x=\"" << kLeft + plot_w + 40 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(s.name)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  static std::atomic<std::uint64_t> counter{0};
  std::filesystem::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);

  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error("io", "cannot create " + tmp.string() + ": " + std::strerror(errno));
  std::size_t written = 0;
  while (written < contents.size()) {
    const ssize_t n = ::write(fd, contents.data() + written, contents.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string reason = std::strerror(errno);
      ::close(fd);
      std::filesystem::remove(tmp);
      throw Error("io", "cannot write " + tmp.string() + ": " + reason);
    }
    written += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("io", "cannot rename into " + path.string() + ": " + ec.message());
  }
}

}  // namespace vera
