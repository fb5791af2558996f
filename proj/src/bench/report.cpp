// SPDX-License-Identifier: Apache-2.0

#include "plcbench/bench/report.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>

#include <json.hpp>

#include "plcbench/common/error.hpp"
#include "plcbench/common/key_value_config.hpp"

namespace plcbench::bench {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 4> kColumns = {"Protocol", "Read, ms", "Write, ms", "Write/Read Cycle, ms"};
constexpr std::array<Protocol, 4> kRowOrder = {Protocol::Fins, Protocol::CipExplicit, Protocol::Udp, Protocol::Opc};

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

json stats_to_json(const LatencyStats& s) {
  return json{{"count", s.count},   {"mean_us", s.mean_us}, {"median_us", s.median_us},
              {"p95_us", s.p95_us}, {"p99_us", s.p99_us},   {"min_us", s.min_us},
              {"max_us", s.max_us}, {"stddev_us", s.stddev_us}};
}

LatencyStats stats_from_json(const json& j) {
  LatencyStats s;
  s.count = j.at("count").get<std::uint64_t>();
  s.mean_us = j.at("mean_us").get<double>();
  s.median_us = j.at("median_us").get<std::int64_t>();
  s.p95_us = j.at("p95_us").get<std::int64_t>();
  s.p99_us = j.at("p99_us").get<std::int64_t>();
  s.min_us = j.at("min_us").get<std::int64_t>();
  s.max_us = j.at("max_us").get<std::int64_t>();
  s.stddev_us = j.at("stddev_us").get<double>();
  return s;
}

std::string markdown(const Report& report) {
  auto row_line = [](const std::array<std::string, 4>& cells) {
    std::string line = "|";
    for (const auto& c : cells) {
      line += " " + c + " |";
    }
    return line + "\n";
  };
  std::array<std::string, 4> header;
  std::array<std::string, 4> rule;
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    header[i] = kColumns[i];
    rule[i] = std::string(header[i].size(), '-');
  }
  std::string out = row_line(header) + row_line(rule);
  for (const auto row : kRowOrder) {
    std::array<std::string, 4> cells{table_row(row), "-", "-", "-"};
    bool present = false;
    for (const auto& c : report.cells) {
      if (std::string_view(table_row(c.protocol)) != table_row(row)) {
        continue;
      }
      present = true;
      auto& slot = cells[1 + static_cast<std::size_t>(c.kind)];
      slot = c.stats ? fixed2(c.stats->mean_us / 1000.0) : "FAILED";
    }
    if (present) {
      out += row_line(cells);
    }
  }
  return out;
}

std::string csv(const Report& report) {
  std::ostringstream out;
  out.precision(17);
  out << "protocol,kind,pipelined,count,mean_us,median_us,p95_us,p99_us,min_us,max_us,stddev_us,non_ok,failure\n";
  for (const auto& c : report.cells) {
    out << to_string(c.protocol) << ',' << to_string(c.kind) << ',' << (c.pipelined ? 1 : 0) << ',';
    if (c.stats) {
      const auto& s = *c.stats;
      out << s.count << ',' << s.mean_us << ',' << s.median_us << ',' << s.p95_us << ',' << s.p99_us << ','
          << s.min_us << ',' << s.max_us << ',' << s.stddev_us;
    } else {
      out << ",,,,,,,";
    }
    std::string failure = c.failure;
    for (auto& ch : failure) {
      if (ch == ',' || ch == '\n') {
        ch = ';';
      }
    }
    out << ',' << c.non_ok << ',' << failure << '\n';
  }
  return out.str();
}

json to_json(const Report& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    cells.push_back(json{{"protocol", to_string(c.protocol)},
                         {"kind", to_string(c.kind)},
                         {"pipelined", c.pipelined},
                         {"stats", c.stats ? stats_to_json(*c.stats) : json(nullptr)},
                         {"failure", c.failure},
                         {"non_ok", c.non_ok}});
  }
  return json{{"emitted_at", report.emitted_at},
              {"clock_resolution_ns", report.clock_resolution_ns},
              {"config", report.config},
              {"cells", cells}};
}

}  // namespace

Format parse_format(std::string_view text) {
  if (text == "md" || text == "markdown") return Format::Markdown;
  if (text == "csv") return Format::Csv;
  if (text == "json") return Format::Json;
  throw ConfigError("unknown format '" + std::string(text) + "' (expected markdown, csv, json)");
}

std::string format_report(const Report& report, Format format) {
  switch (format) {
    case Format::Markdown: return markdown(report);
    case Format::Csv: return csv(report);
    case Format::Json: return to_json(report).dump(2) + "\n";
  }
  return {};
}

Report parse_report_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    Report r;
    r.emitted_at = j.at("emitted_at").get<std::string>();
    r.clock_resolution_ns = j.at("clock_resolution_ns").get<std::int64_t>();
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    for (const auto& c : j.at("cells")) {
      Cell cell;
      cell.protocol = parse_protocol(c.at("protocol").get<std::string>());
      cell.kind = parse_kind(c.at("kind").get<std::string>());
      cell.pipelined = c.at("pipelined").get<bool>();
      if (!c.at("stats").is_null()) {
        cell.stats = stats_from_json(c.at("stats"));
      }
      cell.failure = c.at("failure").get<std::string>();
      cell.non_ok = c.at("non_ok").get<std::uint64_t>();
      r.cells.push_back(std::move(cell));
    }
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("report JSON: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("report JSON: ") + e.what());
  }
}

std::string format_stats_json(const LatencyStats& stats) { return stats_to_json(stats).dump(2) + "\n"; }

std::string format_samples_csv(std::span<const LatencySample> samples) {
  std::string out = "trial_index,latency_us,outcome\n";
  for (const auto& s : samples) {
    out += std::to_string(s.trial_index) + ',';
    if (s.outcome == Outcome::Ok) {
      out += std::to_string(to_micros(s.latency));
    }
    out += ',';
    out += to_string(s.outcome);
    out += '\n';
  }
  return out;
}

std::vector<LatencySample> parse_samples_csv(std::string_view text) {
  std::vector<LatencySample> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto fail = [&line_no](const std::string& why) {
    throw FormatError("samples CSV line " + std::to_string(line_no) + ": " + why);
  };
  auto number = [&fail](const std::string& field, auto& value) {
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
      fail("not an integer: '" + field + "'");
    }
  };
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) {
      eol = text.size();
    }
    std::string line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) {
      continue;
    }
    if (line_no == 1 && line.rfind("trial_index", 0) == 0) {
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 3) {
      fail("expected 3 fields");
    }
    LatencySample s;
    number(trim(fields[0]), s.trial_index);
    try {
      s.outcome = parse_outcome(trim(fields[2]));
    } catch (const ConfigError& e) {
      fail(e.what());
    }
    const auto latency = trim(fields[1]);
    if (s.outcome == Outcome::Ok) {
      std::int64_t us = 0;
      number(latency, us);
      if (us < 0) {
        fail("negative latency");
      }
      s.latency = from_micros(us);
    }
    out.push_back(s);
  }
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace plcbench::bench
