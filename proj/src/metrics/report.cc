// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/metrics/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "tasres/error.h"
#include "tasres/metrics/metrics.h"

namespace tasres::metrics {
namespace {

using Field = std::optional<double> ItemMetrics::*;

const std::vector<std::pair<std::string, Field>>& MetricFields() {
  static const std::vector<std::pair<std::string, Field>> fields = {
      {"erle_db", &ItemMetrics::erle_db},
      {"extra_erle_db", &ItemMetrics::extra_erle_db},
      {"sisnr_db", &ItemMetrics::sisnr_db},
      {"sdr_proj_db", &ItemMetrics::sdr_proj_db},
      {"stoi", &ItemMetrics::stoi},
      {"sisnr_aec_db", &ItemMetrics::sisnr_aec_db},
      {"stoi_aec", &ItemMetrics::stoi_aec},
  };
  return fields;
}

std::string Format(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

std::optional<double> ParseField(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    Fail(ErrorCode::kInvalidArgument, "metrics csv: bad number '" + s + "'");
  }
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int FarRank(const std::string& far) { return far == "speech" ? 0 : far == "music" ? 1 : 2; }

// Display names; SDR is the projection variant.
std::string Label(const std::string& field) {
  if (field == "erle_db") return "ERLE";
  if (field == "extra_erle_db") return "extra ERLE";
  if (field == "sisnr_db") return "SISNR";
  if (field == "sdr_proj_db") return "SDR-proj";
  if (field == "stoi") return "STOI";
  if (field == "sisnr_aec_db") return "SISNR(LAEC)";
  if (field == "stoi_aec") return "STOI(LAEC)";
  return field;
}

}  // namespace

Summary Summarize(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  s.q25 = quantile(0.25);
  s.q50 = quantile(0.5);
  s.q75 = quantile(0.75);
  return s;
}

std::string MetricsReport::CheckInvariants() const {
  for (const ItemMetrics& m : items_) {
    for (const auto& [name, field] : MetricFields()) {
      const auto& v = m.*field;
      if (v && !std::isfinite(*v)) return m.id + ": " + name + " is not finite";
      if (v && std::abs(*v) > kClampDb) return m.id + ": " + name + " beyond the clamp";
    }
    for (const auto& v : {m.stoi, m.stoi_aec})
      if (v && (*v < -1.0 || *v > 1.0)) return m.id + ": stoi outside [-1, 1]";
  }
  return {};
}

std::vector<ConditionRow> MetricsReport::Aggregate() const {
  using Key = std::tuple<int, int, double, std::string, std::string, bool>;
  std::map<Key, std::vector<const ItemMetrics*>> groups;
  for (const ItemMetrics& m : items_) {
    // SER sorts descending (-14.2 before -18.2); single-talk rows have none.
    const double ser_key = m.ser_db ? -*m.ser_db : 0.0;
    groups[{m.talk == "double" ? 1 : 0, FarRank(m.far_type), ser_key, m.far_type, m.talk,
            m.ser_db.has_value()}]
        .push_back(&m);
  }
  std::vector<ConditionRow> rows;
  for (const auto& [key, members] : groups) {
    ConditionRow row;
    row.talk = std::get<4>(key);
    row.far_type = std::get<3>(key);
    if (std::get<5>(key)) row.ser_db = members.front()->ser_db;
    for (const auto& [name, field] : MetricFields()) {
      std::vector<double> values;
      for (const ItemMetrics* m : members)
        if (m->*field) values.push_back(*(m->*field));
      if (!values.empty()) row.metrics.emplace_back(name, Summarize(std::move(values)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string MetricsReport::ToCsv() const {
  std::ostringstream out;
  out << "id,talk,far_type,ser_db";
  for (const auto& [name, field] : MetricFields()) out << "," << name;
  out << "\n";
  for (const ItemMetrics& m : items_) {
    out << m.id << "," << m.talk << "," << m.far_type << "," << Format(m.ser_db);
    for (const auto& [name, field] : MetricFields()) out << "," << Format(m.*field);
    out << "\n";
  }
  return out.str();
}

MetricsReport MetricsReport::FromCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) Fail(ErrorCode::kInvalidArgument, "metrics csv: empty");
  const std::size_t columns = 4 + MetricFields().size();
  if (SplitCsv(line).size() != columns)
    Fail(ErrorCode::kInvalidArgument, "metrics csv: unexpected header");
  MetricsReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = SplitCsv(line);
    if (cells.size() != columns)
      Fail(ErrorCode::kInvalidArgument, "metrics csv: wrong column count in: " + line);
    ItemMetrics m;
    m.id = cells[0];
    m.talk = cells[1];
    m.far_type = cells[2];
    m.ser_db = ParseField(cells[3]);
    for (std::size_t i = 0; i < MetricFields().size(); ++i)
      m.*(MetricFields()[i].second) = ParseField(cells[4 + i]);
    report.Add(std::move(m));
  }
  return report;
}

std::string MetricsReport::ToTable() const {
  std::ostringstream out;
  char buf[256];
  std::string talk;
  for (const ConditionRow& row : Aggregate()) {
    if (row.talk != talk) {
      talk = row.talk;
      out << (talk == "double" ? "Double-talk" : "Single-talk")
          << " (mean [q25 / median / q75], n items)\n";
    }
    std::string cond = row.far_type;
    if (row.ser_db) {
      std::snprintf(buf, sizeof(buf), ", SER %.1f dB", *row.ser_db);
      cond += buf;
    }
    out << "  " << cond << "\n";
    for (const auto& [name, s] : row.metrics) {
      std::snprintf(buf, sizeof(buf), "    %-12s %8.3f  [%8.3f / %8.3f / %8.3f]  n=%zu\n",
                    Label(name).c_str(), s.mean, s.q25, s.q50, s.q75, s.count);
      out << buf;
    }
  }
  return out.str();
}

void MetricsReport::WriteCsv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << ToCsv();
}

void MetricsReport::WriteTable(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << ToTable();
}

}  // namespace tasres::metrics
