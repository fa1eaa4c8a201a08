// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_METRICS_REPORT_H_
#define TASRES_METRICS_REPORT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tasres::metrics {

// Metrics of one evaluated item. Double-talk items fill the near-end
// metrics, single-talk items the ERLE pair; the rest stay empty.
struct ItemMetrics {
  std::string id;
  std::string talk = "double";
  std::string far_type = "speech";
  std::optional<double> ser_db;
  std::optional<double> erle_db;        // erle(y, s_hat)
  std::optional<double> extra_erle_db;  // erle(y, s_hat) - erle(y, s_aec)
  std::optional<double> sisnr_db;
  std::optional<double> sdr_proj_db;
  std::optional<double> stoi;
  // The same near-end metrics for the LAEC output alone.
  std::optional<double> sisnr_aec_db;
  std::optional<double> stoi_aec;
};

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
};

// Linear-interpolated quartiles (numpy's default).
Summary Summarize(std::vector<double> values);

struct ConditionRow {
  std::string talk;
  std::string far_type;
  std::optional<double> ser_db;
  std::vector<std::pair<std::string, Summary>> metrics;
};

class MetricsReport {
 public:
  void Add(ItemMetrics m) { items_.push_back(std::move(m)); }
  const std::vector<ItemMetrics>& items() const { return items_; }

  // Stoi within [-1, 1] and every present value finite or at the +-300 dB
  // clamp. Returns a description of the first violation, or empty.
  std::string CheckInvariants() const;

  // Groups by (talk, far type, SER), ordered speech before music and
  // -14.2 before -18.2 dB.
  std::vector<ConditionRow> Aggregate() const;

  std::string ToCsv() const;
  static MetricsReport FromCsv(const std::string& text);
  // Aggregate table, one block per talk situation.
  std::string ToTable() const;

  void WriteCsv(const std::filesystem::path& path) const;
  void WriteTable(const std::filesystem::path& path) const;

 private:
  std::vector<ItemMetrics> items_;
};

}  // namespace tasres::metrics

#endif  // TASRES_METRICS_REPORT_H_
