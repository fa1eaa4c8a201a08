// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_ECHO_MANIFEST_H_
#define TASRES_ECHO_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tasres/echo/scenario.h"

namespace tasres::echo {

// One manifest line. Paths are relative to the manifest's directory and
// keyed by signal name: x, s, d, v, y and, after the LAEC stage, s_aec and
// d_hat.
struct ItemRecord {
  std::string id;
  std::string split = "train";
  std::string talk = "double";  // "double" or "single"
  std::string far_type = "speech";
  std::uint64_t seed = 0;
  std::optional<double> ser_db;  // undefined for single-talk items
  double snr_db = 30.0;
  double echo_gain = 1.0;
  RoomSpec room;
  std::map<std::string, std::string> paths;

  bool double_talk() const { return talk == "double"; }
};

// JSON-lines file, one ItemRecord per line.
class Manifest {
 public:
  Manifest() = default;
  explicit Manifest(std::filesystem::path dir) : dir_(std::move(dir)) {}

  static Manifest Load(const std::filesystem::path& file);
  void Save(const std::filesystem::path& file) const;

  const std::filesystem::path& dir() const { return dir_; }
  std::vector<ItemRecord>& items() { return items_; }
  const std::vector<ItemRecord>& items() const { return items_; }

  std::filesystem::path Resolve(const std::string& relative) const {
    return dir_ / relative;
  }
  // Reads every WAV listed for the item.
  ScenarioItem LoadItem(std::size_t index) const;
  // Writes the item's signals next to the manifest and records their paths.
  void StoreSignals(std::size_t index, const ScenarioItem& item,
                    const std::vector<std::string>& names);

 private:
  std::filesystem::path dir_;
  std::vector<ItemRecord> items_;
};

std::string SerializeRecord(const ItemRecord& record);
ItemRecord ParseRecord(const std::string& line);

}  // namespace tasres::echo

#endif  // TASRES_ECHO_MANIFEST_H_
