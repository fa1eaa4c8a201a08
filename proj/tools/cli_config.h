// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_TOOLS_CLI_CONFIG_H_
#define TASRES_TOOLS_CLI_CONFIG_H_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tasres/echo/dataset.h"
#include "tasres/laec/fdkf.h"
#include "tasres/model/tasnet.h"
#include "tasres/train/trainer.h"

namespace tasres::cli {

// Which items of a manifest a stage operates on.
enum class Split { kAll, kTrain, kVal };

struct CliConfig {
  model::ModelConfig model;
  train::TrainConfig train;
  echo::SynthConfig synth;
  laec::FdkfConfig laec;
  train::EvalConfig eval;
  Split eval_split = Split::kAll;

  void Validate() const;
};

// Every key as (section.key, value), in a fixed order.
std::vector<std::pair<std::string, std::string>> ToKeyValues(const CliConfig& cfg);

// "section.key" with a string value; kConfig on an unknown key or bad value.
void SetValue(CliConfig& cfg, const std::string& dotted_key, const std::string& value);

// INI text with [model] [train] [synth] [laec] [eval] sections. Parsing
// starts from defaults; `keys` receives every section.key that was set.
std::string DumpIni(const CliConfig& cfg);
CliConfig ParseIni(const std::string& text, std::vector<std::string>* keys = nullptr);
CliConfig LoadIni(const std::filesystem::path& path, std::vector<std::string>* keys = nullptr);

}  // namespace tasres::cli

#endif  // TASRES_TOOLS_CLI_CONFIG_H_
