// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cli_config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "tasres/error.h"

namespace tasres::cli {
namespace {

struct Binding {
  std::string key;
  std::function<std::string(const CliConfig&)> get;
  std::function<void(CliConfig&, const std::string&)> set;
};

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty())
    Fail(ErrorCode::kConfig, key + ": cannot parse '" + value + "'");
  return out;
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  Fail(ErrorCode::kConfig, key + ": expected true/false, got '" + value + "'");
}

std::string List(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + Num(v[i]);
  return out;
}

std::vector<double> ParseList(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b == std::string::npos) Fail(ErrorCode::kConfig, key + ": empty list entry");
    out.push_back(ParseNumber<double>(key, item.substr(b, e - b + 1)));
  }
  return out;
}

const char* ModeName(train::EvalMode m) {
  switch (m) {
    case train::EvalMode::kModel: return "model";
    case train::EvalMode::kPassThrough: return "pass_through";
    case train::EvalMode::kOracleMask: return "oracle_mask";
  }
  return "model";
}

train::EvalMode ParseMode(const std::string& v) {
  if (v == "model") return train::EvalMode::kModel;
  if (v == "pass_through") return train::EvalMode::kPassThrough;
  if (v == "oracle_mask") return train::EvalMode::kOracleMask;
  Fail(ErrorCode::kConfig, "eval.mode: expected model, pass_through or oracle_mask, got '" + v + "'");
}

const char* SplitName(Split s) { return s == Split::kAll ? "all" : s == Split::kTrain ? "train" : "val"; }

Split ParseSplit(const std::string& v) {
  if (v == "all") return Split::kAll;
  if (v == "train") return Split::kTrain;
  if (v == "val") return Split::kVal;
  Fail(ErrorCode::kConfig, "eval.split: expected all, train or val, got '" + v + "'");
}

#define TASRES_NUM(section, name, field, type)                                       \
  Binding {                                                                          \
    #section "." #name, [](const CliConfig& c) { return Num(c.field); },             \
        [](CliConfig& c, const std::string& v) {                                     \
          c.field = ParseNumber<type>(#section "." #name, v);                        \
        }                                                                            \
  }
#define TASRES_INT(section, name, field, type)                                       \
  Binding {                                                                          \
    #section "." #name, [](const CliConfig& c) { return std::to_string(c.field); },  \
        [](CliConfig& c, const std::string& v) {                                     \
          c.field = ParseNumber<type>(#section "." #name, v);                        \
        }                                                                            \
  }
#define TASRES_PATH(section, name, field)                                            \
  Binding {                                                                          \
    #section "." #name, [](const CliConfig& c) { return c.field.string(); },         \
        [](CliConfig& c, const std::string& v) { c.field = v; }                      \
  }

const std::vector<Binding>& Bindings() {
  static const std::vector<Binding> table = [] {
    std::vector<Binding> t;
    for (const auto& [k, unused] : model::ModelConfigToKeyValues(model::ModelConfig{})) {
      const std::string key = k;
      t.push_back({"model." + key,
                   [key](const CliConfig& c) {
                     for (const auto& [kk, vv] : model::ModelConfigToKeyValues(c.model))
                       if (kk == key) return vv;
                     return std::string();
                   },
                   [key](CliConfig& c, const std::string& v) { model::SetModelConfigValue(c.model, key, v); }});
    }
    t.push_back(TASRES_INT(train, epochs, train.epochs, int));
    t.push_back(TASRES_INT(train, max_steps, train.max_steps, std::int64_t));
    t.push_back(TASRES_INT(train, batch_items, train.batch_items, int));
    t.push_back(TASRES_INT(train, epoch_items, train.epoch_items, int));
    t.push_back(TASRES_NUM(train, segment_seconds, train.segment_seconds, double));
    t.push_back(TASRES_NUM(train, lr_init, train.lr_init, double));
    t.push_back(TASRES_INT(train, lr_halve_patience, train.lr_halve_patience, int));
    t.push_back(TASRES_NUM(train, clip_norm, train.clip_norm, double));
    t.push_back(TASRES_NUM(train, loss_w, train.loss.w, double));
    t.push_back({"train.loss_zero_mean",
                 [](const CliConfig& c) { return std::string(c.train.loss.zero_mean ? "true" : "false"); },
                 [](CliConfig& c, const std::string& v) { c.train.loss.zero_mean = ParseBool("train.loss_zero_mean", v); }});
    t.push_back(TASRES_INT(train, seed, train.seed, std::uint64_t));
    t.push_back(TASRES_INT(train, jobs, train.jobs, int));

    t.push_back(TASRES_INT(synth, items, synth.n_items, int));
    t.push_back(TASRES_INT(synth, seed, synth.seed, std::uint64_t));
    t.push_back(TASRES_NUM(synth, item_seconds, synth.item_seconds, double));
    t.push_back(TASRES_INT(synth, sample_rate, synth.sample_rate, int));
    t.push_back({"synth.ser_set", [](const CliConfig& c) { return List(c.synth.ser_set); },
                 [](CliConfig& c, const std::string& v) { c.synth.ser_set = ParseList("synth.ser_set", v); }});
    t.push_back({"synth.snr_set", [](const CliConfig& c) { return List(c.synth.snr_set); },
                 [](CliConfig& c, const std::string& v) { c.synth.snr_set = ParseList("synth.snr_set", v); }});
    t.push_back(TASRES_NUM(synth, clip_ratio, synth.clip_ratio, double));
    t.push_back(TASRES_NUM(synth, single_talk_fraction, synth.single_talk_fraction, double));
    t.push_back(TASRES_NUM(synth, music_fraction, synth.music_fraction, double));
    t.push_back(TASRES_NUM(synth, val_fraction, synth.val_fraction, double));
    t.push_back(TASRES_NUM(synth, max_peak, synth.max_peak, double));
    t.push_back(TASRES_PATH(synth, far_speech_dir, synth.far_speech_dir));
    t.push_back(TASRES_PATH(synth, far_music_dir, synth.far_music_dir));
    t.push_back(TASRES_PATH(synth, near_dir, synth.near_dir));
    t.push_back(TASRES_NUM(synth, room_min_dim, synth.rooms.min_dim, double));
    t.push_back(TASRES_NUM(synth, room_max_dim, synth.rooms.max_dim, double));
    t.push_back(TASRES_NUM(synth, room_min_t60, synth.rooms.min_t60, double));
    t.push_back(TASRES_NUM(synth, room_max_t60, synth.rooms.max_t60, double));
    t.push_back(TASRES_NUM(synth, wall_margin, synth.rooms.wall_margin, double));
    t.push_back(TASRES_NUM(synth, min_distance, synth.rooms.min_distance, double));
    t.push_back(TASRES_INT(synth, jobs, synth.jobs, int));

    t.push_back(TASRES_INT(laec, block_len, laec.block_len, int));
    t.push_back(TASRES_NUM(laec, transition, laec.transition, double));
    t.push_back(TASRES_NUM(laec, psi_smoothing, laec.psi_smoothing, double));
    t.push_back(TASRES_NUM(laec, initial_p, laec.initial_p, double));
    t.push_back(TASRES_NUM(laec, epsilon, laec.epsilon, double));

    t.push_back({"eval.mode", [](const CliConfig& c) { return std::string(ModeName(c.eval.mode)); },
                 [](CliConfig& c, const std::string& v) { c.eval.mode = ParseMode(v); }});
    t.push_back({"eval.split", [](const CliConfig& c) { return std::string(SplitName(c.eval_split)); },
                 [](CliConfig& c, const std::string& v) { c.eval_split = ParseSplit(v); }});
    t.push_back(TASRES_NUM(eval, erle_exclude_seconds, eval.erle_exclude_seconds, double));
    t.push_back(TASRES_INT(eval, jobs, eval.jobs, int));
    return t;
  }();
  return table;
}

#undef TASRES_NUM
#undef TASRES_INT
#undef TASRES_PATH

}  // namespace

void CliConfig::Validate() const {
  try {
    model.Validate();
    train.Validate();
    synth.Validate();
    laec.Validate();
    if (!(eval.erle_exclude_seconds >= 0.0))
      Fail(ErrorCode::kConfig, "eval.erle_exclude_seconds must be non-negative");
    if (eval.jobs < 1) Fail(ErrorCode::kConfig, "eval.jobs must be at least 1");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    Fail(ErrorCode::kConfig, e.what());
  }
}

std::vector<std::pair<std::string, std::string>> ToKeyValues(const CliConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Binding& b : Bindings()) out.emplace_back(b.key, b.get(cfg));
  return out;
}

void SetValue(CliConfig& cfg, const std::string& dotted_key, const std::string& value) {
  for (const Binding& b : Bindings()) {
    if (b.key == dotted_key) {
      b.set(cfg, value);
      return;
    }
  }
  Fail(ErrorCode::kConfig, "unknown key " + dotted_key);
}

std::string DumpIni(const CliConfig& cfg) {
  std::string out, section;
  for (const auto& [key, value] : ToKeyValues(cfg)) {
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      out += (section.empty() ? "[" : "\n[") + sec + "]\n";
      section = sec;
    }
    out += key.substr(dot + 1) + " = " + value + "\n";
  }
  return out;
}

CliConfig ParseIni(const std::string& text, std::vector<std::string>* keys) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    Fail(ErrorCode::kConfig, std::string("malformed config: ") + e.what());
  }
  CliConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      Fail(ErrorCode::kConfig, "key outside a section: " + section);
    for (const auto& [key, node] : body) {
      SetValue(cfg, section + "." + key, node.get_value<std::string>());
      if (keys) keys->push_back(section + "." + key);
    }
  }
  return cfg;
}

CliConfig LoadIni(const std::filesystem::path& path, std::vector<std::string>* keys) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseIni(ss.str(), keys);
}

}  // namespace tasres::cli
