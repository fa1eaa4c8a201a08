// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/echo/manifest.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tasres/audio/wav_io.h"
#include "tasres/error.h"

namespace tasres::echo {
namespace {

using nlohmann::json;

json RoomToJson(const RoomSpec& room) {
  return json{{"dims", room.dimensions},
              {"t60", room.t60},
              {"mic", room.mic},
              {"src", room.src},
              {"rir_len", room.EffectiveLength()},
              {"sample_rate", room.sample_rate},
              {"highpass", room.highpass}};
}

RoomSpec RoomFromJson(const json& j) {
  RoomSpec room;
  room.dimensions = j.at("dims").get<Point3>();
  room.t60 = j.at("t60").get<double>();
  room.mic = j.at("mic").get<Point3>();
  room.src = j.at("src").get<Point3>();
  room.rir_len = j.at("rir_len").get<int>();
  room.sample_rate = j.value("sample_rate", kDefaultSampleRate);
  room.highpass = j.value("highpass", true);
  return room;
}

Waveform& SignalByName(ScenarioItem& item, const std::string& name) {
  if (name == "x") return item.x;
  if (name == "s") return item.s;
  if (name == "d") return item.d;
  if (name == "v") return item.v;
  if (name == "y") return item.y;
  if (name == "s_aec") return item.s_aec;
  if (name == "d_hat") return item.d_hat;
  Fail(ErrorCode::kInvalidArgument, "unknown signal name: " + name);
}

}  // namespace

std::string SerializeRecord(const ItemRecord& r) {
  json j{{"id", r.id},
         {"split", r.split},
         {"talk", r.talk},
         {"far_type", r.far_type},
         {"seed", r.seed},
         {"snr_db", r.snr_db},
         {"echo_gain", r.echo_gain},
         {"room", RoomToJson(r.room)},
         {"paths", r.paths}};
  j["ser_db"] = r.ser_db ? json(*r.ser_db) : json(nullptr);
  return j.dump();
}

ItemRecord ParseRecord(const std::string& line) {
  ItemRecord r;
  try {
    const json j = json::parse(line);
    r.id = j.at("id").get<std::string>();
    r.split = j.value("split", "train");
    r.talk = j.value("talk", "double");
    r.far_type = j.value("far_type", "speech");
    r.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("ser_db") && !j["ser_db"].is_null())
      r.ser_db = j["ser_db"].get<double>();
    r.snr_db = j.value("snr_db", 30.0);
    r.echo_gain = j.value("echo_gain", 1.0);
    if (j.contains("room")) r.room = RoomFromJson(j["room"]);
    r.paths = j.at("paths").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    Fail(ErrorCode::kUnsupportedFormat, std::string("malformed manifest line: ") + e.what());
  }
  if (r.talk != "double" && r.talk != "single")
    Fail(ErrorCode::kUnsupportedFormat, "manifest talk must be double or single");
  return r;
}

Manifest Manifest::Load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) Fail(ErrorCode::kIo, "cannot open manifest " + file.string());
  Manifest m(file.parent_path());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    m.items_.push_back(ParseRecord(line));
  }
  return m;
}

void Manifest::Save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write manifest " + file.string());
  for (const auto& r : items_) out << SerializeRecord(r) << '\n';
  if (!out) Fail(ErrorCode::kIo, "write failed: " + file.string());
}

ScenarioItem Manifest::LoadItem(std::size_t index) const {
  const ItemRecord& r = items_.at(index);
  ScenarioItem item;
  item.id = r.id;
  item.split = r.split;
  item.far_type = r.far_type;
  item.has_near_end = r.double_talk();
  item.echo_gain = r.echo_gain;
  item.mix.ser_db = r.ser_db.value_or(0.0);
  item.mix.snr_db = r.snr_db;
  item.mix.seed = r.seed;
  item.room = r.room;
  for (const auto& [name, rel] : r.paths) SignalByName(item, name) = ReadWav(Resolve(rel));
  item.has_laec = r.paths.contains("s_aec") && r.paths.contains("d_hat");
  return item;
}

void Manifest::StoreSignals(std::size_t index, const ScenarioItem& item,
                            const std::vector<std::string>& names) {
  ItemRecord& r = items_.at(index);
  std::filesystem::create_directories(dir_ / r.id);
  for (const auto& name : names) {
    const std::string rel = r.id + "/" + name + ".wav";
    WriteWav(Resolve(rel), SignalByName(const_cast<ScenarioItem&>(item), name));
    r.paths[name] = rel;
  }
}

}  // namespace tasres::echo
