// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/nn/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <vector>

#include "tasres/error.h"

namespace tasres::nn {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'T', 'A', 'S', 'R', 'E', 'S', 'C', 'K'};

template <typename T>
void Put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void PutString(std::ostream& out, const std::string& s) {
  Put<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T Get(std::istream& in, const std::string& what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) Fail(ErrorCode::kIo, "checkpoint truncated while reading " + what);
  return v;
}

std::string GetString(std::istream& in, const std::string& what) {
  const auto n = Get<std::uint64_t>(in, what);
  if (n > (1u << 30)) Fail(ErrorCode::kIo, "checkpoint corrupt: oversized " + what);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) Fail(ErrorCode::kIo, "checkpoint truncated while reading " + what);
  return s;
}

struct Entry {
  Constraint constraint;
  Matrix values;
};

std::ifstream OpenAndCheckHeader(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open checkpoint " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    Fail(ErrorCode::kIo, "not a checkpoint file: " + path.string());
  const auto version = Get<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion)
    Fail(ErrorCode::kCheckpointMismatch,
         "unsupported checkpoint version " + std::to_string(version));
  return in;
}

}  // namespace

void SaveCheckpoint(const std::filesystem::path& path, const ParameterStore& store,
                    const std::string& metadata) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorCode::kIo, "cannot write checkpoint " + tmp.string());
    out.write(kMagic, 8);
    Put<std::uint32_t>(out, kCheckpointVersion);
    PutString(out, metadata);
    Put<std::uint64_t>(out, store.size());
    for (const Param* p : store.All()) {
      PutString(out, p->name);
      Put<std::uint8_t>(out, p->constraint == Constraint::kPositive ? 1 : 0);
      Put<std::uint64_t>(out, static_cast<std::uint64_t>(p->values.rows()));
      Put<std::uint64_t>(out, static_cast<std::uint64_t>(p->values.cols()));
      out.write(reinterpret_cast<const char*>(p->values.data()),
                static_cast<std::streamsize>(p->values.size() * sizeof(double)));
    }
    if (!out) Fail(ErrorCode::kIo, "failed writing checkpoint " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot move checkpoint into place: " + ec.message());
}

std::string ReadCheckpointMetadata(const std::filesystem::path& path) {
  std::ifstream in = OpenAndCheckHeader(path);
  return GetString(in, "metadata");
}

std::string LoadCheckpoint(const std::filesystem::path& path, ParameterStore& store) {
  std::ifstream in = OpenAndCheckHeader(path);
  std::string metadata = GetString(in, "metadata");
  const auto count = Get<std::uint64_t>(in, "parameter count");
  std::map<std::string, Entry> entries;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = GetString(in, "parameter name");
    const auto constraint = Get<std::uint8_t>(in, name);
    const auto rows = Get<std::uint64_t>(in, name);
    const auto cols = Get<std::uint64_t>(in, name);
    if (rows * cols > (1ull << 32)) Fail(ErrorCode::kIo, "checkpoint corrupt: " + name);
    Matrix values(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!in) Fail(ErrorCode::kIo, "checkpoint truncated in " + name);
    entries[name] = {constraint ? Constraint::kPositive : Constraint::kNone, std::move(values)};
  }
  if (entries.size() != store.size())
    Fail(ErrorCode::kCheckpointMismatch,
         "checkpoint has " + std::to_string(entries.size()) + " parameters, model has " +
             std::to_string(store.size()));
  for (const Param* p : store.All()) {
    auto it = entries.find(p->name);
    if (it == entries.end())
      Fail(ErrorCode::kCheckpointMismatch, "checkpoint lacks parameter " + p->name);
    const Entry& e = it->second;
    if (e.values.rows() != p->values.rows() || e.values.cols() != p->values.cols() ||
        e.constraint != p->constraint)
      Fail(ErrorCode::kCheckpointMismatch, "shape or constraint mismatch for " + p->name);
  }
  for (Param* p : store.All()) p->values = entries[p->name].values;
  return metadata;
}

}  // namespace tasres::nn
