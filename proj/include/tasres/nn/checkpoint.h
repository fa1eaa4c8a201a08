// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_NN_CHECKPOINT_H_
#define TASRES_NN_CHECKPOINT_H_

#include <filesystem>
#include <string>

#include "tasres/nn/param.h"

namespace tasres::nn {

// Binary layout, little endian:
//   "TASRESCK" | u32 version | u64 len + metadata bytes | u64 n_params |
//   per param: u64 len + name | u8 constraint | u64 rows | u64 cols |
//   rows*cols f64 stored values (column-major)
inline constexpr std::uint32_t kCheckpointVersion = 1;

void SaveCheckpoint(const std::filesystem::path& path, const ParameterStore& store,
                    const std::string& metadata);

// Reads the metadata string only.
std::string ReadCheckpointMetadata(const std::filesystem::path& path);

// Copies stored values into `store`. Every parameter must match by name,
// shape and constraint and both sides must have the same set of names;
// otherwise throws kCheckpointMismatch. Returns the metadata.
std::string LoadCheckpoint(const std::filesystem::path& path, ParameterStore& store);

}  // namespace tasres::nn

#endif  // TASRES_NN_CHECKPOINT_H_
