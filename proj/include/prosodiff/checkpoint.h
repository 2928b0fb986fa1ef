// Copyright (c) 2026 The prosodiff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROSODIFF_CHECKPOINT_H_
#define PROSODIFF_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "prosodiff/parameter.h"
#include "prosodiff/tensor.h"

namespace prosodiff {

// Checkpoint container layout, all integers little-endian:
//
//   magic      8 bytes  "PRSDCKPT"
//   version    u32      kCheckpointVersion
//   count      u64      number of entries
//   entries    count x { u32 name_len, name bytes, u32 rank,
//                        u64 dims[rank], f64 values[prod(dims)] }
//
// Entries keep their insertion order.
inline constexpr char kCheckpointMagic[8] = {'P', 'R', 'S', 'D',
                                             'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

void WriteCheckpoint(const std::string& path,
                     const std::vector<NamedTensor>& entries);
std::vector<NamedTensor> ReadCheckpoint(const std::string& path);

std::string EncodeCheckpoint(const std::vector<NamedTensor>& entries);
std::vector<NamedTensor> DecodeCheckpoint(const std::string& bytes);

// Appends every parameter under `prefix`. With `with_optimizer_state` the
// moments and step counter follow as "<prefix><name>@m", "@v" and "@step".
void AppendParameters(const ParameterSet& params, const std::string& prefix,
                      bool with_optimizer_state,
                      std::vector<NamedTensor>* entries);
// Restores parameters from entries written by AppendParameters. Every
// parameter of the set must be present with a matching shape; optimizer
// state is restored when present.
void RestoreParameters(const std::vector<NamedTensor>& entries,
                       const std::string& prefix, ParameterSet* params);

const NamedTensor& FindEntry(const std::vector<NamedTensor>& entries,
                             const std::string& name);

}  // namespace prosodiff

#endif  // PROSODIFF_CHECKPOINT_H_
