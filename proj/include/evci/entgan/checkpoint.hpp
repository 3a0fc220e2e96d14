// Copyright 2026 The EVCI Augment Authors. All Rights Reserved.
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


#ifndef EVCI_ENTGAN_CHECKPOINT_HPP_
#define EVCI_ENTGAN_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "evci/entgan/model.hpp"
#include "evci/envvec.hpp"

namespace evci::gan {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  EntGan<float> model;
  env::EnvStats stats;
  std::uint64_t step = 0;
};

// Layout: "ENTG", u32 version, u32 header length, JSON header
// {config, env_stats, step}, then one entry per parameter until EOF:
// u32 name length, name, u32 rank, rank x u32 dims, float32 values.
// All integers and floats little-endian.
void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
// Throws IoError if unreadable, FormatError on a bad magic, unknown version,
// or a parameter table that does not match the stored config.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace evci::gan

#endif  // EVCI_ENTGAN_CHECKPOINT_HPP_
