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


#include "evci/entgan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>

#include <json.hpp>

#include "evci/error.hpp"

namespace evci::gan {
namespace {

constexpr char kMagic[4] = {'E', 'N', 'T', 'G'};
constexpr std::uint32_t kMaxHeader = 1u << 24;
constexpr std::uint32_t kMaxName = 1u << 12;
constexpr std::uint32_t kMaxRank = 8;

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {
      static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
      static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

bool get_u32(std::istream& in, std::uint32_t& v) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
  v = static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
      static_cast<std::uint32_t>(b[2]) << 16 |
      static_cast<std::uint32_t>(b[3]) << 24;
  return true;
}

std::uint32_t need_u32(std::istream& in, const char* what) {
  std::uint32_t v = 0;
  if (!get_u32(in, v)) throw FormatError(std::string("truncated checkpoint: ") + what);
  return v;
}

void write_params(std::ostream& out, const ParameterSet<float>& set) {
  for (const auto& p : set.items()) {
    put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put_u32(out, static_cast<std::uint32_t>(p.value.rank()));
    for (std::size_t d : p.value.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    for (float f : p.value.values()) put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
}

Parameter<float>* find_param(EntGan<float>& m, const std::string& name) {
  for (auto* set : {&m.eg_params(), &m.d_params()}) {
    if (set->contains(name)) return &set->at(name);
  }
  return nullptr;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  nlohmann::ordered_json header;
  header["config"] = nlohmann::ordered_json::parse(config_to_json(ckpt.model.config()));
  header["env_stats"] = nlohmann::ordered_json::parse(env::stats_to_json(ckpt.stats));
  header["step"] = ckpt.step;
  const std::string text = header.dump();

  out.write(kMagic, 4);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  write_params(out, ckpt.model.eg_params());
  write_params(out, ckpt.model.d_params());
  if (!out) throw IoError("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("not a checkpoint (bad magic)");
  }
  const std::uint32_t version = need_u32(in, "version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version) +
                      " (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint32_t header_len = need_u32(in, "header length");
  if (header_len > kMaxHeader) throw FormatError("checkpoint header too large");
  std::string text(header_len, '\0');
  if (!in.read(text.data(), header_len)) throw FormatError("truncated checkpoint header");

  ModelConfig cfg;
  env::EnvStats stats;
  std::uint64_t step = 0;
  try {
    const auto header = nlohmann::json::parse(text);
    cfg = config_from_json(header.at("config").dump());
    stats = env::stats_from_json(header.at("env_stats").dump());
    step = header.at("step").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("bad checkpoint header: ") + ex.what());
  }

  Rng rng(0);
  Checkpoint ckpt{EntGan<float>(cfg, rng), stats, step};
  std::set<std::string> seen;
  std::uint32_t name_len = 0;
  while (get_u32(in, name_len)) {
    if (name_len == 0 || name_len > kMaxName) throw FormatError("bad parameter name length");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw FormatError("truncated parameter name");
    const std::uint32_t rank = need_u32(in, "rank");
    if (rank > kMaxRank) throw FormatError("bad rank for parameter '" + name + "'");
    nn::Shape shape;
    for (std::uint32_t i = 0; i < rank; ++i) shape.push_back(need_u32(in, "dims"));

    Parameter<float>* p = find_param(ckpt.model, name);
    if (p == nullptr) throw FormatError("unknown parameter '" + name + "' in checkpoint");
    if (!seen.insert(name).second) throw FormatError("duplicate parameter '" + name + "'");
    if (p->value.shape() != shape) {
      throw FormatError("parameter '" + name + "' has shape " + nn::shape_string(shape) +
                        ", config expects " + nn::shape_string(p->value.shape()));
    }
    for (float& f : p->value.values()) f = std::bit_cast<float>(need_u32(in, "values"));
  }
  const std::size_t expected = ckpt.model.eg_params().size() + ckpt.model.d_params().size();
  if (seen.size() != expected) {
    throw FormatError("checkpoint holds " + std::to_string(seen.size()) + " of " +
                      std::to_string(expected) + " parameters");
  }
  ckpt.model.eg_params().zero_grad();
  ckpt.model.d_params().zero_grad();
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return read_checkpoint(in);
}

}  // namespace evci::gan
