// Copyright (c) 2026 The affectdialog Authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>

#include "json.hpp"

#include "affectdialog/model.hpp"
#include "affectdialog/text.hpp"

namespace affectdialog {

/// Binary layout (all integers and reals little-endian):
///   "AFDGCKPT"                      8-byte magic
///   u32  format version
///   u64  header length, header      JSON: model config, variant, vocabulary
///   u32  tensor count
///   per tensor: u32 name length, name, u32 rank, u64 dims[rank], f64 values
///   (column-major)
/// The vocabulary VAD matrix is stored as tensor "buffer.vocab_vad".
inline constexpr std::uint32_t kCheckpointVersion = 1;

nlohmann::json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

void save_checkpoint(const std::filesystem::path& path, const Seq2SeqModel& model,
                     const Vocabulary& vocab);

struct LoadedCheckpoint {
  Vocabulary vocab;
  std::unique_ptr<Seq2SeqModel> model;
};

/// Throws std::runtime_error on a malformed or truncated file.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace affectdialog
