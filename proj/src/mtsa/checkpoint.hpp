// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

// Checkpoint container.
//
//   offset 0   8 bytes   magic "MTSACKPT"
//   offset 8   u32 LE    format version (1)
//   offset 12  u64 LE    header length H
//   offset 20  H bytes   UTF-8 JSON header
//   then       payload   float64 LE values of every tensor, in header order
//
// The header carries the model config, the embedding vocabulary and its
// fingerprint, the run manifest, and for each tensor its name, shape, value
// count and byte offset into the payload.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "mtsa/model.hpp"

namespace mtsa {

struct Checkpoint {
  Model model;
  std::vector<std::string> vocabulary;
  std::uint64_t embedding_fingerprint = 0;
  nlohmann::json manifest;
};

std::string serialize_checkpoint(const Model& model, const EmbeddingTable& table,
                                 const nlohmann::json& manifest);
std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(std::string_view bytes, const std::string& origin = "<memory>");

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const EmbeddingTable& table, const nlohmann::json& manifest = {});
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Throws kVocabMismatch unless `table` is the embedding table the
/// checkpoint was trained with.
void verify_embeddings(const Checkpoint& checkpoint, const EmbeddingTable& table);

}  // namespace mtsa
