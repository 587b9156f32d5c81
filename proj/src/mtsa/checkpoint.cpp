// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

#include "mtsa/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

#include "mtsa/config.hpp"
#include "mtsa/data.hpp"
#include "mtsa/error.hpp"

namespace mtsa {

namespace {

constexpr char kMagic[8] = {'M', 'T', 'S', 'A', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kPrefix = 8 + 4 + 8;

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out += static_cast<char>((value >> (8 * i)) & 0xff);
  }
}

template <typename T>
T get_le(const char* p) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return value;
}

void put_double(std::string& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
double get_double(const char* p) { return std::bit_cast<double>(get_le<std::uint64_t>(p)); }

}  // namespace

namespace {

std::string encode(const Model& model, const std::vector<std::string>& vocabulary,
                   std::uint64_t fingerprint, const nlohmann::json& manifest) {
  nlohmann::json header;
  header["format"] = "mtsa-checkpoint";
  header["config"] = model_config_to_json(model.config());
  header["embedding_fingerprint"] = hex64(fingerprint);
  header["embedding_dim"] = model.config().embedding_dim;
  header["vocabulary"] = vocabulary;
  header["manifest"] = manifest.is_null() ? nlohmann::json::object() : manifest;
  auto tensors = nlohmann::json::array();
  std::string payload;
  for (const auto& p : model.parameters()) {
    tensors.push_back({{"name", p.name},
                       {"shape", p.tensor.shape()},
                       {"count", p.tensor.size()},
                       {"offset", payload.size()}});
    for (double v : p.tensor.values()) put_double(payload, v);
  }
  header["tensors"] = std::move(tensors);

  const std::string text = header.dump();
  std::string out(kMagic, sizeof kMagic);
  put_le(out, kVersion);
  put_le(out, static_cast<std::uint64_t>(text.size()));
  out += text;
  out += payload;
  return out;
}

}  // namespace

std::string serialize_checkpoint(const Model& model, const EmbeddingTable& table,
                                 const nlohmann::json& manifest) {
  return encode(model, table.tokens(), table.fingerprint(), manifest);
}

std::string serialize_checkpoint(const Checkpoint& checkpoint) {
  return encode(checkpoint.model, checkpoint.vocabulary, checkpoint.embedding_fingerprint,
                checkpoint.manifest);
}

namespace {

Checkpoint decode(std::string_view bytes, const std::string& origin) {
  auto bad = [&](const std::string& why) -> void {
    fail(ErrorKind::kParse, origin + ": not a valid checkpoint (" + why + ")");
  };
  if (bytes.size() < kPrefix || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    bad("bad magic");
  }
  const auto version = get_le<std::uint32_t>(bytes.data() + 8);
  if (version != kVersion) bad("unsupported version " + std::to_string(version));
  const auto header_len = get_le<std::uint64_t>(bytes.data() + 12);
  if (header_len > bytes.size() - kPrefix) bad("truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(kPrefix, header_len));
  } catch (const nlohmann::json::exception& e) {
    bad(e.what());
  }
  const std::string_view payload = bytes.substr(kPrefix + header_len);

  Checkpoint ck{Model::build(model_config_from_json(header.at("config"))), {}, 0, {}};
  ck.vocabulary = header.at("vocabulary").get<std::vector<std::string>>();
  ck.embedding_fingerprint =
      std::stoull(header.at("embedding_fingerprint").get<std::string>(), nullptr, 16);
  ck.manifest = header.value("manifest", nlohmann::json::object());

  auto params = ck.model.parameters();
  const auto& entries = header.at("tensors");
  if (entries.size() != params.size()) {
    bad("expected " + std::to_string(params.size()) + " tensors, found " +
        std::to_string(entries.size()));
  }
  std::size_t payload_values = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& e = entries[i];
    auto& p = params[i];
    if (e.at("name").get<std::string>() != p.name) bad("unexpected tensor " + e.at("name").dump());
    if (e.at("shape").get<Shape>() != p.tensor.shape()) bad("shape mismatch for " + p.name);
    const auto count = e.at("count").get<std::size_t>();
    const auto offset = e.at("offset").get<std::size_t>();
    if (count != p.tensor.size() || offset + count * 8 > payload.size()) {
      bad("payload out of range for " + p.name);
    }
    auto values = p.tensor.mutable_values();
    for (std::size_t k = 0; k < count; ++k) values[k] = get_double(payload.data() + offset + 8 * k);
    payload_values += count;
  }
  if (payload.size() != payload_values * 8) {
    bad(std::to_string(payload.size() - payload_values * 8) + " trailing payload bytes");
  }
  return ck;
}

}  // namespace

Checkpoint deserialize_checkpoint(std::string_view bytes, const std::string& origin) {
  try {
    return decode(bytes, origin);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, origin + ": malformed checkpoint header (" + e.what() + ")");
  } catch (const std::logic_error&) {
    fail(ErrorKind::kParse, origin + ": malformed embedding fingerprint");
  }
}

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const EmbeddingTable& table, const nlohmann::json& manifest) {
  write_file(path, serialize_checkpoint(model, table, manifest));
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  write_file(path, serialize_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(read_file(path), path.string());
}

void verify_embeddings(const Checkpoint& checkpoint, const EmbeddingTable& table) {
  if (table.fingerprint() != checkpoint.embedding_fingerprint) {
    fail(ErrorKind::kVocabMismatch,
         "embedding table fingerprint " + hex64(table.fingerprint()) +
             " does not match the checkpoint's " + hex64(checkpoint.embedding_fingerprint) +
             "; load the embedding file the model was trained with");
  }
}

}  // namespace mtsa
