// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

// Corpus and embedding ingestion.
//
// Canonical corpus file: UTF-8 delimited text (comma or tab), one header row
// naming at least the columns id, text, sentiment, sarcasm; labels are 0/1
// (sentiment 1 = positive, sarcasm 1 = sarcastic). Other columns, such as
// per-reader gaze measurements, are ignored.

#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mtsa/layers.hpp"

namespace mtsa {

struct Sample {
  std::string id;
  std::string text;
  Tokens tokens;
  int sentiment = 0;
  int sarcasm = 0;
};

struct Corpus {
  std::vector<Sample> samples;
  std::size_t max_len = 0;  // L, longest token count
  std::size_t positives = 0;
  std::size_t sarcastic = 0;

  std::size_t size() const { return samples.size(); }
  /// Sorted, de-duplicated token set.
  std::set<std::string> vocabulary() const;
  /// Recomputes max_len and the label counts from `samples`.
  void refresh_stats();
};

/// Lowercases, splits ASCII punctuation into standalone tokens (apostrophes
/// between letters stay inside the word) and splits on whitespace.
Tokens tokenize(std::string_view text);

/// Reads a canonical corpus file.
Corpus load_corpus(const std::filesystem::path& path);

/// Parses canonical corpus text; `origin` names the source in errors.
Corpus parse_corpus(std::string_view content, const std::string& origin = "<memory>");

/// Reads a corpus in the canonical layout or in a looser upstream layout
/// (aliased column names, textual labels) and normalises it. Gaze and other
/// unknown columns are dropped.
Corpus convert_corpus(std::string_view content, const std::string& origin = "<memory>");

/// Writes the canonical comma-separated form.
std::string format_corpus(const Corpus& corpus);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

struct GloveLoad {
  EmbeddingTable table;
  std::size_t vocabulary_size = 0;
  std::size_t found = 0;
  double coverage() const {
    return vocabulary_size == 0 ? 1.0
                                : static_cast<double>(found) / static_cast<double>(vocabulary_size);
  }
};

/// Loads whitespace-separated GloVe vectors, keeping only `vocabulary`.
/// Every line must carry exactly `dim` values.
GloveLoad load_glove(const std::filesystem::path& path, const std::set<std::string>& vocabulary,
                     std::size_t dim);
GloveLoad parse_glove(std::string_view content, const std::set<std::string>& vocabulary,
                      std::size_t dim, const std::string& origin = "<memory>");

/// 64-bit FNV-1a digest of a file's bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);
std::string hex64(std::uint64_t value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace mtsa
