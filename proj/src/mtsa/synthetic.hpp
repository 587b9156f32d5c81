// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

// Seeded synthetic corpora with matching random word vectors, for smoke
// runs without a real corpus.

#pragma once

#include <cstdint>
#include <string>

#include "mtsa/data.hpp"

namespace mtsa {

struct SyntheticSet {
  Corpus corpus;
  EmbeddingTable table;
};

enum class SyntheticKind {
  // Both labels are a function of which marker words occur.
  kSeparable,
  // Sarcastic sentences pair praise with an unpleasant situation and a cue
  // word and are always labelled negative. Sincere positive sentences may
  // praise the same situations, so only the cue separates the two.
  kSarcasticNegative,
};

SyntheticSet make_synthetic(SyntheticKind kind, std::size_t samples, std::size_t dim,
                            std::uint64_t seed);

/// Corpus whose label counts match the given totals exactly (sarcastic
/// samples are always negative). Texts are drawn from a small vocabulary.
Corpus make_label_matched_corpus(std::size_t samples, std::size_t positives,
                                 std::size_t sarcastic, std::uint64_t seed);

/// GloVe text for every token of `table`, 17 significant digits so that the
/// round trip through load_glove is exact.
std::string format_glove(const EmbeddingTable& table);

}  // namespace mtsa
