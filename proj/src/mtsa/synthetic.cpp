// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

#include "mtsa/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "mtsa/error.hpp"

namespace mtsa {

namespace {

const std::vector<std::string> kPositive = {"love", "great", "happy", "wonderful", "enjoy",
                                            "fantastic", "nice", "awesome"};
const std::vector<std::string> kNegative = {"hate", "awful", "sad", "terrible", "boring",
                                            "horrible", "annoying", "worst"};
// Unpleasant situations: praised sincerely, sarcastically (with a cue) or
// complained about.
const std::vector<std::string> kSituation = {"spilt", "stuck", "traffic", "delayed", "broken",
                                             "rain", "homework", "dentist", "queue", "monday"};
const std::vector<std::string> kCue = {"yeah", "totally", "sure", "obviously"};
const std::vector<std::string> kNeutral = {"the", "a",     "my",      "phone", "day",  "it",
                                           "is",  "this",  "car",     "food",  "was",  "work",
                                           "at",  "again", "weather", "movie", "just", "when"};

const std::string& pick(const std::vector<std::string>& words, Rng& rng) {
  std::uniform_int_distribution<std::size_t> d(0, words.size() - 1);
  return words[d(rng)];
}

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Sample finish(std::vector<std::string> words, int sentiment, int sarcasm, std::size_t idx,
              Rng& rng) {
  for (std::size_t n = uniform(rng, 1, 4); n > 0; --n) words.push_back(pick(kNeutral, rng));
  std::shuffle(words.begin(), words.end(), rng);
  Sample s;
  s.id = "s" + std::to_string(idx);
  for (const auto& w : words) s.text += (s.text.empty() ? "" : " ") + w;
  s.tokens = tokenize(s.text);
  s.sentiment = sentiment;
  s.sarcasm = sarcasm;
  return s;
}

EmbeddingTable random_table(const std::set<std::string>& vocab, std::size_t dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::string> tokens(vocab.begin(), vocab.end());
  std::vector<double> rows(tokens.size() * dim);
  for (auto& v : rows) v = gauss(rng);
  return EmbeddingTable(std::move(tokens), std::move(rows), dim);
}

std::set<std::string> full_vocabulary() {
  std::set<std::string> vocab;
  for (const auto* list : {&kPositive, &kNegative, &kSituation, &kCue, &kNeutral})
    vocab.insert(list->begin(), list->end());
  return vocab;
}

}  // namespace

SyntheticSet make_synthetic(SyntheticKind kind, std::size_t samples, std::size_t dim,
                            std::uint64_t seed) {
  if (samples == 0 || dim == 0) fail(ErrorKind::kInput, "synthetic set needs samples and dim");
  Rng rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Corpus corpus;
  for (std::size_t i = 0; i < samples; ++i) {
    std::vector<std::string> words;
    int sentiment = 0, sarcasm = 0;
    if (kind == SyntheticKind::kSeparable) {
      sentiment = coin(rng) ? 1 : 0;
      sarcasm = coin(rng) ? 1 : 0;
      words.push_back(pick(sentiment ? kPositive : kNegative, rng));
      if (sarcasm) words.push_back(pick(kCue, rng));
    } else {
      // 38.5% positive, 35.2% sarcastic (all negative), rest plainly negative.
      const double u = unit(rng);
      if (u < 0.385) {
        sentiment = 1;
        words.push_back(pick(kPositive, rng));
        if (coin(rng)) words.push_back(pick(kSituation, rng));
      } else if (u < 0.385 + 0.352) {
        sarcasm = 1;
        words.push_back(pick(kPositive, rng));
        words.push_back(pick(kSituation, rng));
        words.push_back(pick(kCue, rng));
      } else {
        words.push_back(coin(rng) ? pick(kNegative, rng) : pick(kSituation, rng));
        if (coin(rng)) words.push_back(pick(kSituation, rng));
      }
    }
    corpus.samples.push_back(finish(std::move(words), sentiment, sarcasm, i, rng));
  }
  corpus.refresh_stats();
  Rng table_rng(seed ^ 0x5eedULL);
  return {std::move(corpus), random_table(full_vocabulary(), dim, table_rng)};
}

Corpus make_label_matched_corpus(std::size_t samples, std::size_t positives,
                                 std::size_t sarcastic, std::uint64_t seed) {
  if (positives + sarcastic > samples) {
    fail(ErrorKind::kInput, "sarcastic samples are negative, so positives + sarcastic <= samples");
  }
  Rng rng(seed);
  Corpus corpus;
  for (std::size_t i = 0; i < samples; ++i) {
    std::vector<std::string> words;
    int sentiment = 0, sarcasm = 0;
    if (i < positives) {
      sentiment = 1;
      words.push_back(pick(kPositive, rng));
    } else if (i < positives + sarcastic) {
      sarcasm = 1;
      words = {pick(kPositive, rng), pick(kSituation, rng)};
    } else {
      words.push_back(pick(kNegative, rng));
    }
    corpus.samples.push_back(finish(std::move(words), sentiment, sarcasm, i, rng));
  }
  corpus.refresh_stats();
  return corpus;
}

std::string format_glove(const EmbeddingTable& table) {
  std::string out;
  char buf[40];
  const auto values = table.matrix().values();
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out += table.tokens()[r];
    for (std::size_t c = 0; c < table.dim(); ++c) {
      std::snprintf(buf, sizeof buf, " %.17g", values[r * table.dim() + c]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace mtsa
