// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

#include "mtsa/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "mtsa/error.hpp"

namespace mtsa {

namespace {

struct Record {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

char detect_delimiter(std::string_view content) {
  const auto eol = content.find('\n');
  const std::string_view header = content.substr(0, eol);
  return header.find('\t') != std::string_view::npos ? '\t' : ',';
}

// RFC 4180 style reader: quoted fields may contain delimiters, doubled
// quotes and newlines. Blank lines are skipped.
std::vector<Record> read_delimited(std::string_view content, char delim,
                                   const std::string& origin) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = current.fields.size() == 1 && current.fields[0].empty();
    if (!blank) records.push_back(std::move(current));
    current = Record{};
    current.line = line;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delim) {
      end_field();
    } else if (c == '\r') {
      // tolerated before \n
    } else if (c == '\n') {
      ++line;
      end_record();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) {
    fail(ErrorKind::kParse, origin + ":" + std::to_string(current.line) +
                                ": unterminated quoted field");
  }
  if (field_started || !current.fields.empty()) end_record();
  return records;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string join_columns(const std::vector<std::string>& header) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ", ";
    out += header[i].empty() ? "<empty>" : header[i];
  }
  return out;
}

struct ColumnMap {
  std::optional<std::size_t> id, text, sentiment, sarcasm;
};

ColumnMap map_columns(const std::vector<std::string>& header, bool accept_aliases) {
  static const std::map<std::string, std::vector<std::string>> kAliases = {
      {"id", {"text_id", "textid", "sid", "sample_id", "sentence_id"}},
      {"text", {"sentence", "snippet", "tweet", "content"}},
      {"sentiment", {"polarity", "sentiment_label", "sentiment_tag", "label_sentiment"}},
      {"sarcasm", {"sarcastic", "sarcasm_label", "sarcasm_tag", "label_sarcasm"}},
  };
  ColumnMap map;
  auto bind = [&](const std::string& canonical, std::optional<std::size_t>& slot) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      const std::string name = lower(trim(header[i]));
      bool hit = name == canonical;
      if (!hit && accept_aliases) {
        const auto& alts = kAliases.at(canonical);
        hit = std::find(alts.begin(), alts.end(), name) != alts.end();
      }
      if (hit) {
        slot = i;
        return;
      }
    }
  };
  bind("id", map.id);
  bind("text", map.text);
  bind("sentiment", map.sentiment);
  bind("sarcasm", map.sarcasm);
  return map;
}

std::optional<int> canonical_label(const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "0") return 0;
  if (v == "1") return 1;
  return std::nullopt;
}

std::optional<int> loose_sentiment(const std::string& raw) {
  const std::string v = lower(trim(raw));
  if (v == "1" || v == "1.0" || v == "+1" || v == "positive" || v == "pos" || v == "p") return 1;
  if (v == "0" || v == "0.0" || v == "-1" || v == "negative" || v == "neg" || v == "n") return 0;
  return std::nullopt;
}

std::optional<int> loose_sarcasm(const std::string& raw) {
  const std::string v = lower(trim(raw));
  if (v == "1" || v == "1.0" || v == "yes" || v == "y" || v == "s" || v == "true" ||
      v == "sarcastic" || v == "sarcasm") {
    return 1;
  }
  if (v == "0" || v == "0.0" || v == "-1" || v == "no" || v == "n" || v == "ns" ||
      v == "false" || v == "not_sarcastic" || v == "non-sarcastic" || v == "non_sarcastic") {
    return 0;
  }
  return std::nullopt;
}

Corpus build_corpus(std::string_view content, const std::string& origin, bool loose) {
  const char delim = detect_delimiter(content);
  const auto records = read_delimited(content, delim, origin);
  if (records.empty()) fail(ErrorKind::kSchema, origin + ": empty corpus file (no header)");

  const auto& header = records.front().fields;
  const ColumnMap cols = map_columns(header, loose);
  std::vector<std::string> missing;
  if (!cols.id && !loose) missing.push_back("id");
  if (!cols.text) missing.push_back("text");
  if (!cols.sentiment) missing.push_back("sentiment");
  if (!cols.sarcasm) missing.push_back("sarcasm");
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    fail(ErrorKind::kSchema, origin + ":" + std::to_string(records.front().line) +
                                 ": missing column(s) " + names + "; found columns: " +
                                 join_columns(header));
  }

  Corpus corpus;
  std::unordered_set<std::string> ids;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const Record& rec = records[r];
    const std::string where = origin + ":" + std::to_string(rec.line);
    if (rec.fields.size() != header.size()) {
      fail(ErrorKind::kSchema, where + ": expected " + std::to_string(header.size()) +
                                   " fields, found " + std::to_string(rec.fields.size()));
    }
    Sample s;
    s.id = cols.id ? trim(rec.fields[*cols.id]) : std::to_string(r);
    if (s.id.empty()) fail(ErrorKind::kValue, where + ": empty id");
    if (!ids.insert(s.id).second) fail(ErrorKind::kValue, where + ": duplicate id '" + s.id + "'");
    s.text = trim(rec.fields[*cols.text]);

    const std::string& raw_sen = rec.fields[*cols.sentiment];
    const std::string& raw_sar = rec.fields[*cols.sarcasm];
    const auto sen = loose ? loose_sentiment(raw_sen) : canonical_label(raw_sen);
    const auto sar = loose ? loose_sarcasm(raw_sar) : canonical_label(raw_sar);
    if (!sen) {
      fail(ErrorKind::kValue, where + ": sample '" + s.id + "' has non-binary sentiment '" +
                                  raw_sen + "'");
    }
    if (!sar) {
      fail(ErrorKind::kValue, where + ": sample '" + s.id + "' has non-binary sarcasm '" +
                                  raw_sar + "'");
    }
    s.sentiment = *sen;
    s.sarcasm = *sar;
    try {
      s.tokens = tokenize(s.text);
    } catch (const Error&) {
      fail(ErrorKind::kValue, where + ": sample '" + s.id + "' has no text");
    }
    corpus.samples.push_back(std::move(s));
  }
  corpus.refresh_stats();
  return corpus;
}

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

void append_field(std::string& out, const std::string& s) {
  if (!needs_quotes(s)) {
    out += s;
    return;
  }
  out += '"';
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

}  // namespace

// ---------------------------------------------------------------------------

std::set<std::string> Corpus::vocabulary() const {
  std::set<std::string> vocab;
  for (const auto& s : samples) vocab.insert(s.tokens.begin(), s.tokens.end());
  return vocab;
}

void Corpus::refresh_stats() {
  max_len = 0;
  positives = 0;
  sarcastic = 0;
  for (const auto& s : samples) {
    max_len = std::max(max_len, s.tokens.size());
    positives += s.sentiment == 1;
    sarcastic += s.sarcasm == 1;
  }
}

Tokens tokenize(std::string_view text) {
  auto is_word = [](unsigned char c) { return c >= 0x80 || std::isalnum(c); };
  Tokens tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      flush();
    } else if (c < 0x80 && std::ispunct(c)) {
      const bool inner_apostrophe = c == '\'' && !current.empty() && i + 1 < text.size() &&
                                    is_word(static_cast<unsigned char>(text[i + 1]));
      if (inner_apostrophe) {
        current += '\'';
      } else {
        flush();
        tokens.emplace_back(1, static_cast<char>(c));
      }
    } else {
      current += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    }
  }
  flush();
  if (tokens.empty()) fail(ErrorKind::kInput, "text contains no tokens");
  return tokens;
}

Corpus parse_corpus(std::string_view content, const std::string& origin) {
  return build_corpus(content, origin, false);
}

Corpus convert_corpus(std::string_view content, const std::string& origin) {
  return build_corpus(content, origin, true);
}

Corpus load_corpus(const std::filesystem::path& path) {
  return parse_corpus(read_file(path), path.string());
}

std::string format_corpus(const Corpus& corpus) {
  std::string out = "id,text,sentiment,sarcasm\n";
  for (const auto& s : corpus.samples) {
    append_field(out, s.id);
    out += ',';
    append_field(out, s.text);
    out += ',';
    out += std::to_string(s.sentiment);
    out += ',';
    out += std::to_string(s.sarcasm);
    out += '\n';
  }
  return out;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_file(path, format_corpus(corpus));
}

// ---------------------------------------------------------------------------
// GloVe

GloveLoad read_glove(std::istream& in, const std::set<std::string>& vocabulary,
                     std::size_t dim, const std::string& origin) {
  std::vector<std::string> tokens;
  std::vector<double> rows;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::string buffer;
  while (std::getline(in, buffer)) {
    ++line_no;
    std::string_view line = buffer;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    const std::string where = origin + ":" + std::to_string(line_no);
    std::size_t cursor = 0;
    auto next_field = [&]() -> std::string_view {
      while (cursor < line.size() && (line[cursor] == ' ' || line[cursor] == '\t')) ++cursor;
      const std::size_t start = cursor;
      while (cursor < line.size() && line[cursor] != ' ' && line[cursor] != '\t') ++cursor;
      return line.substr(start, cursor - start);
    };

    const std::string token(next_field());
    const bool wanted = vocabulary.count(token) != 0 && !seen.count(token);
    std::vector<double> values;
    std::size_t count = 0;
    for (std::string_view f = next_field(); !f.empty(); f = next_field()) {
      ++count;
      if (!wanted) continue;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        fail(ErrorKind::kParse, where + ": malformed value '" + std::string(f) + "'");
      }
      values.push_back(v);
    }
    if (count == 0) fail(ErrorKind::kParse, where + ": token '" + token + "' has no vector");
    if (count != dim) {
      fail(ErrorKind::kDimension, where + ": expected " + std::to_string(dim) +
                                      " values, found " + std::to_string(count));
    }
    if (wanted) {
      seen.insert(token);
      tokens.push_back(token);
      rows.insert(rows.end(), values.begin(), values.end());
    }
  }
  GloveLoad out;
  out.vocabulary_size = vocabulary.size();
  out.found = tokens.size();
  out.table = EmbeddingTable(std::move(tokens), std::move(rows), dim);
  return out;
}

GloveLoad parse_glove(std::string_view content, const std::set<std::string>& vocabulary,
                      std::size_t dim, const std::string& origin) {
  std::istringstream in{std::string(content)};
  return read_glove(in, vocabulary, dim, origin);
}

GloveLoad load_glove(const std::filesystem::path& path, const std::set<std::string>& vocabulary,
                     std::size_t dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  return read_glove(in, vocabulary, dim, path.string());
}

// ---------------------------------------------------------------------------
// Files

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorKind::kIo, "short write to " + path.string());
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::uint64_t h = 14695981039346656037ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  return hex64(h);
}

}  // namespace mtsa
