// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

#pragma once

#include <stdexcept>
#include <string>

namespace mtsa {

/// Failure classes. Each maps onto one status code of the C API and onto an
/// exit-code class of the CLI.
enum class ErrorKind {
  kInput,      // bad caller-supplied data (empty sentence, out-of-range label)
  kSchema,     // corpus file lacks required columns or is empty
  kValue,      // a field parsed but holds an illegal value
  kParse,      // malformed text (GloVe line, checkpoint header)
  kDimension,  // tensor extents do not conform
  kConfig,     // inconsistent hyperparameters
  kNumeric,    // NaN/Inf produced or divergence during training
  kContract,   // API misuse (backward on non-scalar, attention on wrong model)
  kIo,         // file could not be opened or written
  kVocabMismatch,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

const char* to_string(ErrorKind kind) noexcept;

}  // namespace mtsa
