// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

#include "mtsa/error.hpp"

namespace mtsa {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInput: return "input error";
    case ErrorKind::kSchema: return "schema error";
    case ErrorKind::kValue: return "value error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kDimension: return "dimension error";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kNumeric: return "numerical error";
    case ErrorKind::kContract: return "contract error";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kVocabMismatch: return "vocabulary mismatch";
  }
  return "error";
}

}  // namespace mtsa
