// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ppiref {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Format,
  UnparsableRecord,
  EmptyStructure,
  MissingChain,
  EmptyChain,
  DimensionMismatch,
  UnassignedNode,
  BadAminoAcid,
  BadPosition,
  DuplicateSite,
  IdentityMutation,
  IndexOutOfRange,
  ZeroProbability,
  DegenerateInput,
  SingleClass,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace ppiref
