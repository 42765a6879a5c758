// SPDX-License-Identifier: Apache-2.0
#include "ppiref/error.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

#include "ppiref/log.hpp"

namespace ppiref {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Format: return "Format";
    case ErrorCode::UnparsableRecord: return "UnparsableRecord";
    case ErrorCode::EmptyStructure: return "EmptyStructure";
    case ErrorCode::MissingChain: return "MissingChain";
    case ErrorCode::EmptyChain: return "EmptyChain";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnassignedNode: return "UnassignedNode";
    case ErrorCode::BadAminoAcid: return "BadAminoAcid";
    case ErrorCode::BadPosition: return "BadPosition";
    case ErrorCode::DuplicateSite: return "DuplicateSite";
    case ErrorCode::IdentityMutation: return "IdentityMutation";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ZeroProbability: return "ZeroProbability";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::SingleClass: return "SingleClass";
  }
  return "Unknown";
}

namespace {
std::atomic<LogLevel> g_level{LogLevel::Warning};
std::mutex g_log_mutex;

void emit(std::string_view tag, std::string_view message) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::cerr << tag << message << '\n';
}
}  // namespace

void set_log_level(LogLevel level) { g_level.store(level); }
LogLevel log_level() { return g_level.load(); }

void log_warning(std::string_view message) {
  if (g_level.load() >= LogLevel::Warning) emit("warning: ", message);
}

void log_info(std::string_view message) {
  if (g_level.load() >= LogLevel::Info) emit("info: ", message);
}

}  // namespace ppiref
