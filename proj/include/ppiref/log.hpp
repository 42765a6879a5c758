// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

namespace ppiref {

enum class LogLevel { Quiet = 0, Warning = 1, Info = 2 };

// Diagnostics go to stderr, serialized across threads.
void set_log_level(LogLevel level);
LogLevel log_level();
void log_warning(std::string_view message);
void log_info(std::string_view message);

}  // namespace ppiref
