// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace ppiref::cli {

/// Runs the `ppiref` command line. Data goes to `out` (or files named by
/// --out), diagnostics to `err`. Returns the process exit code: 0 when no
/// error occurred.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ppiref::cli
