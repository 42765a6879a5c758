// SPDX-License-Identifier: Apache-2.0
//
// Minimal CIF 1.1 reader: enough of the grammar (loops, quoted values,
// semicolon text fields, comments) to pull categories out of the first data
// block of an mmCIF file. Values are views into the caller's buffer.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ppiref::cif {

struct Column {
  std::vector<std::string_view> values;
  std::vector<std::size_t> lines;  // 1-based source line of each value
};

struct Block {
  std::string name;
  // Keys are lower-cased full tags, e.g. "_atom_site.cartn_x".
  std::map<std::string, Column, std::less<>> items;

  const Column* find(std::string_view tag) const;
  /// First value of a tag, with CIF nulls ('.' and '?') reported as absent.
  std::optional<std::string_view> first(std::string_view tag) const;
};

/// Parses the first data block. Throws Error(Format) on malformed syntax.
Block parse_first_block(std::string_view content);

inline bool is_null(std::string_view v) { return v == "." || v == "?"; }

}  // namespace ppiref::cif
