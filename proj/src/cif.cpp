// SPDX-License-Identifier: Apache-2.0
#include "cif.hpp"

#include <cctype>

#include "ppiref/error.hpp"

namespace ppiref::cif {

namespace {

struct Token {
  std::string_view text;
  std::size_t line = 0;
  bool quoted = false;  // quoted values are never keywords or tags
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  std::optional<Token> next() {
    skip_space_and_comments();
    if (pos_ >= s_.size()) return std::nullopt;
    const char c = s_[pos_];
    if (c == ';' && at_line_start()) return text_field();
    if (c == '\'' || c == '"') return quoted(c);
    const std::size_t begin = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return Token{s_.substr(begin, pos_ - begin), line_, false};
  }

 private:
  bool at_line_start() const { return pos_ == 0 || s_[pos_ - 1] == '\n' || s_[pos_ - 1] == '\r'; }

  void skip_space_and_comments() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Token text_field() {
    const std::size_t start_line = line_;
    const std::size_t begin = ++pos_;
    while (pos_ < s_.size()) {
      if (s_[pos_] == '\n') {
        ++line_;
        if (pos_ + 1 < s_.size() && s_[pos_ + 1] == ';') {
          Token t{s_.substr(begin, pos_ - begin), start_line, true};
          pos_ += 2;
          return t;
        }
      }
      ++pos_;
    }
    fail(ErrorCode::Format, "unterminated text field starting at line " + std::to_string(start_line));
  }

  Token quoted(char q) {
    const std::size_t begin = ++pos_;
    while (pos_ < s_.size()) {
      if (s_[pos_] == '\n') break;
      // A quote closes the value only when followed by whitespace or EOF.
      if (s_[pos_] == q &&
          (pos_ + 1 >= s_.size() || std::isspace(static_cast<unsigned char>(s_[pos_ + 1])))) {
        Token t{s_.substr(begin, pos_ - begin), line_, true};
        ++pos_;
        return t;
      }
      ++pos_;
    }
    fail(ErrorCode::Format, "unterminated quoted value at line " + std::to_string(line_));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  return true;
}

bool is_reserved(const Token& t) {
  return !t.quoted && (starts_with_ci(t.text, "data_") || starts_with_ci(t.text, "loop_") ||
                       starts_with_ci(t.text, "save_") || starts_with_ci(t.text, "global_") ||
                       starts_with_ci(t.text, "stop_"));
}

bool is_tag(const Token& t) { return !t.quoted && !t.text.empty() && t.text.front() == '_'; }

}  // namespace

const Column* Block::find(std::string_view tag) const {
  auto it = items.find(lower(tag));
  return it == items.end() ? nullptr : &it->second;
}

std::optional<std::string_view> Block::first(std::string_view tag) const {
  const Column* col = find(tag);
  if (col == nullptr || col->values.empty() || is_null(col->values.front())) return std::nullopt;
  return col->values.front();
}

Block parse_first_block(std::string_view content) {
  Lexer lex(content);
  Block block;
  bool in_block = false;
  std::optional<Token> tok = lex.next();

  while (tok) {
    if (!tok->quoted && starts_with_ci(tok->text, "data_")) {
      if (in_block) break;  // only the first block is read
      in_block = true;
      block.name = std::string(tok->text.substr(5));
      tok = lex.next();
      continue;
    }
    if (!in_block) fail(ErrorCode::Format, "content before first data_ block at line " + std::to_string(tok->line));

    if (!tok->quoted && starts_with_ci(tok->text, "loop_")) {
      std::vector<std::string> tags;
      tok = lex.next();
      while (tok && is_tag(*tok)) {
        tags.push_back(lower(tok->text));
        tok = lex.next();
      }
      if (tags.empty()) fail(ErrorCode::Format, "loop_ without tags");
      std::vector<Column*> cols;
      for (const auto& t : tags) cols.push_back(&block.items[t]);
      std::size_t n = 0;
      while (tok && !is_tag(*tok) && !is_reserved(*tok)) {
        Column* col = cols[n % cols.size()];
        col->values.push_back(tok->text);
        col->lines.push_back(tok->line);
        ++n;
        tok = lex.next();
      }
      if (n % cols.size() != 0)
        fail(ErrorCode::Format, "loop for " + tags.front() + " has " + std::to_string(n) +
                                    " values, not a multiple of " + std::to_string(cols.size()));
      continue;
    }

    if (is_tag(*tok)) {
      const std::string tag = lower(tok->text);
      std::optional<Token> value = lex.next();
      if (!value || is_tag(*value) || is_reserved(*value))
        fail(ErrorCode::Format, "tag " + tag + " without value at line " + std::to_string(tok->line));
      Column& col = block.items[tag];
      col.values.push_back(value->text);
      col.lines.push_back(value->line);
      tok = lex.next();
      continue;
    }

    if (!tok->quoted && (starts_with_ci(tok->text, "save_") || starts_with_ci(tok->text, "global_"))) {
      tok = lex.next();
      continue;
    }
    fail(ErrorCode::Format, "unexpected value '" + std::string(tok->text) + "' at line " + std::to_string(tok->line));
  }
  if (!in_block) fail(ErrorCode::Format, "no data_ block found");
  return block;
}

}  // namespace ppiref::cif
