// Copyright 2026 The C3 Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "c3/error.hpp"
#include "c3/text.hpp"

namespace c3::java {

enum class TokenKind { kIdentifier, kNumber, kString, kChar, kOperator, kEnd };

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string_view text;  // view into the lexed source
  std::size_t offset = 0;
  int line = 1;
  int column = 1;

  std::size_t end() const { return offset + text.size(); }
  bool is(std::string_view s) const {
    return (kind == TokenKind::kOperator || kind == TokenKind::kIdentifier) && text == s;
  }
  bool is_literal() const { return kind == TokenKind::kNumber || kind == TokenKind::kString; }
};

enum class CommentKind { kLine, kBlock, kDoc };

struct Comment {
  CommentKind kind;
  std::size_t offset;
  std::size_t end;
  int line;
};

struct LexedSource {
  std::string_view source;
  std::vector<Token> tokens;  // always terminated by a kEnd token
  std::vector<Comment> comments;
};

inline bool is_keyword(std::string_view s) {
  static constexpr std::string_view kKeywords[] = {
      "abstract", "assert",     "boolean",   "break",     "byte",      "case",
      "catch",    "char",       "class",     "const",     "continue",  "default",
      "do",       "double",     "else",      "enum",      "extends",   "final",
      "finally",  "float",      "for",       "goto",      "if",        "implements",
      "import",   "instanceof", "int",       "interface", "long",      "native",
      "new",      "package",    "private",   "protected", "public",    "return",
      "short",    "static",     "strictfp",  "super",     "switch",    "synchronized",
      "this",     "throw",      "throws",    "transient", "try",       "void",
      "volatile", "while",      "true"};
  return std::find(std::begin(kKeywords), std::end(kKeywords), s) != std::end(kKeywords) ||
         s == "false" || s == "null";
}

namespace detail {

inline bool ident_start(char c) { return text::is_alpha(c) || c == '_' || c == '$' || text::is_high(c); }
inline bool ident_part(char c) { return ident_start(c) || text::is_digit(c); }

class Lexer {
 public:
  Lexer(std::string_view src, std::string path) : src_(src), path_(std::move(path)) {}

  LexedSource run() {
    LexedSource out;
    out.source = src_;
    while (true) {
      skip_space_and_comments(out.comments);
      if (pos_ >= src_.size()) break;
      out.tokens.push_back(next());
    }
    Token end;
    end.kind = TokenKind::kEnd;
    end.offset = src_.size();
    end.text = src_.substr(src_.size());
    end.line = line_;
    end.column = col();
    out.tokens.push_back(end);
    return out;
  }

 private:
  int col() const { return static_cast<int>(pos_ - line_start_) + 1; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(path_, line_, col(), what); }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        line_start_ = pos_ + 1;
      }
      ++pos_;
    }
  }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void skip_space_and_comments(std::vector<Comment>& comments) {
    while (pos_ < src_.size()) {
      char c = peek();
      if (text::is_space(c)) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        Comment cm{CommentKind::kLine, pos_, 0, line_};
        while (pos_ < src_.size() && peek() != '\n') advance();
        cm.end = pos_;
        comments.push_back(cm);
      } else if (c == '/' && peek(1) == '*') {
        Comment cm{peek(2) == '*' && peek(3) != '/' ? CommentKind::kDoc : CommentKind::kBlock, pos_, 0,
                   line_};
        advance(2);
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) fail("unterminated block comment");
        advance(2);
        cm.end = pos_;
        comments.push_back(cm);
      } else {
        break;
      }
    }
  }

  Token make(TokenKind kind, std::size_t start, int line, int column) const {
    Token t;
    t.kind = kind;
    t.offset = start;
    t.text = src_.substr(start, pos_ - start);
    t.line = line;
    t.column = column;
    return t;
  }

  Token next() {
    const std::size_t start = pos_;
    const int line = line_;
    const int column = col();
    char c = peek();

    if (ident_start(c)) {
      while (pos_ < src_.size() && ident_part(peek())) advance();
      return make(TokenKind::kIdentifier, start, line, column);
    }
    if (text::is_digit(c) || (c == '.' && text::is_digit(peek(1)))) {
      lex_number();
      return make(TokenKind::kNumber, start, line, column);
    }
    if (c == '"') {
      if (peek(1) == '"' && peek(2) == '"') {
        advance(3);
        while (pos_ < src_.size() && !(peek() == '"' && peek(1) == '"' && peek(2) == '"')) {
          if (peek() == '\\') advance();
          advance();
        }
        if (pos_ >= src_.size()) fail("unterminated text block");
        advance(3);
      } else {
        advance();
        while (pos_ < src_.size() && peek() != '"') {
          if (peek() == '\n') fail("unterminated string literal");
          if (peek() == '\\') advance();
          advance();
        }
        if (pos_ >= src_.size()) fail("unterminated string literal");
        advance();
      }
      return make(TokenKind::kString, start, line, column);
    }
    if (c == '\'') {
      advance();
      while (pos_ < src_.size() && peek() != '\'') {
        if (peek() == '\n') fail("unterminated character literal");
        if (peek() == '\\') advance();
        advance();
      }
      if (pos_ >= src_.size()) fail("unterminated character literal");
      advance();
      return make(TokenKind::kChar, start, line, column);
    }

    static constexpr std::string_view kMulti[] = {
        ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=",
        ">=",   "+=",  "-=",  "*=",  "/=",  "%=", "&=", "|=", "^=", "<<", ">>", "@",  "#"};
    for (auto op : kMulti) {
      if (src_.substr(pos_, op.size()) == op) {
        advance(op.size());
        return make(TokenKind::kOperator, start, line, column);
      }
    }
    static constexpr std::string_view kSingle = "(){}[];,.=<>!~?:+-*/&|^%";
    if (kSingle.find(c) != std::string_view::npos) {
      advance();
      return make(TokenKind::kOperator, start, line, column);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  void lex_number() {
    bool hex = peek() == '0' && (peek(1) == 'x' || peek(1) == 'X');
    if (hex || (peek() == '0' && (peek(1) == 'b' || peek(1) == 'B'))) advance(2);
    while (pos_ < src_.size()) {
      char c = peek();
      if (text::is_alnum(c) || c == '_') {
        bool exponent = hex ? (c == 'p' || c == 'P') : (c == 'e' || c == 'E');
        advance();
        if (exponent && (peek() == '+' || peek() == '-')) advance();
      } else if (c == '.' && text::is_digit(peek(1))) {
        advance();
      } else if (c == '.' && !hex && !text::is_alpha(peek(1)) && peek(1) != '.') {
        advance();  // "1." is a valid double literal
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::string path_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::size_t line_start_ = 0;
};

}  // namespace detail

// The returned token views borrow from `source`; keep it alive.
inline LexedSource lex(std::string_view source, std::string path = "<input>") {
  return detail::Lexer(source, std::move(path)).run();
}

// Decodes the value of a string literal token (plain or text block).
inline std::string decode_string_literal(std::string_view lit) {
  std::string_view body;
  bool block = lit.size() >= 6 && lit.substr(0, 3) == "\"\"\"";
  if (block) {
    body = lit.substr(3, lit.size() - 6);
    auto nl = body.find('\n');
    body = nl == std::string_view::npos ? std::string_view{} : body.substr(nl + 1);
  } else if (lit.size() >= 2) {
    body = lit.substr(1, lit.size() - 2);
  }
  std::string out;
  auto append_utf8 = [&out](std::uint32_t cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  };
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c != '\\' || i + 1 >= body.size()) {
      out.push_back(c);
      continue;
    }
    char e = body[++i];
    switch (e) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'r': out.push_back('\r'); break;
      case 'b': out.push_back('\b'); break;
      case 'f': out.push_back('\f'); break;
      case 's': out.push_back(' '); break;
      case '\n': break;  // line continuation in text blocks
      case 'u': {
        while (i + 1 < body.size() && body[i + 1] == 'u') ++i;
        std::uint32_t cp = 0;
        int n = 0;
        while (n < 4 && i + 1 < body.size() && std::isxdigit(static_cast<unsigned char>(body[i + 1]))) {
          char h = body[++i];
          cp = cp * 16 + static_cast<std::uint32_t>(text::is_digit(h) ? h - '0' : (text::to_lower(h) - 'a' + 10));
          ++n;
        }
        append_utf8(cp);
        break;
      }
      default:
        if (e >= '0' && e <= '7') {
          std::uint32_t v = static_cast<std::uint32_t>(e - '0');
          int n = 1;
          while (n < 3 && i + 1 < body.size() && body[i + 1] >= '0' && body[i + 1] <= '7' &&
                 v * 8 + static_cast<std::uint32_t>(body[i + 1] - '0') <= 0377) {
            v = v * 8 + static_cast<std::uint32_t>(body[++i] - '0');
            ++n;
          }
          append_utf8(v);
        } else {
          out.push_back(e);
        }
    }
  }
  return out;
}

}  // namespace c3::java
