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

// Source-level model of the code under test and of test code: primitive-type
// parameter sites and the literal test inputs bound to them.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "c3/context_registry.hpp"
#include "c3/error.hpp"
#include "c3/java_lexer.hpp"
#include "c3/text.hpp"

namespace c3 {

enum class DeclaredType { kString, kByte, kShort, kInt, kLong, kFloat, kDouble };

inline std::string_view to_string(DeclaredType t) {
  switch (t) {
    case DeclaredType::kString: return "STRING";
    case DeclaredType::kByte: return "BYTE";
    case DeclaredType::kShort: return "SHORT";
    case DeclaredType::kInt: return "INT";
    case DeclaredType::kLong: return "LONG";
    case DeclaredType::kFloat: return "FLOAT";
    case DeclaredType::kDouble: return "DOUBLE";
  }
  return "?";
}

inline DeclaredType parse_declared_type(std::string_view s) {
  if (s == "STRING") return DeclaredType::kString;
  if (s == "BYTE") return DeclaredType::kByte;
  if (s == "SHORT") return DeclaredType::kShort;
  if (s == "INT") return DeclaredType::kInt;
  if (s == "LONG") return DeclaredType::kLong;
  if (s == "FLOAT") return DeclaredType::kFloat;
  if (s == "DOUBLE") return DeclaredType::kDouble;
  throw Error(ErrorKind::kParse, "unknown declared type '" + std::string(s) + "'");
}

inline TypeGroup group_of(DeclaredType t) {
  return t == DeclaredType::kString ? TypeGroup::kString : TypeGroup::kNumber;
}

// Maps a source-level type spelling to a declared type; char, boolean, boxed
// types, arrays and every other reference type yield nullopt.
inline std::optional<DeclaredType> classify_type(std::string_view spelled) {
  if (spelled == "String" || spelled == "java.lang.String") return DeclaredType::kString;
  if (spelled == "byte") return DeclaredType::kByte;
  if (spelled == "short") return DeclaredType::kShort;
  if (spelled == "int") return DeclaredType::kInt;
  if (spelled == "long") return DeclaredType::kLong;
  if (spelled == "float") return DeclaredType::kFloat;
  if (spelled == "double") return DeclaredType::kDouble;
  return std::nullopt;
}

// Operators tracked for number parameters, in canonical order.
inline const std::vector<std::string>& tracked_operators() {
  static const std::vector<std::string> ops = {"|", "&", "^",  "~", "<<", ">>",
                                               ">>>", "%", "+", "-", "*",  "/"};
  return ops;
}

struct SiteKey {
  std::string class_id;
  std::string method_sig;
  int param_index = 0;

  friend auto operator<=>(const SiteKey&, const SiteKey&) = default;
  std::string to_string() const {
    return class_id + "#" + method_sig + "@" + std::to_string(param_index);
  }
};

struct ParameterSite {
  std::string class_id;
  std::string method_sig;
  std::string method_name;
  bool is_constructor = false;
  std::string param_name;
  int param_index = 0;
  DeclaredType declared_type = DeclaredType::kString;
  std::string method_source;
  std::vector<std::string> operators;  // canonical order; empty for STRING sites
  int line = 0;

  SiteKey key() const { return {class_id, method_sig, param_index}; }
  TypeGroup group() const { return group_of(declared_type); }
  friend bool operator==(const ParameterSite&, const ParameterSite&) = default;
};

enum class UnitKind { kCodeUnderTest, kTest };

struct SourceUnit {
  std::string path;
  std::string text;
  UnitKind kind = UnitKind::kCodeUnderTest;
};

inline SourceUnit read_source_unit(const std::filesystem::path& path, UnitKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return SourceUnit{path.string(), ss.str(), kind};
}

enum class InputOrigin { kDirectLiteral, kLocalVarLiteral, kFinalStaticField };

inline std::string_view to_string(InputOrigin o) {
  switch (o) {
    case InputOrigin::kDirectLiteral: return "DIRECT_LITERAL";
    case InputOrigin::kLocalVarLiteral: return "LOCAL_VAR_LITERAL";
    case InputOrigin::kFinalStaticField: return "FINAL_STATIC_FIELD";
  }
  return "?";
}

inline InputOrigin parse_input_origin(std::string_view s) {
  if (s == "DIRECT_LITERAL") return InputOrigin::kDirectLiteral;
  if (s == "LOCAL_VAR_LITERAL") return InputOrigin::kLocalVarLiteral;
  if (s == "FINAL_STATIC_FIELD") return InputOrigin::kFinalStaticField;
  throw Error(ErrorKind::kParse, "unknown input origin '" + std::string(s) + "'");
}

struct BoundInput {
  SiteKey site;
  std::string param_name;
  DeclaredType declared_type = DeclaredType::kString;
  std::string literal_text;  // verbatim, including quotes for strings
  TypeGroup value_kind = TypeGroup::kString;
  InputOrigin origin = InputOrigin::kDirectLiteral;
  std::string test_id;
  std::size_t offset = 0;       // byte offset of literal_text in the test source
  std::size_t call_offset = 0;  // byte offset of the invocation's name token
  int line = 0;

  // Decoded value: string content for strings, literal text for numbers.
  std::string value() const {
    return value_kind == TypeGroup::kString ? java::decode_string_literal(literal_text)
                                            : literal_text;
  }
  friend bool operator==(const BoundInput&, const BoundInput&) = default;
};

namespace java {

struct ParamDecl {
  std::string type_text;
  std::string name;
  int line = 0;
};

struct MethodDecl {
  std::string name;
  bool is_constructor = false;
  std::vector<ParamDecl> params;
  std::size_t body_open = 0;   // token index of '{'; 0 when there is no body
  std::size_t body_close = 0;  // token index of the matching '}'
  std::size_t source_begin = 0;
  std::size_t source_end = 0;
  int line = 0;

  std::string signature() const {
    std::string sig = name + "(";
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (i) sig += ",";
      sig += params[i].type_text;
    }
    return sig + ")";
  }
  bool has_body() const { return body_open != 0; }
};

struct FieldDecl {
  std::string name;
  bool is_static = false;
  bool is_final = false;
  std::size_t init_begin = 0;  // token range of the initializer, [begin, end)
  std::size_t init_end = 0;
};

struct TypeDecl {
  std::string qualified_name;
  std::string simple_name;
  std::vector<MethodDecl> methods;
  std::vector<FieldDecl> fields;
};

struct ParsedUnit {
  LexedSource lexed;
  std::string package;
  std::vector<TypeDecl> types;  // nested types flattened, outer first
};

namespace detail {

class Parser {
 public:
  Parser(LexedSource lexed, std::string path) : path_(std::move(path)) {
    unit_.lexed = std::move(lexed);
  }

  ParsedUnit run() && {
    if (at("package")) {
      ++pos_;
      unit_.package = qualified_name();
      expect(";");
    }
    while (at("import")) {
      while (!at(";")) {
        if (tok().kind == TokenKind::kEnd) fail("unterminated import");
        ++pos_;
      }
      ++pos_;
    }
    while (tok().kind != TokenKind::kEnd) {
      if (at(";")) {
        ++pos_;
        continue;
      }
      skip_modifiers();
      if (!try_type_declaration("")) fail("expected a type declaration");
    }
    return std::move(unit_);
  }

 private:
  const std::vector<Token>& toks() const { return unit_.lexed.tokens; }
  const Token& tok(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks().size() - 1);
    return toks()[i];
  }
  bool at(std::string_view s, std::size_t ahead = 0) const { return tok(ahead).is(s); }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = tok();
    throw ParseError(path_, t.line, t.column,
                     what + (t.kind == TokenKind::kEnd ? " (at end of input)"
                                                       : " near '" + std::string(t.text) + "'"));
  }

  void expect(std::string_view s) {
    if (!at(s)) fail("expected '" + std::string(s) + "'");
    ++pos_;
  }

  std::string ident() {
    if (tok().kind != TokenKind::kIdentifier) fail("expected identifier");
    return std::string(toks()[pos_++].text);
  }

  std::string qualified_name() {
    std::string name = ident();
    while (at(".") && tok(1).kind == TokenKind::kIdentifier) {
      pos_ += 1;
      name += "." + ident();
    }
    if (at(".") && at("*", 1)) {
      pos_ += 2;
      name += ".*";
    }
    return name;
  }

  // Index of the token closing the bracket opened at `open`.
  std::size_t match(std::size_t open) const {
    std::string_view o = toks()[open].text;
    std::string_view c = o == "(" ? ")" : o == "{" ? "}" : "]";
    int depth = 0;
    for (std::size_t i = open; i < toks().size(); ++i) {
      const Token& t = toks()[i];
      if (t.kind == TokenKind::kEnd) break;
      if (t.is(o)) ++depth;
      if (t.is(c) && --depth == 0) return i;
    }
    const Token& t = toks()[open];
    throw ParseError(path_, t.line, t.column, "unbalanced '" + std::string(o) + "'");
  }

  void skip_annotation() {
    ++pos_;  // '@'
    if (at("interface")) return;
    qualified_name();
    if (at("(")) pos_ = match(pos_) + 1;
  }

  // Skips annotations and modifiers; returns the modifier words seen.
  std::set<std::string> skip_modifiers() {
    static const std::set<std::string, std::less<>> kModifiers = {
        "public",   "protected",    "private",   "static",   "final",    "abstract",
        "native",   "synchronized", "transient", "volatile", "strictfp", "default",
        "sealed"};
    std::set<std::string> seen;
    for (;;) {
      if (at("@") && !at("interface", 1)) {
        skip_annotation();
      } else if (tok().kind == TokenKind::kIdentifier && kModifiers.count(tok().text) &&
                 !(tok().text == "default" && at(":", 1))) {
        seen.emplace(tok().text);
        ++pos_;
      } else if (at("non") && at("-", 1) && at("sealed", 2)) {
        pos_ += 3;
      } else {
        return seen;
      }
    }
  }

  // Skips a generic argument/parameter list starting at '<'.
  void skip_angle() {
    int depth = 0;
    do {
      const Token& t = tok();
      if (t.kind == TokenKind::kEnd) fail("unterminated type argument list");
      if (t.is("<")) depth += 1;
      else if (t.is(">")) depth -= 1;
      else if (t.is(">>")) depth -= 2;
      else if (t.is(">>>")) depth -= 3;
      else if (t.is("(")) {
        pos_ = match(pos_);
      }
      ++pos_;
    } while (depth > 0);
  }

  // Skips a type and returns its spelling with whitespace removed.
  std::string skip_type() {
    std::size_t begin = pos_;
    while (at("@")) skip_annotation();
    if (at("?")) {
      ++pos_;
    } else {
      ident();
    }
    for (;;) {
      if (at("<")) {
        skip_angle();
      } else if (at(".") && tok(1).kind == TokenKind::kIdentifier) {
        pos_ += 2;
      } else if (at("[") && at("]", 1)) {
        pos_ += 2;
      } else if (at("...")) {
        ++pos_;
      } else {
        break;
      }
    }
    std::string spelled;
    for (std::size_t i = begin; i < pos_; ++i) spelled.append(toks()[i].text);
    return spelled;
  }

  bool try_type_declaration(const std::string& outer) {
    bool annotation_type = at("@") && at("interface", 1);
    if (!annotation_type && !at("class") && !at("interface") && !at("enum") && !at("record")) {
      return false;
    }
    bool is_enum = at("enum");
    pos_ += annotation_type ? 2 : 1;
    TypeDecl decl;
    decl.simple_name = ident();
    std::string prefix = outer.empty() ? (unit_.package.empty() ? "" : unit_.package + ".") : outer + ".";
    decl.qualified_name = prefix + decl.simple_name;
    while (!at("{")) {
      if (tok().kind == TokenKind::kEnd) fail("expected class body");
      if (at("(")) {
        pos_ = match(pos_) + 1;
      } else if (at("<")) {
        skip_angle();
      } else {
        ++pos_;
      }
    }
    std::size_t index = unit_.types.size();
    unit_.types.push_back(std::move(decl));
    parse_body(index, is_enum);
    return true;
  }

  void parse_body(std::size_t type_index, bool is_enum) {
    std::size_t close = match(pos_);
    ++pos_;
    if (is_enum) {
      while (pos_ < close && !at(";")) {
        if (at("(") || at("{")) pos_ = match(pos_);
        ++pos_;
      }
      if (pos_ < close) ++pos_;
    }
    const std::string qualified = unit_.types[type_index].qualified_name;
    const std::string simple = unit_.types[type_index].simple_name;
    while (pos_ < close) {
      if (at(";")) {
        ++pos_;
        continue;
      }
      std::size_t member_begin = pos_;
      auto modifiers = skip_modifiers();
      if (try_type_declaration(qualified)) continue;
      if (at("{")) {
        pos_ = match(pos_) + 1;
        continue;
      }
      if (at("<")) skip_angle();

      if (tok().kind == TokenKind::kIdentifier && tok().text == simple && at("{", 1)) {
        pos_ = match(pos_ + 1) + 1;  // compact record constructor
        continue;
      }

      MethodDecl method;
      bool is_ctor = tok().kind == TokenKind::kIdentifier && tok().text == simple && at("(", 1);
      if (is_ctor) {
        method.name = ident();
        method.is_constructor = true;
      } else {
        skip_type();
        std::size_t name_pos = pos_;
        std::string name = ident();
        if (!at("(")) {
          pos_ = name_pos;
          parse_fields(type_index, modifiers, close);
          continue;
        }
        method.name = name;
      }
      method.line = toks()[member_begin].line;
      parse_params(method);
      while (at("[")) pos_ = match(pos_) + 1;
      while (!at("{") && !at(";")) {
        if (pos_ >= close) fail("expected method body");
        ++pos_;
      }
      if (at("{")) {
        method.body_open = pos_;
        method.body_close = match(pos_);
        pos_ = method.body_close + 1;
      } else {
        ++pos_;
      }
      method.source_begin = attached_comment_start(member_begin);
      method.source_end = toks()[pos_ - 1].end();
      unit_.types[type_index].methods.push_back(std::move(method));
    }
    pos_ = close + 1;
  }

  // Leading comments directly above a member belong to its source text.
  std::size_t attached_comment_start(std::size_t member_token) const {
    std::size_t begin = toks()[member_token].offset;
    std::size_t gap_start = member_token == 0 ? 0 : toks()[member_token - 1].end();
    for (const auto& c : unit_.lexed.comments) {
      if (c.offset >= gap_start && c.end <= begin) return c.offset;
    }
    return begin;
  }

  void parse_params(MethodDecl& method) {
    std::size_t close = match(pos_);
    ++pos_;
    while (pos_ < close) {
      std::size_t begin = pos_;
      int depth = 0;
      while (pos_ < close) {
        const Token& t = tok();
        if (t.is("(") || t.is("[")) {
          pos_ = match(pos_) + 1;
          continue;
        }
        if (t.is("<")) ++depth;
        if (t.is(">")) --depth;
        if (t.is(">>")) depth -= 2;
        if (t.is(">>>")) depth -= 3;
        if (t.is(",") && depth <= 0) break;
        ++pos_;
      }
      std::size_t end = pos_;
      if (end > begin) method.params.push_back(param_from(begin, end));
      if (at(",")) ++pos_;
    }
    pos_ = close + 1;
  }

  ParamDecl param_from(std::size_t begin, std::size_t end) {
    std::size_t saved = pos_;
    pos_ = begin;
    skip_modifiers();
    ParamDecl p;
    p.line = tok().line;
    p.type_text = skip_type();
    if (pos_ < end && tok().kind == TokenKind::kIdentifier) p.name = std::string(tok().text);
    ++pos_;
    while (pos_ + 1 < end + 1 && at("[") && at("]", 1)) {
      p.type_text += "[]";
      pos_ += 2;
    }
    pos_ = saved;
    return p;
  }

  void parse_fields(std::size_t type_index, const std::set<std::string>& modifiers,
                    std::size_t close) {
    for (;;) {
      FieldDecl f;
      f.name = ident();
      f.is_static = modifiers.count("static") > 0;
      f.is_final = modifiers.count("final") > 0;
      while (at("[")) pos_ = match(pos_) + 1;
      if (at("=")) {
        ++pos_;
        f.init_begin = pos_;
        int angle = 0;
        while (angle > 0 || (!at(",") && !at(";"))) {
          if (pos_ >= close) fail("unterminated field declaration");
          if (at("(") || at("{") || at("[")) {
            pos_ = match(pos_) + 1;
            continue;
          }
          // `new HashMap<K, V>()`: a '<' after a type name opens type arguments.
          const Token& prev = toks()[pos_ - 1];
          if (at("<") && prev.kind == TokenKind::kIdentifier && text::is_upper(prev.text.front())) ++angle;
          if (angle > 0 && at(">")) angle -= 1;
          if (angle > 0 && at(">>")) angle = std::max(0, angle - 2);
          if (angle > 0 && at(">>>")) angle = std::max(0, angle - 3);
          if (at(";")) angle = 0;
          ++pos_;
        }
        f.init_end = pos_;
      }
      unit_.types[type_index].fields.push_back(std::move(f));
      if (at(",")) {
        ++pos_;
        continue;
      }
      expect(";");
      return;
    }
  }

  ParsedUnit unit_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ParsedUnit parse(std::string_view source, const std::string& path) {
  return detail::Parser(lex(source, path), path).run();
}

}  // namespace java

namespace detail {

inline std::string compound_base(std::string_view op) {
  if (op.size() >= 2 && op.back() == '=' && op != "==" && op != "!=" && op != "<=" && op != ">=") {
    return std::string(op.substr(0, op.size() - 1));
  }
  return std::string(op);
}

inline bool is_tracked_operator(const std::string& op) {
  const auto& ops = tracked_operators();
  return std::find(ops.begin(), ops.end(), op) != ops.end();
}

inline std::vector<std::string> operators_on(const java::ParsedUnit& unit,
                                             const java::MethodDecl& m,
                                             const std::string& param) {
  std::set<std::string> found;
  if (!m.has_body()) return {};
  const auto& toks = unit.lexed.tokens;
  for (std::size_t i = m.body_open + 1; i < m.body_close; ++i) {
    const auto& t = toks[i];
    if (t.kind != java::TokenKind::kIdentifier || t.text != param) continue;
    if (toks[i - 1].is(".") || toks[i + 1].is("(")) continue;
    std::size_t before = i - 1;
    while (before > m.body_open && toks[before].is("(")) --before;
    std::size_t after = i + 1;
    while (after < m.body_close && toks[after].is(")")) ++after;
    for (std::size_t idx : {before, after}) {
      if (toks[idx].kind != java::TokenKind::kOperator) continue;
      std::string op = compound_base(toks[idx].text);
      if (is_tracked_operator(op)) found.insert(op);
    }
  }
  std::vector<std::string> ordered;
  for (const auto& op : tracked_operators())
    if (found.count(op)) ordered.push_back(op);
  return ordered;
}

}  // namespace detail

// One site per string/numeric parameter of every method and constructor.
inline std::vector<ParameterSite> extract_parameters(const SourceUnit& unit) {
  java::ParsedUnit parsed = java::parse(unit.text, unit.path);
  std::vector<ParameterSite> sites;
  for (const auto& type : parsed.types) {
    for (const auto& m : type.methods) {
      const std::string sig = m.signature();
      const std::string source = unit.text.substr(m.source_begin, m.source_end - m.source_begin);
      for (std::size_t i = 0; i < m.params.size(); ++i) {
        auto declared = classify_type(m.params[i].type_text);
        if (!declared) continue;
        ParameterSite s;
        s.class_id = type.qualified_name;
        s.method_sig = sig;
        s.method_name = m.name;
        s.is_constructor = m.is_constructor;
        s.param_name = m.params[i].name;
        s.param_index = static_cast<int>(i);
        s.declared_type = *declared;
        s.method_source = source;
        s.line = m.params[i].line;
        if (group_of(*declared) == TypeGroup::kNumber) {
          s.operators = detail::operators_on(parsed, m, s.param_name);
        }
        sites.push_back(std::move(s));
      }
    }
  }
  return sites;
}

namespace detail {

struct LiteralSpan {
  std::size_t begin = 0;  // byte offsets into the source
  std::size_t end = 0;
  java::TokenKind kind = java::TokenKind::kEnd;
};

// A whole literal argument: `"x"`, `42`, `-42`, `+1.5`.
inline std::optional<LiteralSpan> literal_in(const std::vector<java::Token>& toks, std::size_t begin,
                                             std::size_t end) {
  if (end == begin + 1 && toks[begin].is_literal()) {
    return LiteralSpan{toks[begin].offset, toks[begin].end(), toks[begin].kind};
  }
  if (end == begin + 2 && (toks[begin].is("-") || toks[begin].is("+")) &&
      toks[begin + 1].kind == java::TokenKind::kNumber) {
    return LiteralSpan{toks[begin].offset, toks[begin + 1].end(), java::TokenKind::kNumber};
  }
  return std::nullopt;
}

// Parameter type list parsed back out of a signature such as "f(int,String)".
inline std::vector<std::string> signature_types(std::string_view sig) {
  auto open = sig.find('(');
  auto close = sig.rfind(')');
  std::vector<std::string> out;
  if (open == std::string_view::npos || close == std::string_view::npos || close == open + 1) return out;
  std::string_view inner = sig.substr(open + 1, close - open - 1);
  int depth = 0;
  std::string cur;
  for (char c : inner) {
    if (c == '<') ++depth;
    if (c == '>') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
      continue;
    }
    cur.push_back(c);
  }
  out.push_back(cur);
  return out;
}

inline bool literal_fits(java::TokenKind kind, std::string_view literal, const std::string& type) {
  static const std::set<std::string, std::less<>> kNumeric = {"byte", "short", "int", "long",
                                                              "float", "double", "Integer", "Long",
                                                              "Short", "Byte", "Float", "Double",
                                                              "Number", "Object"};
  if (kind == java::TokenKind::kString)
    return type == "String" || type == "java.lang.String" || type == "Object" || type == "CharSequence";
  if (kind == java::TokenKind::kNumber) return kNumeric.count(type) > 0;
  if (kind == java::TokenKind::kChar) return type == "char" || type == "Character" || type == "int";
  if (literal == "true" || literal == "false") return type == "boolean" || type == "Boolean";
  if (literal == "null") return classify_type(type) != DeclaredType::kByte && type != "int" &&
                                type != "long" && type != "short" && type != "float" &&
                                type != "double" && type != "byte" && type != "char" &&
                                type != "boolean";
  return true;
}

}  // namespace detail

// Binds literal arguments of calls to methods owning `sites`. Admitted argument
// forms: a direct literal, a local variable initialized with a literal in the
// same test method, or a final static field of the test class initialized
// with a literal. Anything else is skipped.
inline std::vector<BoundInput> extract_test_inputs(const SourceUnit& test,
                                                   const std::vector<ParameterSite>& sites) {
  java::ParsedUnit parsed = java::parse(test.text, test.path);
  const auto& toks = parsed.lexed.tokens;
  std::vector<BoundInput> inputs;
  if (sites.empty()) return inputs;

  struct Target {
    std::string method_sig;
    std::vector<std::string> types;
    std::map<int, const ParameterSite*> by_index;
  };
  // Keyed by (is_constructor, simple name); targets kept in first-seen order.
  std::map<std::pair<bool, std::string>, std::vector<Target>> targets;
  for (const auto& s : sites) {
    std::string simple = s.method_name;
    auto& list = targets[{s.is_constructor, simple}];
    auto it = std::find_if(list.begin(), list.end(), [&](const Target& t) {
      return t.method_sig == s.method_sig;
    });
    if (it == list.end()) {
      list.push_back(Target{s.method_sig, detail::signature_types(s.method_sig), {}});
      it = std::prev(list.end());
    }
    it->by_index[s.param_index] = &s;
  }

  for (const auto& type : parsed.types) {
    std::map<std::string, detail::LiteralSpan> statics;
    for (const auto& f : type.fields) {
      if (!f.is_static || !f.is_final || f.init_begin == f.init_end) continue;
      if (auto lit = detail::literal_in(toks, f.init_begin, f.init_end)) statics[f.name] = *lit;
    }

    for (const auto& m : type.methods) {
      if (!m.has_body()) continue;
      const std::string test_id = type.qualified_name + "." + m.name;
      std::map<std::string, detail::LiteralSpan> locals;

      for (std::size_t i = m.body_open + 1; i < m.body_close; ++i) {
        const auto& t = toks[i];
        if (t.kind != java::TokenKind::kIdentifier) continue;

        // `Type name = literal;` declares; `name = ...` reassigns.
        if (toks[i + 1].is("=")) {
          const auto& prev = toks[i - 1];
          bool declaration = (prev.kind == java::TokenKind::kIdentifier && !java::is_keyword(prev.text)) ||
                             prev.is("]") || prev.is(">") ||
                             (prev.kind == java::TokenKind::kIdentifier &&
                              classify_type(prev.text).has_value()) ||
                             prev.is("int") || prev.is("long") || prev.is("short") ||
                             prev.is("byte") || prev.is("float") || prev.is("double");
          if (declaration && toks[i - 2].is(".")) declaration = false;
          std::size_t init_end = i + 2;
          while (init_end < m.body_close && !toks[init_end].is(";") && !toks[init_end].is(",") &&
                 !toks[init_end].is(")")) {
            ++init_end;
          }
          auto lit = detail::literal_in(toks, i + 2, init_end);
          std::string name(t.text);
          if (declaration && lit) {
            locals[name] = *lit;
          } else {
            locals.erase(name);
          }
          continue;
        }

        if (!toks[i + 1].is("(") && !(toks[i + 1].is("<") && toks[i + 2].is(">") && toks[i + 3].is("("))) {
          continue;
        }
        if (java::is_keyword(t.text)) continue;
        bool is_new = false;
        {
          std::size_t k = i;
          while (k >= 2 && toks[k - 1].is(".") && toks[k - 2].kind == java::TokenKind::kIdentifier) k -= 2;
          is_new = k >= 1 && toks[k - 1].is("new");
        }
        auto found = targets.find({is_new, std::string(t.text)});
        if (found == targets.end()) continue;

        std::size_t open = toks[i + 1].is("(") ? i + 1 : i + 3;
        // Argument token ranges split on top-level commas.
        std::vector<std::pair<std::size_t, std::size_t>> args;
        {
          int depth = 0;
          std::size_t start = open + 1;
          std::size_t k = open + 1;
          for (; k < m.body_close; ++k) {
            const auto& a = toks[k];
            if (a.is("(") || a.is("{") || a.is("[")) ++depth;
            if (a.is(")") || a.is("}") || a.is("]")) {
              if (depth == 0) break;
              --depth;
            }
            if (a.is(",") && depth == 0) {
              args.emplace_back(start, k);
              start = k + 1;
            }
          }
          if (k > start || !args.empty()) args.emplace_back(start, k);
        }

        auto resolve = [&](std::size_t b, std::size_t e) -> std::optional<std::pair<detail::LiteralSpan, InputOrigin>> {
          if (auto lit = detail::literal_in(toks, b, e)) return std::pair{*lit, InputOrigin::kDirectLiteral};
          std::string name;
          if (e == b + 1 && toks[b].kind == java::TokenKind::kIdentifier) {
            name = std::string(toks[b].text);
            if (auto it = locals.find(name); it != locals.end())
              return std::pair{it->second, InputOrigin::kLocalVarLiteral};
          } else if (e == b + 3 && toks[b].text == type.simple_name && toks[b + 1].is(".") &&
                     toks[b + 2].kind == java::TokenKind::kIdentifier) {
            name = std::string(toks[b + 2].text);
          } else {
            return std::nullopt;
          }
          if (auto it = statics.find(name); it != statics.end())
            return std::pair{it->second, InputOrigin::kFinalStaticField};
          return std::nullopt;
        };

        // Overloads: first target whose arity and literal kinds agree.
        const Target* chosen = nullptr;
        for (const auto& target : found->second) {
          if (target.types.size() != args.size()) continue;
          bool ok = true;
          for (std::size_t a = 0; a < args.size() && ok; ++a) {
            auto r = resolve(args[a].first, args[a].second);
            if (!r) {
              auto [b, e] = args[a];
              if (e == b + 1 && (toks[b].kind == java::TokenKind::kChar || toks[b].is("true") ||
                                 toks[b].is("false") || toks[b].is("null"))) {
                ok = detail::literal_fits(toks[b].kind, toks[b].text, target.types[a]);
              }
              continue;
            }
            std::string_view text = test.text.substr(r->first.begin, r->first.end - r->first.begin);
            ok = detail::literal_fits(r->first.kind, text, target.types[a]);
          }
          if (ok) {
            chosen = &target;
            break;
          }
        }
        if (!chosen) continue;

        for (std::size_t a = 0; a < args.size(); ++a) {
          auto site_it = chosen->by_index.find(static_cast<int>(a));
          if (site_it == chosen->by_index.end()) continue;
          auto r = resolve(args[a].first, args[a].second);
          if (!r) continue;
          const ParameterSite& site = *site_it->second;
          TypeGroup kind = r->first.kind == java::TokenKind::kString ? TypeGroup::kString : TypeGroup::kNumber;
          if (kind != site.group()) continue;
          BoundInput in;
          in.site = site.key();
          in.param_name = site.param_name;
          in.declared_type = site.declared_type;
          in.literal_text = test.text.substr(r->first.begin, r->first.end - r->first.begin);
          in.value_kind = kind;
          in.origin = r->second;
          in.test_id = test_id;
          in.offset = r->first.begin;
          in.call_offset = t.offset;
          in.line = toks[args[a].first].line;
          inputs.push_back(std::move(in));
        }
      }
    }
  }
  return inputs;
}

// ---- line-delimited JSON records ------------------------------------------

inline nlohmann::json to_json(const ParameterSite& s) {
  return nlohmann::json{{"class_id", s.class_id},
                        {"method_sig", s.method_sig},
                        {"method_name", s.method_name},
                        {"is_constructor", s.is_constructor},
                        {"param_name", s.param_name},
                        {"param_index", s.param_index},
                        {"declared_type", to_string(s.declared_type)},
                        {"method_source", s.method_source},
                        {"operators", s.operators},
                        {"line", s.line}};
}

inline ParameterSite site_from_json(const nlohmann::json& j) {
  ParameterSite s;
  s.class_id = j.at("class_id").get<std::string>();
  s.method_sig = j.at("method_sig").get<std::string>();
  s.method_name = j.value("method_name", s.method_sig.substr(0, s.method_sig.find('(')));
  s.is_constructor = j.value("is_constructor", false);
  s.param_name = j.at("param_name").get<std::string>();
  s.param_index = j.at("param_index").get<int>();
  s.declared_type = parse_declared_type(j.at("declared_type").get<std::string>());
  s.method_source = j.value("method_source", std::string());
  s.operators = j.value("operators", std::vector<std::string>{});
  s.line = j.value("line", 0);
  return s;
}

inline nlohmann::json to_json(const BoundInput& in) {
  return nlohmann::json{{"class_id", in.site.class_id},
                        {"method_sig", in.site.method_sig},
                        {"param_index", in.site.param_index},
                        {"param_name", in.param_name},
                        {"declared_type", to_string(in.declared_type)},
                        {"literal_text", in.literal_text},
                        {"value", in.value()},
                        {"value_kind", to_string(in.value_kind)},
                        {"origin", to_string(in.origin)},
                        {"test_id", in.test_id},
                        {"offset", in.offset},
                        {"call_offset", in.call_offset},
                        {"line", in.line}};
}

inline BoundInput input_from_json(const nlohmann::json& j) {
  BoundInput in;
  in.site = {j.at("class_id").get<std::string>(), j.at("method_sig").get<std::string>(),
             j.at("param_index").get<int>()};
  in.param_name = j.value("param_name", std::string());
  in.declared_type = parse_declared_type(j.at("declared_type").get<std::string>());
  in.literal_text = j.at("literal_text").get<std::string>();
  in.value_kind = parse_type_group(j.at("value_kind").get<std::string>());
  in.origin = parse_input_origin(j.at("origin").get<std::string>());
  in.test_id = j.at("test_id").get<std::string>();
  in.offset = j.value("offset", std::size_t{0});
  in.call_offset = j.value("call_offset", std::size_t{0});
  in.line = j.value("line", 0);
  return in;
}

}  // namespace c3
