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

// Exact parsing and format rewriting of Java number literals.

#pragma once

#include <algorithm>
#include <string>
#include <string_view>

#include "c3/context_registry.hpp"
#include "c3/error.hpp"
#include "c3/text.hpp"

namespace c3 {

// value = (negative ? -1 : 1) * digits * 10^exponent, with no leading or
// trailing zeros in `digits` (zero is {"0", 0, false}).
struct DecimalValue {
  bool negative = false;
  std::string digits = "0";
  int exponent = 0;

  friend bool operator==(const DecimalValue&, const DecimalValue&) = default;
};

struct NumberLiteral {
  DecimalValue value;
  int base = 10;
  bool float_syntax = false;  // has '.', an exponent, or an f/d suffix
  std::string suffix;         // "", "L", "l", "f", "F", "d", "D"
};

namespace detail {

inline DecimalValue normalize_decimal(bool negative, std::string digits, long exponent) {
  std::size_t lead = digits.find_first_not_of('0');
  if (lead == std::string::npos) return DecimalValue{};
  digits.erase(0, lead);
  std::size_t last = digits.find_last_not_of('0');
  exponent += static_cast<long>(digits.size() - last - 1);
  digits.erase(last + 1);
  if (exponent > 100000 || exponent < -100000) {
    throw Error(ErrorKind::kInvalidArgument, "number exponent out of range");
  }
  return DecimalValue{negative, std::move(digits), static_cast<int>(exponent)};
}

inline std::string u128_to_decimal(unsigned __int128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

inline int digit_value(char c) {
  if (text::is_digit(c)) return c - '0';
  char l = text::to_lower(c);
  if (l >= 'a' && l <= 'f') return l - 'a' + 10;
  return 99;
}

// Validates a digit run with Java underscore placement rules and returns the
// digits with underscores removed.
inline std::string take_digits(std::string_view run, int base, std::string_view literal) {
  if (run.empty() || run.front() == '_' || run.back() == '_') {
    throw Error(ErrorKind::kInvalidArgument, "malformed number literal '" + std::string(literal) + "'");
  }
  std::string out;
  for (char c : run) {
    if (c == '_') continue;
    if (digit_value(c) >= base) {
      throw Error(ErrorKind::kInvalidArgument, "malformed number literal '" + std::string(literal) + "'");
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

inline NumberLiteral parse_number_literal(std::string_view literal) {
  auto malformed = [&]() {
    return Error(ErrorKind::kInvalidArgument, "malformed number literal '" + std::string(literal) + "'");
  };
  std::string_view s = text::trim(literal);
  NumberLiteral out;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) throw malformed();

  auto is_run_char = [](char c, bool hex) {
    return c == '_' || (hex ? detail::digit_value(c) < 16 : text::is_digit(c));
  };

  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X' || s[1] == 'b' || s[1] == 'B')) {
    bool hex = s[1] == 'x' || s[1] == 'X';
    out.base = hex ? 16 : 2;
    s.remove_prefix(2);
    if (!s.empty() && (s.back() == 'l' || s.back() == 'L')) {
      out.suffix = std::string(1, s.back());
      s.remove_suffix(1);
    }
    for (char c : s) {
      if (c == '.' || c == 'p' || c == 'P') {
        throw Error(ErrorKind::kInvalidArgument,
                    "hexadecimal floating literals are not supported: '" + std::string(literal) + "'");
      }
      if (!is_run_char(c, true)) throw malformed();
    }
    std::string digits = detail::take_digits(s, out.base, literal);
    unsigned __int128 v = 0;
    const unsigned __int128 limit = ~static_cast<unsigned __int128>(0) / static_cast<unsigned>(out.base);
    for (char c : digits) {
      if (v > limit) throw Error(ErrorKind::kInvalidArgument, "number literal out of range");
      v = v * static_cast<unsigned>(out.base) + static_cast<unsigned>(detail::digit_value(c));
    }
    out.value = detail::normalize_decimal(negative, detail::u128_to_decimal(v), 0);
    return out;
  }

  std::size_t i = 0;
  while (i < s.size() && is_run_char(s[i], false)) ++i;
  std::string_view int_run = s.substr(0, i);
  std::string_view frac_run;
  bool has_dot = false;
  bool has_exp = false;
  long exponent = 0;
  if (i < s.size() && s[i] == '.') {
    has_dot = true;
    std::size_t j = ++i;
    while (i < s.size() && is_run_char(s[i], false)) ++i;
    frac_run = s.substr(j, i - j);
  }
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    has_exp = true;
    ++i;
    bool exp_negative = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) exp_negative = s[i++] == '-';
    std::size_t j = i;
    while (i < s.size() && is_run_char(s[i], false)) ++i;
    std::string exp_digits = detail::take_digits(s.substr(j, i - j), 10, literal);
    if (exp_digits.size() > 6) throw Error(ErrorKind::kInvalidArgument, "number exponent out of range");
    exponent = std::stol(exp_digits) * (exp_negative ? -1 : 1);
  }
  if (i < s.size()) {
    char c = s[i];
    bool float_suffix = c == 'f' || c == 'F' || c == 'd' || c == 'D';
    bool long_suffix = c == 'l' || c == 'L';
    if (i + 1 != s.size() || !(float_suffix || long_suffix)) throw malformed();
    if (long_suffix && (has_dot || has_exp)) throw malformed();
    out.suffix = std::string(1, c);
  }
  out.float_syntax = has_dot || has_exp || (!out.suffix.empty() && out.suffix != "L" && out.suffix != "l");
  if (int_run.empty() && frac_run.empty()) throw malformed();

  std::string int_digits = int_run.empty() ? "" : detail::take_digits(int_run, 10, literal);
  std::string frac_digits = frac_run.empty() ? "" : detail::take_digits(frac_run, 10, literal);

  if (!out.float_syntax && int_digits.size() > 1 && int_digits.front() == '0') {
    out.base = 8;
    std::string oct = detail::take_digits(int_run.substr(1), 8, literal);
    unsigned __int128 v = 0;
    for (char c : oct) {
      if (v > (~static_cast<unsigned __int128>(0) >> 3)) {
        throw Error(ErrorKind::kInvalidArgument, "number literal out of range");
      }
      v = v * 8 + static_cast<unsigned>(c - '0');
    }
    out.value = detail::normalize_decimal(negative, detail::u128_to_decimal(v), 0);
    return out;
  }
  out.value = detail::normalize_decimal(negative, int_digits + frac_digits,
                                        exponent - static_cast<long>(frac_digits.size()));
  return out;
}

inline bool is_number_literal(std::string_view literal) {
  try {
    parse_number_literal(literal);
    return true;
  } catch (const Error&) {
    return false;
  }
}

// Counts the significant digits written in a literal: base prefixes,
// exponents, signs, underscores, points and suffixes are excluded.
inline int digit_length(std::string_view literal) {
  std::string_view s = text::trim(literal);
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  bool hex = s.size() > 1 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
  bool bin = s.size() > 1 && s[0] == '0' && (s[1] == 'b' || s[1] == 'B');
  if (hex || bin) s.remove_prefix(2);
  int n = 0;
  for (char c : s) {
    if (!hex && (c == 'e' || c == 'E')) break;
    if (hex ? detail::digit_value(c) < 16 : text::is_digit(c)) ++n;
  }
  return n;
}

namespace detail {

inline unsigned __int128 to_u128(const DecimalValue& v, std::string_view literal) {
  if (v.exponent < 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "base formats need an integer value: '" + std::string(literal) + "'");
  }
  if (v.digits.size() + static_cast<std::size_t>(v.exponent) > 38) {
    throw Error(ErrorKind::kInvalidArgument, "number literal out of range");
  }
  unsigned __int128 out = 0;
  for (char c : v.digits) out = out * 10 + static_cast<unsigned>(c - '0');
  for (int i = 0; i < v.exponent; ++i) out *= 10;
  return out;
}

inline std::string u128_in_base(unsigned __int128 v, unsigned base) {
  if (v == 0) return "0";
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  while (v > 0) {
    out.push_back(kDigits[static_cast<int>(v % base)]);
    v /= base;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// Plain positional expansion: integer and fraction digit strings.
inline std::pair<std::string, std::string> expand(const DecimalValue& v) {
  constexpr std::size_t kMaxDigits = 64;
  if (v.exponent >= 0) {
    if (v.digits.size() + static_cast<std::size_t>(v.exponent) > kMaxDigits) {
      throw Error(ErrorKind::kInvalidArgument, "number too long to expand positionally");
    }
    std::string whole = v.digits == "0" ? "0" : v.digits + std::string(static_cast<std::size_t>(v.exponent), '0');
    return {whole, ""};
  }
  std::size_t frac_len = static_cast<std::size_t>(-v.exponent);
  if (frac_len > kMaxDigits) throw Error(ErrorKind::kInvalidArgument, "number too long to expand positionally");
  if (v.digits.size() > frac_len) {
    return {v.digits.substr(0, v.digits.size() - frac_len), v.digits.substr(v.digits.size() - frac_len)};
  }
  return {"0", std::string(frac_len - v.digits.size(), '0') + v.digits};
}

inline std::string group_from_right(const std::string& digits, std::size_t width) {
  std::string out;
  std::size_t first = digits.size() % width;
  if (first == 0) first = width;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i >= first && (i - first) % width == 0) out.push_back('_');
    out.push_back(digits[i]);
  }
  return out;
}

inline std::string group_from_left(const std::string& digits, std::size_t width) {
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && i % width == 0) out.push_back('_');
    out.push_back(digits[i]);
  }
  return out;
}

}  // namespace detail

// Rewrites `literal` into the format of a NUMBER context, preserving its value
// and type suffix. `min_binary_width` zero-pads BINARY digits (for operands
// rewritten together). Signs are kept in front of the rewritten magnitude.
inline std::string rewrite_number_literal(std::string_view literal, const ReadabilityContext& context,
                                          int fixed_length_width = 4, std::size_t min_binary_width = 0) {
  if (context.group != TypeGroup::kNumber) {
    throw Error(ErrorKind::kPrecondition, "context " + context.name + " is not a NUMBER context");
  }
  NumberLiteral lit = parse_number_literal(literal);
  const std::string sign = lit.value.negative ? "-" : "";
  const std::string& name = context.name;

  if (name == "BINARY" || name == "HEXADECIMAL" || name == "OCTAL") {
    if (lit.float_syntax) {
      throw Error(ErrorKind::kInvalidArgument,
                  "base formats need an integer literal: '" + std::string(literal) + "'");
    }
    unsigned __int128 v = detail::to_u128(lit.value, literal);
    if (name == "BINARY") {
      std::string bits = detail::u128_in_base(v, 2);
      if (bits.size() < min_binary_width) bits.insert(0, min_binary_width - bits.size(), '0');
      return sign + "0b" + bits + lit.suffix;
    }
    if (name == "HEXADECIMAL") return sign + "0x" + detail::u128_in_base(v, 16) + lit.suffix;
    return sign + "0" + detail::u128_in_base(v, 8) + lit.suffix;
  }

  if (name == "SCIENTIFIC") {
    const DecimalValue& d = lit.value;
    std::string mantissa(1, d.digits.front());
    if (d.digits.size() > 1) mantissa += "." + d.digits.substr(1);
    long exp = d.digits == "0" ? 0 : static_cast<long>(d.digits.size()) - 1 + d.exponent;
    // An exponent makes the literal floating point, so a long suffix cannot stay.
    std::string suffix = (lit.suffix == "L" || lit.suffix == "l") ? "" : lit.suffix;
    return sign + mantissa + "e" + std::to_string(exp) + suffix;
  }

  if (name == "LONGNUMBER" || name == "FIXEDLENGTH") {
    std::size_t width = name == "LONGNUMBER" ? 3 : static_cast<std::size_t>(std::max(1, fixed_length_width));
    auto [whole, frac] = detail::expand(lit.value);
    std::string out = sign + detail::group_from_right(whole, width);
    if (!frac.empty()) {
      out += "." + detail::group_from_left(frac, width);
    } else if (lit.float_syntax && lit.suffix.empty()) {
      out += ".0";
    }
    return out + lit.suffix;
  }

  throw Error(ErrorKind::kInvalidArgument, "no rewrite rule for context " + name);
}

}  // namespace c3
