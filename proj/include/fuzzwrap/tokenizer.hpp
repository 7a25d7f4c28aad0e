#pragma once

// HTML token stream: the alphabet shared by learning and extraction.
//
// Segmentation is maximal munch, left to right. Lexical units are:
//   tag        '<' ['/'] letter ... '>'   (first '>' closes it)
//   entity     '&' name ';' | '&#' digits ';' | '&#x' hex ';'
//   word       [A-Z]+[a-z]* | [a-z]+      (a lower->upper transition splits)
//   number     [0-9]+
//   whitespace [ \t\r\n\f\v]+
//   punct      one ASCII punctuation byte
//   other      maximal run of bytes matching none of the above
// Offsets are byte offsets into the page text.

#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzwrap/error.hpp"

namespace fuzzwrap {

// Ids 1..12 follow the column order of the learned frequency matrices.
// Pad only fills detector windows that run past a page edge.
enum class TokenClass : std::uint8_t {
  Pad = 0,
  C1Alph = 1,
  CAlph = 2,
  Num = 3,
  Alph0 = 4,
  Punc = 5,
  CtrlClose = 6,
  CtrlOpen = 7,
  ListClose = 8,
  ListOpen = 9,
  HtmlClose = 10,
  HtmlOpen = 11,
  Any = 12,
};

inline constexpr std::size_t kNumClasses = 12;

inline constexpr std::array<TokenClass, kNumClasses> kAllClasses = {
    TokenClass::C1Alph,   TokenClass::CAlph,    TokenClass::Num,
    TokenClass::Alph0,    TokenClass::Punc,     TokenClass::CtrlClose,
    TokenClass::CtrlOpen, TokenClass::ListClose, TokenClass::ListOpen,
    TokenClass::HtmlClose, TokenClass::HtmlOpen, TokenClass::Any};

constexpr int class_id(TokenClass c) { return static_cast<int>(c); }

// Column index (0-based) of a non-Pad class.
constexpr std::size_t class_column(TokenClass c) {
  return static_cast<std::size_t>(c) - 1;
}

inline std::string_view class_name(TokenClass c) {
  switch (c) {
    case TokenClass::Pad: return "Pad";
    case TokenClass::C1Alph: return "C1Alph";
    case TokenClass::CAlph: return "CAlph";
    case TokenClass::Num: return "Num";
    case TokenClass::Alph0: return "0Alph";
    case TokenClass::Punc: return "Punc";
    case TokenClass::CtrlClose: return "/Spc";
    case TokenClass::CtrlOpen: return "Spc";
    case TokenClass::ListClose: return "/Lst";
    case TokenClass::ListOpen: return "Lst";
    case TokenClass::HtmlClose: return "/Html";
    case TokenClass::HtmlOpen: return "Html";
    case TokenClass::Any: return "Any";
  }
  return "?";
}

inline std::optional<TokenClass> class_from_name(std::string_view name) {
  if (name == "Pad") return TokenClass::Pad;
  for (TokenClass c : kAllClasses)
    if (class_name(c) == name) return c;
  return std::nullopt;
}

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool empty() const { return start == end; }
  bool contains(const Span& other) const {
    return start <= other.start && other.end <= end;
  }
  bool overlaps(const Span& other) const {
    return start < other.end && other.start < end;
  }
  friend bool operator==(const Span&, const Span&) = default;
};

struct Token {
  TokenClass cls = TokenClass::Any;
  std::string lexeme;
  Span span;

  friend bool operator==(const Token&, const Token&) = default;
};

namespace detail {

inline bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
inline bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
inline bool is_alpha(char c) { return is_upper(c) || is_lower(c); }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}
inline bool is_punct(char c) {
  return static_cast<unsigned char>(c) < 0x80 &&
         std::ispunct(static_cast<unsigned char>(c)) != 0;
}

inline std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (is_lower(c)) c = static_cast<char>(c - 'a' + 'A');
  return out;
}

// Length of a tag starting at s[0] == '<', or 0 when s does not open one.
inline std::size_t tag_length(std::string_view s) {
  if (s.size() < 3 || s[0] != '<') return 0;
  std::size_t i = 1;
  if (s[i] == '/') ++i;
  if (i >= s.size() || !is_alpha(s[i])) return 0;
  auto close = s.find('>', i);
  return close == std::string_view::npos ? 0 : close + 1;
}

inline std::size_t entity_length(std::string_view s) {
  if (s.size() < 3 || s[0] != '&') return 0;
  std::size_t i = 1;
  if (s[i] == '#') {
    ++i;
    bool hex = i < s.size() && (s[i] == 'x' || s[i] == 'X');
    if (hex) ++i;
    std::size_t digits = 0;
    while (i < s.size() &&
           (is_digit(s[i]) ||
            (hex && std::isxdigit(static_cast<unsigned char>(s[i])) != 0))) {
      ++i;
      ++digits;
    }
    if (digits == 0) return 0;
  } else {
    std::size_t letters = 0;
    while (i < s.size() && (is_alpha(s[i]) || is_digit(s[i]))) {
      ++i;
      ++letters;
    }
    if (letters == 0) return 0;
  }
  return i < s.size() && s[i] == ';' ? i + 1 : 0;
}

inline std::string tag_name(std::string_view tag) {
  std::size_t i = 1;
  if (i < tag.size() && tag[i] == '/') ++i;
  std::size_t start = i;
  while (i < tag.size() && (is_alpha(tag[i]) || is_digit(tag[i]))) ++i;
  return upper(tag.substr(start, i - start));
}

inline bool is_list_tag(const std::string& name) {
  static constexpr std::array<std::string_view, 9> kList = {
      "UL", "OL", "LI", "DL", "DT", "DD", "TR", "TD", "TH"};
  for (auto n : kList)
    if (n == name) return true;
  return false;
}

inline bool is_control_tag(const std::string& name) {
  return name == "BR" || name == "P";
}

// Does a single byte start one of the "other" runs?
inline bool starts_other(std::string_view s) {
  char c = s[0];
  if (is_alpha(c) || is_digit(c) || is_space(c)) return false;
  return !is_punct(c);
}

}  // namespace detail

// Class of one maximal lexical unit. Throws InvalidLexeme on empty input.
inline TokenClass classify(std::string_view lexeme) {
  using namespace detail;
  if (lexeme.empty())
    throw Error(ErrorCode::InvalidLexeme, "empty lexeme");

  if (tag_length(lexeme) == lexeme.size()) {
    bool closing = lexeme[1] == '/';
    std::string name = tag_name(lexeme);
    if (is_list_tag(name))
      return closing ? TokenClass::ListClose : TokenClass::ListOpen;
    if (is_control_tag(name))
      return closing ? TokenClass::CtrlClose : TokenClass::CtrlOpen;
    return closing ? TokenClass::HtmlClose : TokenClass::HtmlOpen;
  }

  bool all_upper = true;
  bool all_alpha = true;
  bool has_lower = false;
  bool all_digit = true;
  bool all_space = true;
  for (char c : lexeme) {
    all_upper = all_upper && is_upper(c);
    all_alpha = all_alpha && is_alpha(c);
    has_lower = has_lower || is_lower(c);
    all_digit = all_digit && is_digit(c);
    all_space = all_space && is_space(c);
  }
  if (all_upper) return TokenClass::CAlph;
  if (all_alpha && is_upper(lexeme[0]) && has_lower) return TokenClass::C1Alph;
  if (all_alpha && is_lower(lexeme[0])) return TokenClass::Alph0;
  if (all_digit) return TokenClass::Num;
  if (lexeme.size() == 1 && is_punct(lexeme[0])) return TokenClass::Punc;
  if (all_space) return TokenClass::CtrlOpen;
  return TokenClass::Any;
}

// Byte length of the maximal lexical unit at the front of `rest`.
inline std::size_t unit_length(std::string_view rest) {
  using namespace detail;
  const char c = rest[0];
  if (c == '<') {
    if (auto n = tag_length(rest)) return n;
    return 1;
  }
  if (c == '&') {
    if (auto n = entity_length(rest)) return n;
    return 1;
  }
  std::size_t i = 1;
  if (is_upper(c)) {
    while (i < rest.size() && is_upper(rest[i])) ++i;
    while (i < rest.size() && is_lower(rest[i])) ++i;
    return i;
  }
  if (is_lower(c)) {
    while (i < rest.size() && is_lower(rest[i])) ++i;
    return i;
  }
  if (is_digit(c)) {
    while (i < rest.size() && is_digit(rest[i])) ++i;
    return i;
  }
  if (is_space(c)) {
    while (i < rest.size() && is_space(rest[i])) ++i;
    return i;
  }
  if (is_punct(c)) return 1;
  while (i < rest.size() && starts_other(rest.substr(i))) ++i;
  return i;
}

inline std::vector<Token> tokenize(std::string_view page) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos < page.size()) {
    std::size_t len = unit_length(page.substr(pos));
    std::string_view lexeme = page.substr(pos, len);
    tokens.push_back(Token{classify(lexeme), std::string(lexeme),
                           Span{pos, pos + len}});
    pos += len;
  }
  return tokens;
}

inline std::vector<TokenClass> classes_of(const std::vector<Token>& tokens) {
  std::vector<TokenClass> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.cls);
  return out;
}

}  // namespace fuzzwrap
