#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "wheacha/errors.hpp"

namespace wheacha {

enum class TokenKind { Identifier, Keyword, StringLiteral, NumberLiteral, Punct, Operator };

struct Token {
  TokenKind kind;
  std::string text;
  int position;  // 0-based index in the token sequence
};

inline const char* to_string(TokenKind k) {
  switch (k) {
    case TokenKind::Identifier: return "Identifier";
    case TokenKind::Keyword: return "Keyword";
    case TokenKind::StringLiteral: return "StringLiteral";
    case TokenKind::NumberLiteral: return "NumberLiteral";
    case TokenKind::Punct: return "Punct";
    case TokenKind::Operator: return "Operator";
  }
  return "?";
}

inline bool is_keyword(std::string_view s) {
  return s == "if" || s == "else" || s == "while" || s == "for" || s == "switch" ||
         s == "case" || s == "default" || s == "return";
}

namespace detail {
inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_cont(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
}  // namespace detail

// Lexes a source string. Byte offsets per token are stored into *offsets when given
// (parallel to the returned vector); the Token type itself carries only the sequence
// position per its contract.
inline std::vector<Token> tokenize(std::string_view source,
                                   std::vector<std::size_t>* offsets = nullptr) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = source.size();
  auto push = [&](TokenKind k, std::string text, std::size_t off) {
    out.push_back(Token{k, std::move(text), static_cast<int>(out.size())});
    if (offsets) offsets->push_back(off);
  };
  while (i < n) {
    char c = source[i];
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    std::size_t start = i;
    if (detail::ident_start(c)) {
      ++i;
      while (i < n && detail::ident_cont(source[i])) ++i;
      std::string text(source.substr(start, i - start));
      TokenKind kind = is_keyword(text) ? TokenKind::Keyword : TokenKind::Identifier;
      push(kind, std::move(text), start);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      ++i;
      while (i < n && std::isdigit(static_cast<unsigned char>(source[i]))) ++i;
      if (i < n && source[i] == '.' && i + 1 < n &&
          std::isdigit(static_cast<unsigned char>(source[i + 1]))) {
        ++i;
        while (i < n && std::isdigit(static_cast<unsigned char>(source[i]))) ++i;
      }
      push(TokenKind::NumberLiteral, std::string(source.substr(start, i - start)), start);
      continue;
    }
    if (c == '"') {
      ++i;
      while (i < n && source[i] != '"') {
        if (source[i] == '\\' && i + 1 < n) ++i;
        ++i;
      }
      if (i >= n) throw LexError("unterminated string literal", start);
      ++i;  // closing quote
      push(TokenKind::StringLiteral, std::string(source.substr(start, i - start)), start);
      continue;
    }
    // two-char operators first
    if (i + 1 < n) {
      std::string_view two = source.substr(i, 2);
      if (two == "==" || two == "!=" || two == "<=" || two == ">=" || two == "&&" || two == "||") {
        push(TokenKind::Operator, std::string(two), start);
        i += 2;
        continue;
      }
    }
    switch (c) {
      case '=': case '<': case '>': case '+': case '-': case '*': case '/': case '%': case '!':
        push(TokenKind::Operator, std::string(1, c), start);
        ++i;
        continue;
      case '(': case ')': case '{': case '}': case ';': case ',': case '.': case ':':
        push(TokenKind::Punct, std::string(1, c), start);
        ++i;
        continue;
      default:
        throw LexError(std::string("unrecognized character '") + c + "'", start);
    }
  }
  return out;
}

// Subsequence test on token texts (the constituent relation). A candidate
// token whose text is exactly "oov" matches any single token of the whole sequence;
// it stands for a value erased during mutation.
inline bool is_subsequence(const std::vector<Token>& candidate, const std::vector<Token>& whole) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    const std::string& want = candidate[i].text;
    bool wild = (want == "oov");
    while (j < whole.size() && !wild && whole[j].text != want) ++j;
    if (j >= whole.size()) return false;
    ++j;  // consume one whole-token (any token, when wild)
  }
  return true;
}

inline bool same_token_stream(const std::vector<Token>& a, const std::vector<Token>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].kind != b[i].kind || a[i].text != b[i].text) return false;
  return true;
}

}  // namespace wheacha
