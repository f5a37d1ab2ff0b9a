#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wheacha {

struct LexError : std::runtime_error {
  std::size_t offset;
  LexError(std::string msg, std::size_t off)
      : std::runtime_error(std::move(msg)), offset(off) {}
};

struct ParseError : std::runtime_error {
  int position;            // token index
  std::string expected;    // human-readable expected-kind set
  ParseError(std::string msg, int pos, std::string exp)
      : std::runtime_error(std::move(msg)), position(pos), expected(std::move(exp)) {}
};

struct SubtreeNotFound : std::runtime_error {
  std::string statement;   // serialized offending fragment statement
  explicit SubtreeNotFound(std::string stmt)
      : std::runtime_error("fragment statement not found in program: " + stmt),
        statement(std::move(stmt)) {}
};

struct ConstituentViolation : std::runtime_error {
  ConstituentViolation() : std::runtime_error("candidate tokens are not a subsequence of the original program") {}
};

struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FragmentSearchExhausted : std::runtime_error {
  int max_k;
  explicit FragmentSearchExhausted(int k)
      : std::runtime_error("no fragment of size <= " + std::to_string(k) +
                           " satisfies both requirements"),
        max_k(k) {}
};

struct FixpointCapExceeded : std::runtime_error {
  int cap;
  std::string last_tree;   // serialized last valid tree
  FixpointCapExceeded(int c, std::string last)
      : std::runtime_error("mutate fixpoint did not converge within " +
                           std::to_string(c) + " passes"),
        cap(c), last_tree(std::move(last)) {}
};

struct TokenLimitExceeded : std::runtime_error {
  int limit;
  int actual;
  TokenLimitExceeded(int lim, int act)
      : std::runtime_error("program has " + std::to_string(act) +
                           " terminal tokens, oracle limit is " + std::to_string(lim)),
        limit(lim), actual(act) {}
};

struct NoCandidates : std::runtime_error {
  explicit NoCandidates(const std::string& label)
      : std::runtime_error("no corpus entries for label: " + label) {}
};

struct NoProbabilities : std::runtime_error {
  NoProbabilities() : std::runtime_error("model does not emit probabilities") {}
};

}  // namespace wheacha
