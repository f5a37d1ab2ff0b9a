#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wheacha/ast.hpp"
#include "wheacha/parser.hpp"
#include "wheacha/serializer.hpp"
#include "wheacha/token.hpp"

namespace wheacha {

inline constexpr const char* kOov = "oov";

enum class HeaderMode { MaskName, KeepHeader };

struct Program {
  std::string source;
  std::vector<Token> tokens;
  Node method;
  std::string path;

  static Program from_source(std::string src, std::string path = "") {
    Program p;
    p.tokens = tokenize(src);
    p.method = parse(src);
    p.source = std::move(src);
    p.path = std::move(path);
    return p;
  }

  static Program from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_source(ss.str(), path);
  }

  std::string label_source() const { return source; }
};

// Clone of a method with the candidate body, header per mode. Mask mode
// replaces the method name with the fixed out-of-vocabulary placeholder.
inline Node wrap_with_header(const Node& original_method, Node body_block, HeaderMode mode) {
  Node m = original_method;
  if (mode == HeaderMode::MaskName) m.value = kOov;
  m.children[2] = std::move(body_block);
  return m;
}

inline Node body_as_block(const Node& method_or_block) {
  if (method_or_block.kind == NodeKind::Method) return method_body(method_or_block);
  return method_or_block;
}

}  // namespace wheacha
