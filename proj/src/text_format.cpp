// Copyright 2026 The reachlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "reachlab/text_format.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace reachlab {
namespace {

std::vector<std::string> tokenize(const std::string& line, int lineno,
                                  const std::string& source) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '"') {
      size_t j = line.find('"', i + 1);
      if (j == std::string::npos)
        fail(ErrorCode::kParse, source + ":" + std::to_string(lineno) +
                                    ": unterminated string literal");
      out.push_back(line.substr(i + 1, j - i - 1));
      i = j + 1;
      continue;
    }
    if (c == '{' || c == '}') {
      out.push_back(std::string(1, c));
      ++i;
      continue;
    }
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
           line[j] != '{' && line[j] != '}' && line[j] != '#')
      ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

const TextNode* TextNode::find(const std::string& k) const {
  for (const auto& c : children)
    if (c.key == k) return &c;
  return nullptr;
}

const TextNode& TextNode::require(const std::string& k) const {
  const TextNode* n = find(k);
  if (!n) error("missing required record '" + k + "' in '" + key + "'");
  return *n;
}

std::vector<const TextNode*> TextNode::find_all(const std::string& k) const {
  std::vector<const TextNode*> out;
  for (const auto& c : children)
    if (c.key == k) out.push_back(&c);
  return out;
}

std::string TextNode::location() const {
  return source + ":" + std::to_string(line);
}

void TextNode::error(const std::string& what) const {
  fail(ErrorCode::kParse, location() + ": " + what);
}

double TextNode::as_num(size_t i) const {
  if (i >= values.size()) error("record '" + key + "' needs a numeric value");
  char* end = nullptr;
  const double v = std::strtod(values[i].c_str(), &end);
  if (end == values[i].c_str() || *end != '\0')
    error("'" + values[i] + "' is not a number");
  return v;
}

long TextNode::as_int(size_t i) const {
  const double v = as_num(i);
  const long l = static_cast<long>(v);
  if (static_cast<double>(l) != v) error("'" + values[i] + "' is not an integer");
  return l;
}

bool TextNode::as_bool(size_t i) const {
  const std::string& s = as_str(i);
  if (s == "true" || s == "on" || s == "1") return true;
  if (s == "false" || s == "off" || s == "0") return false;
  error("'" + s + "' is not a boolean (true/false)");
}

const std::string& TextNode::as_str(size_t i) const {
  if (i >= values.size()) error("record '" + key + "' needs a value");
  return values[i];
}

VecX TextNode::as_vec() const {
  VecX v(values.size());
  for (size_t i = 0; i < values.size(); ++i) v[static_cast<long>(i)] = as_num(i);
  return v;
}

Vec3 TextNode::as_vec3() const {
  if (values.size() != 3) error("record '" + key + "' needs exactly 3 numbers");
  return Vec3(as_num(0), as_num(1), as_num(2));
}

double TextNode::num_or(const std::string& k, double fallback) const {
  const TextNode* n = find(k);
  return n ? n->as_num() : fallback;
}

long TextNode::int_or(const std::string& k, long fallback) const {
  const TextNode* n = find(k);
  return n ? n->as_int() : fallback;
}

bool TextNode::bool_or(const std::string& k, bool fallback) const {
  const TextNode* n = find(k);
  return n ? n->as_bool() : fallback;
}

std::string TextNode::str_or(const std::string& k, const std::string& fallback) const {
  const TextNode* n = find(k);
  return n ? n->as_str() : fallback;
}

Vec3 TextNode::vec3_or(const std::string& k, const Vec3& fallback) const {
  const TextNode* n = find(k);
  return n ? n->as_vec3() : fallback;
}

std::optional<VecX> TextNode::vec_opt(const std::string& k) const {
  const TextNode* n = find(k);
  if (!n) return std::nullopt;
  return n->as_vec();
}

TextNode parse_text_document(const std::string& text, const std::string& source_name,
                             const std::string& expected_header) {
  TextNode root;
  root.key = "<root>";
  root.source = source_name;
  root.line = 0;

  std::vector<TextNode*> stack{&root};
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool saw_header = false;

  while (std::getline(in, line)) {
    ++lineno;
    auto tokens = tokenize(line, lineno, source_name);
    if (tokens.empty()) continue;

    if (tokens.size() == 1 && tokens[0] == "}") {
      if (stack.size() == 1)
        fail(ErrorCode::kParse,
             source_name + ":" + std::to_string(lineno) + ": unmatched '}'");
      stack.pop_back();
      continue;
    }

    bool opens_block = false;
    if (tokens.back() == "{") {
      opens_block = true;
      tokens.pop_back();
      if (tokens.empty())
        fail(ErrorCode::kParse,
             source_name + ":" + std::to_string(lineno) + ": block needs a key");
    }
    for (const auto& t : tokens)
      if (t == "{" || t == "}")
        fail(ErrorCode::kParse, source_name + ":" + std::to_string(lineno) +
                                    ": braces must end a record or stand alone");

    if (!saw_header) {
      if (opens_block || tokens[0] != expected_header)
        fail(ErrorCode::kParse, source_name + ":" + std::to_string(lineno) +
                                    ": expected header '" + expected_header +
                                    " v1' as the first record");
      if (tokens.size() < 2 || tokens[1] != "v1")
        fail(ErrorCode::kParse, source_name + ":" + std::to_string(lineno) +
                                    ": unsupported format version (only v1)");
      saw_header = true;
      continue;
    }

    TextNode node;
    node.key = tokens[0];
    node.values.assign(tokens.begin() + 1, tokens.end());
    node.line = lineno;
    node.source = source_name;
    stack.back()->children.push_back(std::move(node));
    if (opens_block) stack.push_back(&stack.back()->children.back());
  }

  if (!saw_header)
    fail(ErrorCode::kParse, source_name + ": empty document (missing '" +
                                expected_header + " v1' header)");
  if (stack.size() != 1)
    fail(ErrorCode::kParse, source_name + ": unterminated block opened at " +
                                stack.back()->location());
  return root;
}

TextNode parse_text_file(const std::string& path, const std::string& expected_header) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text_document(buf.str(), path, expected_header);
}

}  // namespace reachlab
