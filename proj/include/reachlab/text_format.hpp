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

#pragma once

// Line-oriented hierarchical text format used by model files, scene files and
// run configs.  A record is `key value value ...`; a record ending in `{`
// opens a nested block closed by a lone `}`.  `#` starts a comment.  The
// first record of a file is the format header, e.g. `reachlab-model v1`.
// The full grammar is documented in docs/file-formats.md.

#include <optional>
#include <string>
#include <vector>

#include "reachlab/common.hpp"

namespace reachlab {

struct TextNode {
  std::string key;
  std::vector<std::string> values;
  std::vector<TextNode> children;
  int line = 0;            // 1-based source line, for diagnostics
  std::string source;      // file name or "<string>"

  // ---- lookup ----
  const TextNode* find(const std::string& k) const;
  const TextNode& require(const std::string& k) const;
  std::vector<const TextNode*> find_all(const std::string& k) const;
  bool has(const std::string& k) const { return find(k) != nullptr; }

  // ---- scalar accessors on this node's values ----
  double as_num(size_t i = 0) const;
  long as_int(size_t i = 0) const;
  bool as_bool(size_t i = 0) const;
  const std::string& as_str(size_t i = 0) const;
  VecX as_vec() const;                   // all values as numbers
  Vec3 as_vec3() const;

  // ---- child record conveniences (scalar child `key value`) ----
  double num(const std::string& k) const { return require(k).as_num(); }
  double num_or(const std::string& k, double fallback) const;
  long integer(const std::string& k) const { return require(k).as_int(); }
  long int_or(const std::string& k, long fallback) const;
  bool bool_or(const std::string& k, bool fallback) const;
  std::string str(const std::string& k) const { return require(k).as_str(); }
  std::string str_or(const std::string& k, const std::string& fallback) const;
  Vec3 vec3(const std::string& k) const { return require(k).as_vec3(); }
  Vec3 vec3_or(const std::string& k, const Vec3& fallback) const;
  std::optional<VecX> vec_opt(const std::string& k) const;

  [[noreturn]] void error(const std::string& what) const;
  std::string location() const;
};

// Parses a document.  `expected_header` (e.g. "reachlab-model") is matched
// against the first record's key; its first value carries the version.
TextNode parse_text_document(const std::string& text, const std::string& source_name,
                             const std::string& expected_header);
TextNode parse_text_file(const std::string& path, const std::string& expected_header);

}  // namespace reachlab
