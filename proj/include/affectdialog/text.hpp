// Copyright (c) 2026 The affectdialog Authors
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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace affectdialog {

using TokenId = std::int32_t;

/// Lowercases, drops non-ASCII bytes, splits on whitespace and emits every
/// punctuation character as its own token.
std::vector<std::string> normalize_and_tokenize(std::string_view text);

std::string join_tokens(std::span<const std::string> tokens);

/// Token <-> id table. Ids 0..3 are reserved for PAD, SOS, EOS and OOV;
/// ordinary words follow in insertion order.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kSos = 1;
  static constexpr TokenId kEos = 2;
  static constexpr TokenId kOov = 3;
  static constexpr std::size_t kNumSpecials = 4;

  Vocabulary();

  /// Words in id order (specials are added automatically, duplicates and
  /// special spellings are rejected).
  explicit Vocabulary(const std::vector<std::string>& words);

  /// Most frequent tokens first, ties broken alphabetically; at most
  /// `max_size` ordinary words.
  static Vocabulary build(const std::vector<std::vector<std::string>>& sentences,
                          std::size_t max_size);

  /// One word per line; order defines ids after the specials.
  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t size() const { return words_.size(); }
  const std::string& word(TokenId id) const;
  const std::vector<std::string>& words() const { return words_; }
  static bool is_special(TokenId id) { return id >= 0 && id < static_cast<TokenId>(kNumSpecials); }

  /// Exact id, or -1.
  TokenId find(std::string_view w) const;

  /// Exact id; otherwise the most similar stored word with similarity
  /// strictly above 0.9; otherwise OOV.
  TokenId map_token(std::string_view w) const;

  std::vector<TokenId> encode(std::span<const std::string> tokens) const;
  /// PAD, SOS and EOS are dropped; OOV is kept as "<oov>".
  std::vector<std::string> decode(std::span<const TokenId> ids) const;

 private:
  void add(const std::string& w);

  std::vector<std::string> words_;
  std::unordered_map<std::string, TokenId> index_;
  std::vector<std::string> sorted_;  // ordinary words, sorted, for fuzzy matching
  std::vector<TokenId> sorted_ids_;
};

}  // namespace affectdialog
