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

#include "affectdialog/text.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "affectdialog/lexicon.hpp"

namespace affectdialog {

namespace {

const std::vector<std::string> kSpecialWords = {"<pad>", "<sos>", "<eos>", "<oov>"};

bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool is_ascii_punct(unsigned char c) {
  return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
         (c >= 123 && c <= 126);
}

}  // namespace

std::vector<std::string> normalize_and_tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || (c < 32 && !is_ascii_space(c)) || c == 127) continue;
    if (is_ascii_space(c)) {
      flush();
    } else if (is_ascii_punct(c)) {
      flush();
      out.emplace_back(1, ch);
    } else {
      cur.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    }
  }
  flush();
  return out;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

Vocabulary::Vocabulary() {
  for (const auto& s : kSpecialWords) {
    index_.emplace(s, static_cast<TokenId>(words_.size()));
    words_.push_back(s);
  }
}

Vocabulary::Vocabulary(const std::vector<std::string>& words) : Vocabulary() {
  for (const auto& w : words) add(w);
  std::vector<std::size_t> order(words_.size() - kNumSpecials);
  std::iota(order.begin(), order.end(), kNumSpecials);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return words_[a] < words_[b]; });
  for (std::size_t i : order) {
    sorted_.push_back(words_[i]);
    sorted_ids_.push_back(static_cast<TokenId>(i));
  }
}

void Vocabulary::add(const std::string& w) {
  if (w.empty()) throw std::invalid_argument("empty vocabulary word");
  if (!index_.emplace(w, static_cast<TokenId>(words_.size())).second) {
    throw std::invalid_argument("duplicate vocabulary word '" + w + "'");
  }
  words_.push_back(w);
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& sentences,
                             std::size_t max_size) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sentences) {
    for (const auto& t : s) ++counts[t];
  }
  for (const auto& s : kSpecialWords) counts.erase(s);
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > max_size) ranked.resize(max_size);
  std::vector<std::string> words;
  words.reserve(ranked.size());
  for (auto& [w, c] : ranked) words.push_back(w);
  return Vocabulary(words);
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    words.push_back(line);
  }
  return Vocabulary(words);
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write vocabulary " + path.string());
  for (std::size_t i = kNumSpecials; i < words_.size(); ++i) out << words_[i] << '\n';
}

const std::string& Vocabulary::word(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= words_.size()) {
    throw std::out_of_range("token id " + std::to_string(id) + " outside vocabulary of size " +
                            std::to_string(words_.size()));
  }
  return words_[static_cast<std::size_t>(id)];
}

TokenId Vocabulary::find(std::string_view w) const {
  auto it = index_.find(std::string(w));
  return it == index_.end() ? -1 : it->second;
}

TokenId Vocabulary::map_token(std::string_view w) const {
  if (TokenId id = find(w); id >= static_cast<TokenId>(kNumSpecials)) return id;
  if (auto idx = best_fuzzy_match(w, sorted_, kFuzzyThreshold)) return sorted_ids_[*idx];
  return kOov;
}

std::vector<TokenId> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(map_token(t));
  return ids;
}

std::vector<std::string> Vocabulary::decode(std::span<const TokenId> ids) const {
  std::vector<std::string> out;
  for (TokenId id : ids) {
    if (id == kPad || id == kSos || id == kEos) continue;
    out.push_back(word(id));
  }
  return out;
}

}  // namespace affectdialog
