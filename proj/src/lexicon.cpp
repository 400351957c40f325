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

#include "affectdialog/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace affectdialog {

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

double string_similarity(std::string_view a, std::string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

std::optional<std::size_t> best_fuzzy_match(std::string_view word,
                                            const std::vector<std::string>& sorted_words,
                                            double threshold) {
  std::optional<std::size_t> best;
  double best_sim = threshold;
  for (std::size_t i = 0; i < sorted_words.size(); ++i) {
    const std::string& cand = sorted_words[i];
    const std::size_t longest = std::max(cand.size(), word.size());
    const std::size_t shortest = std::min(cand.size(), word.size());
    // lev >= length difference, so this bounds the similarity from above.
    if (longest > 0 &&
        1.0 - static_cast<double>(longest - shortest) / static_cast<double>(longest) <= best_sim) {
      continue;
    }
    const double sim = string_similarity(word, cand);
    if (sim > best_sim) {
      best_sim = sim;
      best = i;
    }
  }
  return best;
}

VadLexicon::VadLexicon(std::map<std::string, VadVector> entries, double similarity_threshold)
    : threshold_(similarity_threshold) {
  for (auto& [word, vad] : entries) {
    if (!vad.in_unit_cube()) {
      throw std::invalid_argument("lexicon entry '" + word + "' outside [0,1]^3");
    }
    words_.push_back(word);
    entries_.emplace(word, vad);
  }
}

namespace {

double parse_unit(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::runtime_error("lexicon line " + std::to_string(line_no) + ": bad number '" +
                             std::string(field) + "'");
  }
  if (value < 0.0 || value > 1.0) {
    throw std::runtime_error("lexicon line " + std::to_string(line_no) +
                             ": value outside [0,1]");
  }
  return value;
}

}  // namespace

VadLexicon VadLexicon::parse(std::string_view text) {
  std::map<std::string, VadVector> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') {
      if (eol == text.size()) break;
      continue;
    }

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 4 || fields[0].empty()) {
      throw std::runtime_error("lexicon line " + std::to_string(line_no) +
                               ": expected word<TAB>V<TAB>A<TAB>D");
    }
    entries[std::string(fields[0])] = {parse_unit(fields[1], line_no),
                                       parse_unit(fields[2], line_no),
                                       parse_unit(fields[3], line_no)};
    if (eol == text.size()) break;
  }
  return VadLexicon(std::move(entries));
}

VadLexicon VadLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open lexicon " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<VadVector> VadLexicon::exact(std::string_view word) const {
  auto it = entries_.find(word);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

VadVector VadLexicon::lookup(std::string_view word) const {
  if (auto hit = exact(word)) return *hit;
  if (auto idx = best_fuzzy_match(word, words_, threshold_)) {
    return entries_.find(words_[*idx])->second;
  }
  return neutral_;
}

}  // namespace affectdialog
