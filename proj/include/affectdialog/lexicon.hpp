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

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "affectdialog/affect.hpp"

namespace affectdialog {

/// Unit-cost edit distance over bytes.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// 1 - lev(a,b) / max(|a|,|b|); 1 when both are empty.
double string_similarity(std::string_view a, std::string_view b);

/// Default cut-off for fuzzy matches; a match must score strictly above it.
inline constexpr double kFuzzyThreshold = 0.9;

/// Index of the most similar word in `sorted_words` whose similarity to `word`
/// exceeds `threshold`. Ties go to the earliest (lexicographically smallest)
/// entry, so `sorted_words` must be sorted.
std::optional<std::size_t> best_fuzzy_match(std::string_view word,
                                            const std::vector<std::string>& sorted_words,
                                            double threshold = kFuzzyThreshold);

/// Word -> VAD table with total lookup: exact hit, then fuzzy neighbour,
/// then the neutral vector.
class VadLexicon {
 public:
  VadLexicon() = default;
  explicit VadLexicon(std::map<std::string, VadVector> entries,
                      double similarity_threshold = kFuzzyThreshold);

  /// Parses `word<TAB>V<TAB>A<TAB>D` lines; `#` lines and blank lines are
  /// skipped. Throws std::runtime_error naming the offending line.
  static VadLexicon load(const std::filesystem::path& path);
  static VadLexicon parse(std::string_view text);

  VadVector lookup(std::string_view word) const;
  std::optional<VadVector> exact(std::string_view word) const;

  std::size_t size() const { return words_.size(); }
  double similarity_threshold() const { return threshold_; }
  const VadVector& neutral() const { return neutral_; }
  const std::map<std::string, VadVector, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, VadVector, std::less<>> entries_;
  std::vector<std::string> words_;  // sorted keys of entries_
  VadVector neutral_ = kNeutralVad;
  double threshold_ = kFuzzyThreshold;
};

}  // namespace affectdialog
