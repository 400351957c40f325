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
#include <stdexcept>
#include <string>
#include <vector>

#include "affectdialog/affect.hpp"
#include "affectdialog/classifier.hpp"
#include "affectdialog/text.hpp"

namespace affectdialog {

struct DialogPair {
  std::vector<TokenId> prompt;
  std::vector<TokenId> response;
  EmotionDistribution target_emotion;  // uniform until labeled

  friend bool operator==(const DialogPair&, const DialogPair&) = default;
};

enum class CorpusDirection { kForward, kReversed };

struct Corpus {
  std::vector<DialogPair> pairs;
  CorpusDirection direction = CorpusDirection::kForward;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  friend bool operator==(const Corpus&, const Corpus&) = default;
};

class CorpusParseError : public std::runtime_error {
 public:
  CorpusParseError(std::size_t line, const std::string& what)
      : std::runtime_error("corpus line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Raw `prompt<TAB>response` text pairs, tokenized.
struct TextPair {
  std::vector<std::string> prompt;
  std::vector<std::string> response;
};

/// Reads a corpus file; blank lines are skipped. Throws CorpusParseError for
/// a line without exactly one TAB or with an empty side.
std::vector<TextPair> read_text_pairs(const std::filesystem::path& path);
std::vector<TextPair> parse_text_pairs(const std::string& text);

/// Maps tokens through `vocab` (fuzzy), truncating each side to `max_length`.
Corpus make_corpus(const std::vector<TextPair>& pairs, const Vocabulary& vocab,
                   std::size_t max_length);

Corpus ingest_pairs(const std::filesystem::path& path, const Vocabulary& vocab,
                    std::size_t max_length);

/// Sets every pair's target emotion from its response words.
Corpus label_corpus(const Corpus& corpus, const Vocabulary& vocab,
                    const EmotionClassifier& classifier);

/// Swaps prompt and response pairwise; labels are carried unchanged.
Corpus reverse_corpus(const Corpus& corpus);

/// Fraction of produced token ids that are OOV.
double oov_fraction(const Corpus& corpus);

struct SplitSpec {
  double train_frac = 0.94;
  double val_frac = 0.01;
  double test_frac = 0.05;
  std::uint64_t seed = 0;
};

struct CorpusSplit {
  Corpus train;
  Corpus val;
  Corpus test;
};

/// Seeded Fisher-Yates shuffle, then contiguous train/val/test slices.
/// Train and validation sizes are floor(n * frac); test takes the rest.
CorpusSplit split_corpus(const Corpus& corpus, const SplitSpec& spec);

/// Index permutation used by split_corpus; stable across platforms.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace affectdialog
