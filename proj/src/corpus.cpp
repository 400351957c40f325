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

#include "affectdialog/corpus.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace affectdialog {

std::vector<TextPair> parse_text_pairs(const std::string& text) {
  std::vector<TextPair> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw CorpusParseError(line_no, "missing TAB separator");
    if (line.find('\t', tab + 1) != std::string::npos) {
      throw CorpusParseError(line_no, "more than one TAB separator");
    }
    TextPair p{normalize_and_tokenize(std::string_view(line).substr(0, tab)),
               normalize_and_tokenize(std::string_view(line).substr(tab + 1))};
    if (p.prompt.empty()) throw CorpusParseError(line_no, "empty prompt");
    if (p.response.empty()) throw CorpusParseError(line_no, "empty response");
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<TextPair> read_text_pairs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text_pairs(buf.str());
}

Corpus make_corpus(const std::vector<TextPair>& pairs, const Vocabulary& vocab,
                   std::size_t max_length) {
  if (max_length == 0) throw std::invalid_argument("max_length must be positive");
  std::unordered_map<std::string, TokenId> cache;
  auto map = [&](const std::vector<std::string>& toks) {
    std::vector<TokenId> ids;
    for (std::size_t i = 0; i < toks.size() && i < max_length; ++i) {
      auto [it, fresh] = cache.try_emplace(toks[i], 0);
      if (fresh) it->second = vocab.map_token(toks[i]);
      ids.push_back(it->second);
    }
    return ids;
  };
  Corpus c;
  c.pairs.reserve(pairs.size());
  for (const auto& p : pairs) c.pairs.push_back({map(p.prompt), map(p.response), {}});
  return c;
}

Corpus ingest_pairs(const std::filesystem::path& path, const Vocabulary& vocab,
                    std::size_t max_length) {
  return make_corpus(read_text_pairs(path), vocab, max_length);
}

Corpus label_corpus(const Corpus& corpus, const Vocabulary& vocab,
                    const EmotionClassifier& classifier) {
  Corpus out = corpus;
  for (auto& p : out.pairs) {
    const auto words = vocab.decode(p.response);
    p.target_emotion = classifier.classify(words);
  }
  return out;
}

Corpus reverse_corpus(const Corpus& corpus) {
  Corpus out = corpus;
  out.direction = corpus.direction == CorpusDirection::kForward ? CorpusDirection::kReversed
                                                                : CorpusDirection::kForward;
  for (auto& p : out.pairs) std::swap(p.prompt, p.response);
  return out;
}

double oov_fraction(const Corpus& corpus) {
  std::size_t total = 0, oov = 0;
  for (const auto& p : corpus.pairs) {
    for (const auto* seq : {&p.prompt, &p.response}) {
      for (TokenId id : *seq) {
        ++total;
        oov += id == Vocabulary::kOov;
      }
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(oov) / static_cast<double>(total);
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    // unbiased draw in [0, i)
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(idx[i - 1], idx[r % bound]);
  }
  return idx;
}

CorpusSplit split_corpus(const Corpus& corpus, const SplitSpec& spec) {
  const double sum = spec.train_frac + spec.val_frac + spec.test_frac;
  if (spec.train_frac < 0 || spec.val_frac < 0 || spec.test_frac < 0 ||
      std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must be non-negative and sum to 1");
  }
  const std::size_t n = corpus.size();
  auto floor_count = [n](double frac) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * frac + 1e-9));
  };
  const std::size_t n_train = std::min(n, floor_count(spec.train_frac));
  const std::size_t n_val = std::min(n - n_train, floor_count(spec.val_frac));

  const auto perm = seeded_permutation(n, spec.seed);
  CorpusSplit out;
  out.train.direction = out.val.direction = out.test.direction = corpus.direction;
  for (std::size_t i = 0; i < n; ++i) {
    Corpus& dst = i < n_train ? out.train : (i < n_train + n_val ? out.val : out.test);
    dst.pairs.push_back(corpus.pairs[perm[i]]);
  }
  return out;
}

}  // namespace affectdialog
