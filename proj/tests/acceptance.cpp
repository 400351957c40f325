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

// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "affectdialog/annotations.hpp"
#include "affectdialog/beam.hpp"
#include "affectdialog/metrics.hpp"
#include "affectdialog/rerank.hpp"
#include "affectdialog/trainer.hpp"
#include "test_util.hpp"

using namespace affectdialog;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::string failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures += " [" + what + "]";
    }
  }
};

// ---------------------------------------------------------------- gradients

void gradient_suite(Outcome& o) {
  std::mt19937_64 rng(21);
  const Mat vad = testutil::random_vocab_vad(12, rng);
  const std::vector<DialogPair> pairs{{{4, 5, 6}, {7, 8, 9, 10}, testutil::random_distribution(rng)},
                                      {{11, 4}, {5, 6, 7}, emotion_from_name("sadness")}};
  double worst = 0.0;
  for (const char* name : {"baseline", "see", "sed", "wi", "we", "wi+we"}) {
    Seq2SeqModel model(testutil::toy_config(ModelVariant::parse(name)), vad);
    const auto r = testutil::check_gradients(model, pairs, defaults::kMu, 1e-5);
    worst = std::max(worst, r.worst_rel);
    o.expect(r.worst_rel < 1e-4, std::string(name) + " " + r.worst_param + " rel " + std::to_string(r.worst_rel));
  }
  o.detail << "worst rel err " << std::scientific << std::setprecision(2) << worst;
}

// -------------------------------------------------------------- regularizer

void regularizer_zero(Outcome& o) {
  std::mt19937_64 rng(3);
  const Mat vad = testutil::random_vocab_vad(12, rng);
  const std::vector<TokenId> target{5, 9, 4, 11, 2};
  std::vector<Vec> one_hot;
  for (TokenId t : target) one_hot.push_back(Vec::Unit(12, t));
  const double a = affective_regularizer(one_hot, target, vad);
  o.expect(std::abs(a) <= 1e-12, "one-hot " + std::to_string(a));

  const Mat neutral = Mat::Constant(3, 12, 0.5);
  std::vector<Vec> random;
  for (std::size_t i = 0; i < target.size(); ++i) random.push_back(softmax(Vec::Random(12) * 3));
  const double b = affective_regularizer(random, target, neutral);
  o.expect(std::abs(b) <= 1e-12, "neutral " + std::to_string(b));
  o.detail << "one-hot " << a << ", neutral " << b;
}

// ------------------------------------------------------------- WE algebra

void we_algebra(Outcome& o) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1), big(-3, 3);
  double worst_sum = 0.0;
  bool exact1 = true, exact0 = true;
  for (int i = 0; i < 1000; ++i) {
    const auto V = static_cast<std::size_t>(5 + i % 40);
    const Mat vad = testutil::random_vocab_vad(V, rng);
    Vec logits(static_cast<Eigen::Index>(V));
    for (auto& x : logits) x = 4 * big(rng);
    const VadVector e{big(rng), big(rng), big(rng)};
    const double lambda = u(rng);
    worst_sum = std::max(worst_sum, std::abs(we_mixture(logits, e, vad, lambda).sum() - 1.0));
    exact1 = exact1 && we_mixture(logits, e, vad, 1.0) == softmax(logits);
    exact0 = exact0 && we_mixture(logits, e, vad, 0.0) == softmax(v_scores(e, vad));
  }
  o.expect(worst_sum <= 1e-9, "sum off by " + std::to_string(worst_sum));
  o.expect(exact1, "lambda=1 differs from the LM softmax");
  o.expect(exact0, "lambda=0 differs from the VAD softmax");

  double worst_tel = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Mat vad = testutil::random_vocab_vad(30, rng);
    const auto ids = testutil::random_ids(rng, 30, 20);
    const AffectiveGoal goal = init_affective_goal(testutil::random_distribution(rng), 20);
    AffectiveState s = AffectiveState::start(goal, 0.0);
    VadVector spent{};
    for (TokenId t : ids) {
      s = update_affective_state(s, t, vad);
      spent += vad_column(vad, t);
      const VadVector expect = goal.e0_vad - spent;
      for (std::size_t k = 0; k < 3; ++k) worst_tel = std::max(worst_tel, std::abs(s.e_t[k] - expect[k]));
    }
    o.expect(s.step == 20, "step count");
  }
  o.expect(worst_tel <= 1e-12, "telescoping off by " + std::to_string(worst_tel));
  o.detail << "max |sum-1| " << std::scientific << std::setprecision(1) << worst_sum << ", telescoping "
           << worst_tel;
}

// ------------------------------------------------------------------ M_VAD

void mvad_fidelity(Outcome& o) {
  // columns: anger, surprise, joy, sadness, fear, disgust
  const double V[6] = {0, 1, 1, 0, 0, 0};
  const double A[6] = {1, 1, 1, 0, 1, 0.5};
  const double D[6] = {1, 0, 1, 0, 0, 0.5};
  for (std::size_t j = 0; j < 6; ++j) {
    const VadVector got = emotion_to_vad(EmotionDistribution::one_hot(static_cast<Emotion>(j)));
    o.expect(got.v == V[j] && got.a == A[j] && got.d == D[j], std::string(emotion_name(static_cast<Emotion>(j))));
  }
  o.detail << "6 columns exact";
}

// ------------------------------------------- overfit and steering (shared)

struct ToyWorld {
  Vocabulary vocab;
  VadLexicon lexicon;
  Mat vad;
  Corpus corpus;

  ToyWorld() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<std::string> words;
    std::map<std::string, VadVector> entries;
    for (int i = 0; i < 20; ++i) {
      words.push_back("w" + std::to_string(10 + i));
      entries[words.back()] = {u(rng), u(rng), u(rng)};
    }
    vocab = Vocabulary(words);
    lexicon = VadLexicon(entries);
    vad = vocabulary_vad_matrix(vocab, lexicon);
    const VadPrototypeClassifier classifier(lexicon);
    std::uniform_int_distribution<std::size_t> plen(2, 4), rlen(2, 5);
    for (int i = 0; i < 32; ++i) {
      DialogPair p;
      p.prompt = testutil::random_ids(rng, vocab.size(), plen(rng));
      p.response = testutil::random_ids(rng, vocab.size(), rlen(rng));
      p.target_emotion = classifier.classify(vocab.decode(p.response));
      corpus.pairs.push_back(std::move(p));
    }
  }

  ModelConfig config(const ModelVariant& v) const {
    ModelConfig c;
    c.vocab_size = vocab.size();
    c.embed_dim = 16;
    c.hidden_dim = 32;
    c.encoder_layers = 2;
    c.dropout = 0.0;
    c.max_length = 6;
    c.variant = v;
    c.seed = 5;
    return c;
  }

  static TrainConfig train_config(std::size_t epochs) {
    TrainConfig t;
    t.epochs = epochs;
    t.lr = 0.01;
    t.batch_size = 4;
    t.max_length = 6;
    t.seed = 9;
    t.min_lr = 1e-4;
    return t;
  }
};

void overfit(Outcome& o, const ToyWorld& w) {
  Seq2SeqModel model(w.config(ModelVariant::parse("wi+we")), w.vad);
  train_model(model, w.corpus, Corpus{}, ToyWorld::train_config(500), w.vocab);
  const double loss = evaluate_loss(model, w.corpus, defaults::kMu).mean_loss;
  std::size_t exact = 0;
  for (const auto& p : w.corpus.pairs) {
    const DecodeSession s(model, p.prompt, p.target_emotion);
    const Candidate c = greedy_decode(s, model.config().max_length);
    if (c.response(Vocabulary::kEos) == p.response) ++exact;
  }
  const double frac = static_cast<double>(exact) / static_cast<double>(w.corpus.size());
  o.expect(loss < 0.1, "train loss " + std::to_string(loss));
  o.expect(frac >= 0.9, "exact " + std::to_string(exact) + "/32");
  o.detail << "train loss " << std::setprecision(4) << loss << ", exact " << exact << "/32, lambda "
           << sigmoid(model.lambda_param());
}

void steering(Outcome& o, const ToyWorld& w) {
  // A memorizing model puts nearly all mass on one candidate, so the sweep
  // uses a briefly trained one.
  Seq2SeqModel forward(w.config(ModelVariant::parse("wi+we")), w.vad);
  train_model(forward, w.corpus, Corpus{}, ToyWorld::train_config(15), w.vocab);
  Seq2SeqModel reverse(w.config(ModelVariant{}), w.vad);
  train_model(reverse, reverse_corpus(w.corpus), Corpus{}, ToyWorld::train_config(100), w.vocab);
  const VadPrototypeClassifier classifier(w.lexicon);

  // The shipped weights, plus a small alpha under which the sweep actually
  // moves the selection.
  const std::vector<std::pair<double, double>> weightings{{RerankWeights{}.alpha, RerankWeights{}.beta},
                                                         {0.5, RerankWeights{}.beta}};
  std::size_t violated = 0, lists = 0, moves = 0;
  double first = 0.0, last = 0.0;
  for (std::size_t k = 0; k < 12; ++k) {
    const auto& prompt = w.corpus.pairs[k].prompt;
    const auto e0 = EmotionDistribution::one_hot(static_cast<Emotion>(k % kNumEmotions));
    const DecodeSession s(forward, prompt, e0);
    auto cands = beam_search(s, {200, forward.config().max_length, true});
    o.expect(cands.size() == 200, "list has " + std::to_string(cands.size()) + " candidates");
    annotate_candidates(cands, prompt, reverse, w.vocab, w.vocab, classifier, e0);
    for (const auto& [alpha, beta] : weightings) {
      std::vector<double> dist;
      for (double gamma : gamma_grid()) {
        score_candidates(cands, e0, {alpha, beta, gamma});
        dist.push_back(emotion_distance(*select_final(cands).emotion, e0));
      }
      for (std::size_t i = 0; i < dist.size(); ++i) {
        for (std::size_t j = i + 1; j < dist.size(); ++j) violated += dist[j] > dist[i] ? 1 : 0;
        if (i > 0 && dist[i] != dist[i - 1]) ++moves;
      }
      first += dist.front();
      last += dist.back();
      ++lists;
    }
  }
  o.expect(violated == 0, std::to_string(violated) + " violated pairs");
  o.detail << lists << " sweeps, mean distance " << std::setprecision(3) << first / static_cast<double>(lists)
           << " -> " << last / static_cast<double>(lists) << ", " << moves << " selection changes, violated pairs "
           << violated;
}

// --------------------------------------------------------- decoding oracle

class TableModel {
 public:
  using State = std::vector<TokenId>;
  TableModel(int vocab, std::uint64_t seed) : vocab_(vocab), rng_(seed) {}
  State start() const { return {}; }
  State advance(const State& s, TokenId t) const {
    State n = s;
    n.push_back(t);
    return n;
  }
  const Vec& log_probs(const State& s) const {
    auto it = table_.find(s);
    if (it != table_.end()) return it->second;
    std::gamma_distribution<double> g(0.7);
    Vec p(vocab_);
    for (auto& x : p) x = g(rng_) + 1e-3;
    p /= p.sum();
    return table_.emplace(s, p.array().log().matrix()).first->second;
  }
  TokenId eos() const { return 0; }

 private:
  int vocab_;
  mutable std::mt19937_64 rng_;
  mutable std::map<State, Vec> table_;
};

void enumerate_all(const TableModel& m, std::vector<TokenId>& prefix, double lp, std::size_t max_len,
                   std::vector<std::pair<std::vector<TokenId>, double>>& out) {
  const Vec step = m.log_probs(prefix);
  for (Eigen::Index t = 0; t < step.size(); ++t) {
    prefix.push_back(static_cast<TokenId>(t));
    if (t == m.eos() || prefix.size() == max_len) {
      out.emplace_back(prefix, lp + step(t));
    } else {
      enumerate_all(m, prefix, lp + step(t), max_len, out);
    }
    prefix.pop_back();
  }
}

void decoding_oracle(Outcome& o) {
  std::size_t instances = 0, mismatches = 0;
  for (int vocab = 2; vocab <= 4; ++vocab) {
    for (std::size_t len = 1; len <= 4; ++len) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const TableModel m(vocab, seed * 1000 + 10 * vocab + len);
        std::vector<std::pair<std::vector<TokenId>, double>> all;
        std::vector<TokenId> prefix;
        enumerate_all(m, prefix, 0.0, len, all);
        std::sort(all.begin(), all.end(),
                  [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; });
        const auto B = static_cast<std::size_t>(std::pow(vocab, len));
        const auto got = beam_search(m, {B, len, false});
        bool same = got.size() == all.size();
        for (std::size_t i = 0; same && i < got.size(); ++i) same = got[i].ids == all[i].first;
        for (bool norm : {false, true}) {
          const auto one = beam_search(m, {1, len, norm});
          const auto greedy = greedy_decode(m, len, norm);
          same = same && one.size() == 1 && one[0].ids == greedy.ids && one[0].fwd_logprob == greedy.fwd_logprob;
        }
        ++instances;
        if (!same) ++mismatches;
      }
    }
  }
  o.expect(mismatches == 0, std::to_string(mismatches) + " mismatching instances");
  o.detail << instances << " instances, " << mismatches << " mismatches";
}

// ---------------------------------------------------------- metric oracles

double brute_bleu(const std::vector<Sentence>& c, const std::vector<Sentence>& r) {
  double logp = 0.0;
  double clen = 0, rlen = 0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    clen += static_cast<double>(c[k].size());
    rlen += static_cast<double>(r[k].size());
  }
  for (std::size_t n = 1; n <= 4; ++n) {
    double match = 0, total = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      std::vector<Sentence> ref;
      for (std::size_t i = 0; i + n <= r[k].size(); ++i) ref.emplace_back(r[k].begin() + i, r[k].begin() + i + n);
      for (std::size_t i = 0; i + n <= c[k].size(); ++i) {
        const Sentence g(c[k].begin() + i, c[k].begin() + i + n);
        total += 1;
        auto it = std::find(ref.begin(), ref.end(), g);
        if (it != ref.end()) {
          ref.erase(it);
          match += 1;
        }
      }
    }
    if (n == 1 && match == 0) return 0.0;
    logp += n == 1 ? std::log(match / total) : std::log((match + 1) / (total + 1));
  }
  const double bp = clen > rlen ? 1.0 : std::exp(1.0 - rlen / clen);
  return bp * std::exp(logp / 4);
}

double brute_distinct(const std::vector<Sentence>& rs, std::size_t n) {
  std::vector<Sentence> seen;
  double tokens = 0;
  for (const auto& r : rs) {
    tokens += static_cast<double>(r.size());
    for (std::size_t i = 0; i + n <= r.size(); ++i) {
      const Sentence g(r.begin() + i, r.begin() + i + n);
      if (std::find(seen.begin(), seen.end(), g) == seen.end()) seen.push_back(g);
    }
  }
  return static_cast<double>(seen.size()) / tokens;
}

void metric_oracles(Outcome& o) {
  std::mt19937_64 rng(50);
  std::uniform_int_distribution<int> len(1, 10), word(0, 4), count(1, 8);
  const auto corpus = [&](std::size_t n) {
    std::vector<Sentence> out(n);
    for (auto& s : out) {
      const int l = len(rng);
      for (int i = 0; i < l; ++i) s.push_back(std::string(1, static_cast<char>('a' + word(rng))));
    }
    return out;
  };
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<std::size_t>(count(rng));
    const auto c = corpus(n), r = corpus(n);
    worst = std::max(worst, std::abs(bleu(c, r) - brute_bleu(c, r)));
    worst = std::max(worst, std::abs(distinct_n(c, 1) - brute_distinct(c, 1)));
    worst = std::max(worst, std::abs(distinct_n(c, 2) - brute_distinct(c, 2)));
  }
  o.expect(worst <= 1e-9, "oracle gap " + std::to_string(worst));
  const double aaa = distinct_n(std::vector<Sentence>{{"a", "a", "a"}}, 1);
  o.expect(aaa == 1.0 / 3, "distinct-1 of 'a a a' is " + std::to_string(aaa));
  // distinct-n divides by generated tokens, not by the number of n-grams
  const double abc = distinct_n(std::vector<Sentence>{{"a", "b", "c"}}, 2);
  o.expect(abc == 2.0 / 3, "distinct-2 of 'a b c' is " + std::to_string(abc));
  o.detail << "max oracle gap " << std::scientific << std::setprecision(1) << worst;
}

// ----------------------------------------------------------- gamma fitting

void gamma_recovery(Outcome& o) {
  const auto grid = gamma_grid();
  const std::size_t target = snap_gamma(4.2);
  std::size_t hits = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    std::mt19937_64 rng(trial);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<AnnotationRecord> recs;
    for (double g : grid) {
      for (int i = 0; i < 10; ++i) {
        AnnotationRecord r;
        r.target_emotion = EmotionDistribution::one_hot(static_cast<Emotion>(i % kNumEmotions));
        r.gamma_used = g;
        r.delta_e = (g - 4.2) * (g - 4.2) + noise(rng);
        recs.push_back(std::move(r));
      }
    }
    const double fit = fit_gamma_opt(compute_gamma_curve(recs));
    const auto bin = static_cast<long>(snap_gamma(fit));
    if (std::abs(bin - static_cast<long>(target)) <= 1) ++hits;
  }
  o.expect(hits >= 95, std::to_string(hits) + "/100 within one step");
  o.detail << hits << "/100 trials within one grid step";
}

// ---------------------------------------------------------------- defaults

void shipped_defaults(Outcome& o) {
  const RerankWeights w;
  o.expect(w.alpha == 50.0 && w.beta == 0.001 && w.gamma == 4.2, "rerank weights");
  const TrainConfig t;
  o.expect(t.lr == 0.001 && defaults::kForwardLr == 0.001 && defaults::kReverseLr == 0.01, "learning rates");
  o.expect(t.clip_norm == 5.0, "clip");
  o.expect(t.weight_decay == 1e-5, "weight decay");
  o.expect(defaults::kDropout == 0.2 && ModelConfig{}.dropout == 0.2, "dropout");
  o.expect(t.patience == 20 && t.lr_factor == 0.5, "plateau schedule");
  const SplitSpec s;
  o.expect(s.train_frac == 0.94 && s.val_frac == 0.01 && s.test_frac == 0.05, "splits");
  o.expect(defaults::kTrainFrac == 0.94 && defaults::kValFrac == 0.01 && defaults::kTestFrac == 0.05, "split constants");
  o.expect(defaults::kMaxLengthCornell == 20 && defaults::kMaxLengthOpenSubtitles == 30 && t.max_length == 20,
           "max length");
  o.detail << "alpha 50, beta 0.001, gamma 4.2; lr 0.001/0.01, clip 5, wd 1e-5, dropout 0.2, patience 20";
}

}  // namespace

int main() {
  const ToyWorld world;
  struct Criterion {
    std::string name;
    double budget_s;  // 0 = no stated limit
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{
      {"gradient suite", 120, gradient_suite},
      {"regularizer zero cases", 0, regularizer_zero},
      {"WE algebra", 0, we_algebra},
      {"M_VAD fidelity", 0, mvad_fidelity},
      {"overfit check", 300, [&](Outcome& o) { overfit(o, world); }},
      {"steering property", 0, [&](Outcome& o) { steering(o, world); }},
      {"decoding oracle", 0, decoding_oracle},
      {"metric oracles", 0, metric_oracles},
      {"gamma-fit synthetic recovery", 10, gamma_recovery},
      {"defaults", 0, shipped_defaults},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0) o.expect(secs < c.budget_s, "over the " + std::to_string(c.budget_s) + " s budget");
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail.str() << o.failures << " (" << std::fixed
              << std::setprecision(2) << secs << " s)" << std::defaultfloat << std::endl;
    if (!o.pass) ++failed;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
