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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "affectdialog/annotations.hpp"
#include "affectdialog/checkpoint.hpp"
#include "affectdialog/generator.hpp"
#include "affectdialog/metrics.hpp"
#include "affectdialog/service.hpp"
#include "affectdialog/trainer.hpp"

using namespace affectdialog;

namespace {

struct TrainArgs {
  std::string corpus, lexicon, out = "run", variant = "baseline";
  bool reverse = false;
  std::size_t epochs = 10, batch_size = 32, max_length = defaults::kMaxLengthCornell;
  std::size_t vocab_size = defaults::kVocabularySize, layers = defaults::kEncoderLayers;
  Eigen::Index embed = defaults::kEmbedDim, hidden = defaults::kEncoderHidden;
  std::uint64_t seed = 0;
  std::optional<double> lr;
  double mu = defaults::kMu, dropout = defaults::kDropout;
};

int run_train(const TrainArgs& a) {
  const VadLexicon lexicon = VadLexicon::load(a.lexicon);
  const VadPrototypeClassifier classifier(lexicon);
  const auto text = read_text_pairs(a.corpus);
  std::vector<std::vector<std::string>> sentences;
  for (const auto& p : text) {
    sentences.push_back(p.prompt);
    sentences.push_back(p.response);
  }
  const Vocabulary vocab = Vocabulary::build(sentences, a.vocab_size);
  Corpus corpus = make_corpus(text, vocab, a.max_length);
  if (a.reverse) corpus = reverse_corpus(corpus);
  corpus = label_corpus(corpus, vocab, classifier);
  std::cerr << "corpus: " << corpus.size() << " pairs, vocabulary " << vocab.size() << ", oov "
            << oov_fraction(corpus) << "\n";

  const CorpusSplit split = split_corpus(corpus, {.seed = a.seed});
  ModelConfig mc;
  mc.vocab_size = vocab.size();
  mc.embed_dim = a.embed;
  mc.hidden_dim = a.hidden;
  mc.encoder_layers = a.layers;
  mc.dropout = a.dropout;
  mc.max_length = a.max_length;
  mc.variant = ModelVariant::parse(a.variant);
  mc.seed = a.seed;
  Seq2SeqModel model(mc, vocabulary_vad_matrix(vocab, lexicon));

  TrainConfig tc;
  tc.mu = a.mu;
  tc.max_length = a.max_length;
  tc.epochs = a.epochs;
  tc.batch_size = a.batch_size;
  tc.lr = a.lr.value_or(a.reverse ? defaults::kReverseLr : defaults::kForwardLr);
  tc.seed = a.seed;

  const std::filesystem::path dir(a.out);
  std::filesystem::create_directories(dir);
  {
    std::ofstream test(dir / "test.tsv");
    for (const auto& p : split.test.pairs) {
      test << join_tokens(vocab.decode(p.prompt)) << '\t' << join_tokens(vocab.decode(p.response)) << '\n';
    }
  }
  const auto history = train_model(model, split.train, split.val, tc, vocab, dir);
  for (const auto& r : history) {
    std::cerr << "epoch " << r.epoch << " train " << r.train_loss << " val " << r.val_loss << " reg "
              << r.reg << " lr " << r.lr << "\n";
  }
  std::cout << (dir / "best.ckpt").string() << "\n";
  return 0;
}

struct ModelArgs {
  std::string fwd, rev, lexicon;
  std::size_t beam = 10;
  std::optional<double> gamma;
};

std::unique_ptr<Generator> load_generator(const ModelArgs& a) {
  GeneratorConfig cfg;
  cfg.default_beam_size = a.beam;
  cfg.max_beam_size = std::max<std::size_t>(cfg.max_beam_size, a.beam);
  if (a.gamma) cfg.weights.gamma = *a.gamma;
  return std::make_unique<Generator>(load_checkpoint(a.fwd), load_checkpoint(a.rev),
                                     VadLexicon::load(a.lexicon), cfg);
}

int run_generate(const ModelArgs& m, const std::string& prompt, const std::string& emotion,
                 const std::string& report, bool json) {
  const auto gen = load_generator(m);
  GenerationRequest req;
  req.prompt = prompt;
  req.emotion = emotion_from_name(emotion);
  const GenerationResult r = gen->generate(req);
  if (!report.empty()) {
    std::ofstream out(report);
    write_rerank_report(out, r.candidates, gen->forward_vocab(), r.emotion);
  }
  if (json) {
    std::cout << gen->result_to_json(r).dump(2) << "\n";
  } else {
    std::cout << r.response << "\n";
  }
  return 0;
}

int run_evaluate(const ModelArgs& m, const std::string& corpus, const std::string& emotion,
                 std::size_t limit, const std::string& out_path) {
  const auto gen = load_generator(m);
  const VadLexicon lexicon = VadLexicon::load(m.lexicon);
  const VadPrototypeClassifier classifier(lexicon);
  auto pairs = read_text_pairs(corpus);
  if (limit && pairs.size() > limit) pairs.resize(limit);

  std::vector<Sentence> responses, references;
  std::vector<std::vector<Sentence>> candidate_lists;
  for (const auto& p : pairs) {
    GenerationRequest req;
    req.prompt = join_tokens(p.prompt);
    req.emotion = emotion.empty() ? classifier.classify(p.response) : emotion_from_name(emotion);
    const GenerationResult r = gen->generate(req);
    responses.push_back(normalize_and_tokenize(r.response));
    references.push_back(p.response);
    std::vector<Sentence> list;
    for (const auto& c : r.candidates) list.push_back(gen->forward_vocab().decode(c.response()));
    candidate_lists.push_back(std::move(list));
  }
  EvalReport report = evaluate_responses(responses, references);
  report.candidates = candidate_list_bleu(candidate_lists, references);
  const std::string text = report.to_json().dump();
  if (!out_path.empty()) std::ofstream(out_path) << text << "\n";
  std::cout << text << "\n";
  return 0;
}

int run_gamma_fit(const std::string& store_path, const std::string& emotion,
                  std::optional<double> min_norm) {
  const AnnotationStore store(store_path);
  CurveFilter filter;
  if (!emotion.empty()) filter.emotion = emotion_from_name(emotion).argmax();
  filter.min_vad_norm = min_norm;
  const auto records = store.records();
  const GammaCurve curve = compute_gamma_curve(records, filter);
  nlohmann::json out = curve.to_json();
  out["gamma_opt"] = fit_gamma_opt(curve);
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emotion-steered response generation"};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "train a forward or reverse model");
  train->add_option("--corpus", ta.corpus, "prompt<TAB>response file")->required()->check(CLI::ExistingFile);
  train->add_option("--lexicon", ta.lexicon, "word<TAB>V<TAB>A<TAB>D lexicon")->required()->check(CLI::ExistingFile);
  train->add_option("--variant", ta.variant, "baseline|see|sed|wi|we|wi+we")->capture_default_str();
  train->add_flag("--reverse", ta.reverse, "train on swapped pairs");
  train->add_option("--epochs", ta.epochs)->capture_default_str();
  train->add_option("--seed", ta.seed)->capture_default_str();
  train->add_option("--out", ta.out, "run directory")->capture_default_str();
  train->add_option("--batch-size", ta.batch_size)->capture_default_str();
  train->add_option("--max-length", ta.max_length)->capture_default_str();
  train->add_option("--vocab-size", ta.vocab_size)->capture_default_str();
  train->add_option("--embed", ta.embed)->capture_default_str();
  train->add_option("--hidden", ta.hidden, "encoder hidden size per direction")->capture_default_str();
  train->add_option("--layers", ta.layers)->capture_default_str();
  train->add_option("--lr", ta.lr, "default 0.001, or 0.01 with --reverse");
  train->add_option("--mu", ta.mu)->capture_default_str();
  train->add_option("--dropout", ta.dropout)->capture_default_str();

  ModelArgs ma;
  const auto add_model_opts = [&ma](CLI::App* cmd) {
    cmd->add_option("--fwd", ma.fwd, "forward checkpoint")->required()->check(CLI::ExistingFile);
    cmd->add_option("--rev", ma.rev, "reverse checkpoint")->required()->check(CLI::ExistingFile);
    cmd->add_option("--lexicon", ma.lexicon)->required()->check(CLI::ExistingFile);
    cmd->add_option("--beam", ma.beam, "beam size")->capture_default_str();
    cmd->add_option("--gamma", ma.gamma, "emotion weight (default 4.2)");
  };

  std::string prompt, emotion = "joy", report;
  bool json = false;
  auto* generate = app.add_subcommand("generate", "generate one response");
  add_model_opts(generate);
  generate->add_option("--prompt", prompt)->required();
  generate->add_option("--emotion", emotion)->capture_default_str();
  generate->add_option("--report", report, "write the rerank report (JSONL) here");
  generate->add_flag("--json", json, "print all candidates and score terms");

  std::string eval_corpus, eval_emotion, eval_out;
  std::size_t limit = 0;
  auto* evaluate = app.add_subcommand("evaluate", "BLEU and distinct-n over a corpus");
  add_model_opts(evaluate);
  evaluate->add_option("--corpus", eval_corpus)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--emotion", eval_emotion, "fixed target (default: classify the reference)");
  evaluate->add_option("--limit", limit, "use the first N pairs");
  evaluate->add_option("--out", eval_out, "also write the report here");

  std::string store_path, fit_emotion;
  std::optional<double> min_norm;
  auto* gamma_fit = app.add_subcommand("gamma-fit", "fit gamma from stored annotations");
  gamma_fit->add_option("--store", store_path)->required()->check(CLI::ExistingFile);
  gamma_fit->add_option("--emotion", fit_emotion, "restrict to one target emotion");
  gamma_fit->add_option("--min-vad-norm", min_norm, "keep annotations with a larger VAD norm");

  std::string host = "127.0.0.1", serve_store = "annotations.jsonl";
  int port = 8080;
  ModelArgs sa;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP generation and annotation service");
  serve_cmd->add_option("--port", port)->capture_default_str();
  serve_cmd->add_option("--host", host)->capture_default_str();
  serve_cmd->add_option("--fwd", sa.fwd, "forward checkpoint")->check(CLI::ExistingFile);
  serve_cmd->add_option("--rev", sa.rev, "reverse checkpoint")->check(CLI::ExistingFile);
  serve_cmd->add_option("--lexicon", sa.lexicon)->check(CLI::ExistingFile);
  serve_cmd->add_option("--beam", sa.beam)->capture_default_str();
  serve_cmd->add_option("--store", serve_store, "annotation file")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return run_train(ta);
    if (*generate) return run_generate(ma, prompt, emotion, report, json);
    if (*evaluate) return run_evaluate(ma, eval_corpus, eval_emotion, limit, eval_out);
    if (*gamma_fit) return run_gamma_fit(store_path, fit_emotion, min_norm);
    if (*serve_cmd) {
      std::shared_ptr<const Generator> gen;
      if (!sa.fwd.empty() || !sa.rev.empty()) {
        if (sa.fwd.empty() || sa.rev.empty() || sa.lexicon.empty()) {
          std::cerr << "serve: --fwd, --rev and --lexicon go together\n";
          return 2;
        }
        gen = load_generator(sa);
      }
      AffectService service(gen, std::make_shared<AnnotationStore>(serve_store));
      std::cerr << "listening on " << host << ":" << port << "\n";
      serve(service, host, port);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
