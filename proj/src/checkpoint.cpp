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

#include "affectdialog/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace affectdialog {

namespace {

constexpr char kMagic[8] = {'A', 'F', 'D', 'G', 'C', 'K', 'P', 'T'};
const std::string kVadTensor = "buffer.vocab_vad";

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void tensor(const std::string& name, const Mat& m) {
    u32(static_cast<std::uint32_t>(name.size()));
    bytes(name.data(), name.size());
    u32(2);
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) f64(m.data()[i]);
  }

 private:
  void le(std::uint64_t v, int n) {
    char buf[8];
    for (int i = 0; i < n; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out_.write(buf, n);
  }
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(le(8)); }
  std::string str(std::size_t n) {
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }
  void read(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    if (!in_ || static_cast<std::size_t>(in_.gcount()) != n) {
      throw std::runtime_error("checkpoint truncated");
    }
  }
  std::pair<std::string, Mat> tensor() {
    std::string name = str(u32());
    const std::uint32_t rank = u32();
    if (rank < 1 || rank > 2) throw std::runtime_error("tensor " + name + " has unsupported rank");
    std::uint64_t rows = u64();
    std::uint64_t cols = rank == 2 ? u64() : 1;
    if (rows > (1ULL << 31) || cols > (1ULL << 31)) {
      throw std::runtime_error("tensor " + name + " has implausible shape");
    }
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = f64();
    return {std::move(name), std::move(m)};
  }

 private:
  std::uint64_t le(int n) {
    unsigned char buf[8];
    read(reinterpret_cast<char*>(buf), static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
  }
  std::istream& in_;
};

}  // namespace

nlohmann::json model_config_to_json(const ModelConfig& cfg) {
  return {{"vocab_size", cfg.vocab_size},
          {"embed_dim", cfg.embed_dim},
          {"hidden_dim", cfg.hidden_dim},
          {"decoder_hidden", cfg.decoder_hidden()},
          {"encoder_layers", cfg.encoder_layers},
          {"dropout", cfg.dropout},
          {"max_length", cfg.max_length},
          {"variant", cfg.variant.to_string()},
          {"seed", cfg.seed}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  cfg.vocab_size = j.at("vocab_size").get<std::size_t>();
  cfg.embed_dim = j.at("embed_dim").get<Eigen::Index>();
  cfg.hidden_dim = j.at("hidden_dim").get<Eigen::Index>();
  cfg.encoder_layers = j.at("encoder_layers").get<std::size_t>();
  cfg.dropout = j.at("dropout").get<double>();
  cfg.max_length = j.at("max_length").get<std::size_t>();
  cfg.variant = ModelVariant::parse(j.at("variant").get<std::string>());
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

void save_checkpoint(const std::filesystem::path& path, const Seq2SeqModel& model,
                     const Vocabulary& vocab) {
  if (vocab.size() != model.config().vocab_size) {
    throw std::invalid_argument("vocabulary size does not match the model");
  }
  nlohmann::json header;
  header["config"] = model_config_to_json(model.config());
  header["vocabulary"] = std::vector<std::string>(vocab.words().begin() + Vocabulary::kNumSpecials,
                                                  vocab.words().end());
  const std::string header_text = header.dump();

  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint " + tmp.string());
    Writer w(out);
    w.bytes(kMagic, sizeof kMagic);
    w.u32(kCheckpointVersion);
    w.u64(header_text.size());
    w.bytes(header_text.data(), header_text.size());
    const auto& params = model.params();
    w.u32(static_cast<std::uint32_t>(params.size() + 1));
    for (std::size_t i = 0; i < params.size(); ++i) w.tensor(params[i].name, params[i].value);
    w.tensor(kVadTensor, model.vocab_vad());
    out.flush();
    if (!out) throw std::runtime_error("error writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  Reader r(in);
  char magic[sizeof kMagic];
  r.read(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw std::runtime_error(path.string() + " is not a checkpoint");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint64_t header_len = r.u64();
  if (header_len > (1ULL << 32)) throw std::runtime_error("implausible checkpoint header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(r.str(header_len));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("bad checkpoint header: ") + e.what());
  }
  ModelConfig cfg = model_config_from_json(header.at("config"));
  Vocabulary vocab(header.at("vocabulary").get<std::vector<std::string>>());

  ParameterStore params;
  Mat vad;
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    auto [name, value] = r.tensor();
    if (name == kVadTensor) {
      vad = std::move(value);
      continue;
    }
    Parameter& p = params.add(name, value.rows(), value.cols());
    p.value = std::move(value);
  }
  if (vad.size() == 0) throw std::runtime_error("checkpoint lacks " + kVadTensor);
  LoadedCheckpoint out{std::move(vocab), nullptr};
  out.model = std::make_unique<Seq2SeqModel>(std::move(cfg), std::move(vad), std::move(params));
  if (out.vocab.size() != out.model->config().vocab_size) {
    throw std::runtime_error("checkpoint vocabulary does not match its config");
  }
  return out;
}

}  // namespace affectdialog
