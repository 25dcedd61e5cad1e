// Copyright 2026 The asreval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Native BERT encoder used by the "model" embedding backend. Weights come
// from a Hugging Face style model directory: model.safetensors,
// config.json (optional, sizes are inferred from the tensors) and
// vocab.txt.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "asreval/embed.hpp"
#include "asreval/kernels.hpp"

namespace asreval {

struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<float> values;  // row-major, converted to f32 on load

  std::size_t numel() const { return values.size(); }
};

// Reads every tensor of a .safetensors file (F32, F16 and BF16 payloads).
std::map<std::string, Tensor> read_safetensors(const std::filesystem::path& path);
// Writes F32 tensors; used to build small fixtures.
void write_safetensors(const std::filesystem::path& path, const std::map<std::string, Tensor>& tensors);

struct BertConfig {
  std::size_t hidden = 0;
  std::size_t heads = 0;
  std::size_t layers = 0;
  std::size_t intermediate = 0;
  std::size_t max_positions = 0;
  double layer_norm_eps = 1e-12;
  bool tanh_gelu = false;
};

class BertEncoder {
 public:
  static constexpr int kDefaultLayer = 9;

  // `config_json` may be empty; then heads default to hidden / 64.
  BertEncoder(const std::map<std::string, Tensor>& tensors, const std::string& config_json);

  const BertConfig& config() const { return config_; }

  // Hidden states after `layer` transformer blocks (0 = embedding output),
  // one row of width hidden per input id. Throws DataError for sequences
  // longer than the position table or ids outside the vocabulary.
  std::vector<float> hidden_states(const std::vector<std::int64_t>& ids, int layer,
                                   kernels::Exec exec = kernels::Exec::kParallel) const;

 private:
  struct Dense {
    std::vector<float> weight;  // out x in
    std::vector<float> bias;
    std::size_t in = 0;
    std::size_t out = 0;
  };
  struct Norm {
    std::vector<float> gamma;
    std::vector<float> beta;
  };
  struct Block {
    Dense query, key, value, attn_out;
    Norm attn_norm;
    Dense intermediate, output;
    Norm out_norm;
  };

  void layer_norm(std::vector<float>& x, std::size_t rows, const Norm& norm) const;
  void run_block(const Block& b, std::vector<float>& h, std::size_t rows, kernels::Exec exec) const;

  BertConfig config_;
  std::size_t vocab_size_ = 0;
  std::vector<float> word_embeddings_;
  std::vector<float> position_embeddings_;
  std::vector<float> token_type_embeddings_;
  Norm embedding_norm_;
  std::vector<Block> blocks_;
};

// Embedding backend running BertEncoder and reading one hidden layer.
class ModelRuntimeBackend final : public EmbeddingBackend {
 public:
  // `model_path` is a model directory or its .safetensors file; config.json
  // and vocab.txt are looked up next to it.
  static std::unique_ptr<ModelRuntimeBackend> load(const std::filesystem::path& model_path,
                                                   int layer = BertEncoder::kDefaultLayer);
  ModelRuntimeBackend(BertEncoder encoder, Vocabulary vocab, int layer);

  std::string name() const override { return "model"; }
  std::size_t dim() const override { return encoder_.config().hidden; }
  const Vocabulary& vocabulary() const override { return vocab_; }
  EmbeddingMatrix encode(const TokenSeq& seq) const override;

  int layer() const { return layer_; }
  void set_exec(kernels::Exec exec) { exec_ = exec; }

 private:
  BertEncoder encoder_;
  Vocabulary vocab_;
  int layer_;
  kernels::Exec exec_ = kernels::Exec::kParallel;
};

}  // namespace asreval
