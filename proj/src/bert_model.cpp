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

#include "asreval/bert_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "asreval/corpus.hpp"
#include "asreval/error.hpp"
#include "json.hpp"

namespace asreval {
namespace {

using nlohmann::json;

float half_to_float(std::uint16_t h) {
  std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000) << 16;
  std::uint32_t exp = (h >> 10) & 0x1F;
  std::uint32_t mant = h & 0x3FF;
  std::uint32_t bits;
  if (exp == 0) {
    if (mant == 0) {
      bits = sign;
    } else {
      // Subnormal: renormalize.
      int e = -1;
      do {
        ++e;
        mant <<= 1;
      } while ((mant & 0x400) == 0);
      bits = sign | static_cast<std::uint32_t>(127 - 15 - e) << 23 | (mant & 0x3FF) << 13;
    }
  } else if (exp == 0x1F) {
    bits = sign | 0x7F800000u | mant << 13;
  } else {
    bits = sign | (exp + 127 - 15) << 23 | mant << 13;
  }
  return std::bit_cast<float>(bits);
}

template <typename T>
T read_le(const unsigned char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof(T));
  }
  return v;
}

const Tensor& require(const std::map<std::string, Tensor>& tensors, const std::string& name) {
  for (const std::string prefix : {"", "bert."}) {
    auto it = tensors.find(prefix + name);
    if (it != tensors.end()) return it->second;
  }
  throw DataError("model is missing tensor '" + name + "'");
}

const Tensor& require_any(const std::map<std::string, Tensor>& tensors, const std::string& a,
                          const std::string& b) {
  for (const std::string prefix : {"", "bert."}) {
    if (auto it = tensors.find(prefix + a); it != tensors.end()) return it->second;
    if (auto it = tensors.find(prefix + b); it != tensors.end()) return it->second;
  }
  throw DataError("model is missing tensor '" + a + "'");
}

bool has_tensor(const std::map<std::string, Tensor>& tensors, const std::string& name) {
  return tensors.count(name) > 0 || tensors.count("bert." + name) > 0;
}

float gelu(float x, bool tanh_approx) {
  if (tanh_approx) {
    constexpr float kC = 0.7978845608028654f;  // sqrt(2 / pi)
    return 0.5f * x * (1.0f + std::tanh(kC * (x + 0.044715f * x * x * x)));
  }
  return 0.5f * x * (1.0f + std::erf(x * 0.7071067811865476f));
}

std::filesystem::path sibling(const std::filesystem::path& model_path, const char* name) {
  auto dir = std::filesystem::is_directory(model_path) ? model_path : model_path.parent_path();
  return dir / name;
}

}  // namespace

std::map<std::string, Tensor> read_safetensors(const std::filesystem::path& path) {
  std::string raw = read_file(path);
  if (raw.size() < 8) throw DataError(path.string() + ": truncated safetensors header");
  const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());
  auto header_len = read_le<std::uint64_t>(bytes);
  if (header_len > raw.size() - 8) throw DataError(path.string() + ": bad safetensors header length");
  json header;
  try {
    header = json::parse(raw.substr(8, header_len));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": bad safetensors header: " + e.what());
  }
  const unsigned char* data = bytes + 8 + header_len;
  const std::size_t data_size = raw.size() - 8 - header_len;

  std::map<std::string, Tensor> out;
  for (const auto& [name, info] : header.items()) {
    if (name == "__metadata__") continue;
    Tensor t;
    t.shape = info.at("shape").get<std::vector<std::int64_t>>();
    auto offsets = info.at("data_offsets").get<std::vector<std::size_t>>();
    std::string dtype = info.at("dtype").get<std::string>();
    if (offsets.size() != 2 || offsets[0] > offsets[1] || offsets[1] > data_size) {
      throw DataError(path.string() + ": bad data offsets for '" + name + "'");
    }
    std::size_t count = 1;
    for (auto d : t.shape) count *= static_cast<std::size_t>(d);
    std::size_t width = dtype == "F32" ? 4 : (dtype == "F16" || dtype == "BF16") ? 2 : 0;
    if (width == 0) throw DataError(path.string() + ": unsupported dtype " + dtype + " for '" + name + "'");
    if (count * width != offsets[1] - offsets[0]) {
      throw DataError(path.string() + ": size mismatch for '" + name + "'");
    }
    t.values.resize(count);
    const unsigned char* p = data + offsets[0];
    for (std::size_t i = 0; i < count; ++i) {
      if (dtype == "F32") {
        t.values[i] = read_le<float>(p + 4 * i);
      } else if (dtype == "F16") {
        t.values[i] = half_to_float(read_le<std::uint16_t>(p + 2 * i));
      } else {
        std::uint32_t bits = static_cast<std::uint32_t>(read_le<std::uint16_t>(p + 2 * i)) << 16;
        t.values[i] = std::bit_cast<float>(bits);
      }
    }
    out.emplace(name, std::move(t));
  }
  return out;
}

void write_safetensors(const std::filesystem::path& path, const std::map<std::string, Tensor>& tensors) {
  json header = json::object();
  std::size_t offset = 0;
  for (const auto& [name, t] : tensors) {
    std::size_t bytes = t.values.size() * 4;
    header[name] = {{"dtype", "F32"}, {"shape", t.shape}, {"data_offsets", {offset, offset + bytes}}};
    offset += bytes;
  }
  std::string head = header.dump();
  while ((head.size() + 8) % 8 != 0) head.push_back(' ');
  std::string out(8, '\0');
  std::uint64_t len = head.size();
  for (int i = 0; i < 8; ++i) out[i] = static_cast<char>((len >> (8 * i)) & 0xFF);
  out += head;
  for (const auto& [name, t] : tensors) {
    for (float v : t.values) {
      auto bits = std::bit_cast<std::uint32_t>(v);
      for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
    }
  }
  write_file(path, out);
}

BertEncoder::BertEncoder(const std::map<std::string, Tensor>& tensors, const std::string& config_json) {
  const Tensor& words = require(tensors, "embeddings.word_embeddings.weight");
  const Tensor& positions = require(tensors, "embeddings.position_embeddings.weight");
  const Tensor& types = require(tensors, "embeddings.token_type_embeddings.weight");
  if (words.shape.size() != 2) throw DataError("word embedding table must be 2-D");
  vocab_size_ = static_cast<std::size_t>(words.shape[0]);
  config_.hidden = static_cast<std::size_t>(words.shape[1]);
  config_.max_positions = static_cast<std::size_t>(positions.shape.at(0));
  if (positions.shape.at(1) != words.shape[1] || types.shape.at(1) != words.shape[1]) {
    throw DataError("embedding tables disagree on hidden size");
  }
  word_embeddings_ = words.values;
  position_embeddings_ = positions.values;
  token_type_embeddings_ = types.values;

  auto norm = [&](const std::string& base) {
    Norm n;
    n.gamma = require_any(tensors, base + ".weight", base + ".gamma").values;
    n.beta = require_any(tensors, base + ".bias", base + ".beta").values;
    if (n.gamma.size() != config_.hidden || n.beta.size() != config_.hidden) {
      throw DataError("layer norm '" + base + "' has wrong width");
    }
    return n;
  };
  auto dense = [&](const std::string& base) {
    const Tensor& w = require(tensors, base + ".weight");
    const Tensor& b = require(tensors, base + ".bias");
    if (w.shape.size() != 2 || static_cast<std::int64_t>(b.numel()) != w.shape[0]) {
      throw DataError("dense layer '" + base + "' has inconsistent shapes");
    }
    Dense d;
    d.out = static_cast<std::size_t>(w.shape[0]);
    d.in = static_cast<std::size_t>(w.shape[1]);
    d.weight = w.values;
    d.bias = b.values;
    return d;
  };
  embedding_norm_ = norm("embeddings.LayerNorm");

  for (std::size_t l = 0;; ++l) {
    std::string base = "encoder.layer." + std::to_string(l);
    if (!has_tensor(tensors, base + ".attention.self.query.weight")) break;
    Block b;
    b.query = dense(base + ".attention.self.query");
    b.key = dense(base + ".attention.self.key");
    b.value = dense(base + ".attention.self.value");
    b.attn_out = dense(base + ".attention.output.dense");
    b.attn_norm = norm(base + ".attention.output.LayerNorm");
    b.intermediate = dense(base + ".intermediate.dense");
    b.output = dense(base + ".output.dense");
    b.out_norm = norm(base + ".output.LayerNorm");
    for (const Dense* d : {&b.query, &b.key, &b.value, &b.attn_out}) {
      if (d->in != config_.hidden || d->out != config_.hidden) {
        throw DataError(base + ": attention projection is not hidden x hidden");
      }
    }
    if (b.intermediate.in != config_.hidden || b.output.out != config_.hidden ||
        b.output.in != b.intermediate.out) {
      throw DataError(base + ": feed-forward shapes are inconsistent");
    }
    config_.intermediate = b.intermediate.out;
    blocks_.push_back(std::move(b));
  }
  config_.layers = blocks_.size();
  config_.heads = std::max<std::size_t>(1, config_.hidden / 64);

  if (!config_json.empty()) {
    json cfg;
    try {
      cfg = json::parse(config_json);
    } catch (const json::parse_error& e) {
      throw DataError(std::string("bad model config.json: ") + e.what());
    }
    if (cfg.contains("num_attention_heads")) config_.heads = cfg["num_attention_heads"].get<std::size_t>();
    if (cfg.contains("layer_norm_eps")) config_.layer_norm_eps = cfg["layer_norm_eps"].get<double>();
    if (cfg.contains("hidden_act")) {
      auto act = cfg["hidden_act"].get<std::string>();
      if (act == "gelu_new" || act == "gelu_pytorch_tanh") {
        config_.tanh_gelu = true;
      } else if (act != "gelu") {
        throw DataError("unsupported hidden_act '" + act + "'");
      }
    }
    if (cfg.contains("hidden_size") && cfg["hidden_size"].get<std::size_t>() != config_.hidden) {
      throw DataError("config.json hidden_size disagrees with the weights");
    }
  }
  if (config_.hidden % config_.heads != 0) throw DataError("hidden size not divisible by head count");
}

void BertEncoder::layer_norm(std::vector<float>& x, std::size_t rows, const Norm& norm) const {
  const std::size_t h = config_.hidden;
  for (std::size_t r = 0; r < rows; ++r) {
    float* v = x.data() + r * h;
    double mean = 0.0;
    for (std::size_t i = 0; i < h; ++i) mean += v[i];
    mean /= static_cast<double>(h);
    double var = 0.0;
    for (std::size_t i = 0; i < h; ++i) var += (v[i] - mean) * (v[i] - mean);
    var /= static_cast<double>(h);
    double inv = 1.0 / std::sqrt(var + config_.layer_norm_eps);
    for (std::size_t i = 0; i < h; ++i) {
      v[i] = static_cast<float>((v[i] - mean) * inv) * norm.gamma[i] + norm.beta[i];
    }
  }
}

void BertEncoder::run_block(const Block& b, std::vector<float>& h, std::size_t rows,
                            kernels::Exec exec) const {
  const std::size_t width = config_.hidden;
  const std::size_t heads = config_.heads;
  const std::size_t head_dim = width / heads;
  std::vector<float> q(rows * width), k(rows * width), v(rows * width), ctx(rows * width);
  kernels::linear(exec, h, rows, width, b.query.weight, b.query.bias, width, q);
  kernels::linear(exec, h, rows, width, b.key.weight, b.key.bias, width, k);
  kernels::linear(exec, h, rows, width, b.value.weight, b.value.bias, width, v);

  const float scale = 1.0f / std::sqrt(static_cast<float>(head_dim));
  const auto n_heads = static_cast<long long>(heads);
  const bool par = exec == kernels::Exec::kParallel;
#pragma omp parallel for schedule(static) if (par)
  for (long long hd = 0; hd < n_heads; ++hd) {
    std::vector<float> scores(rows);
    const std::size_t off = static_cast<std::size_t>(hd) * head_dim;
    for (std::size_t i = 0; i < rows; ++i) {
      float best = -INFINITY;
      for (std::size_t j = 0; j < rows; ++j) {
        float s = 0.0f;
        for (std::size_t d = 0; d < head_dim; ++d) s += q[i * width + off + d] * k[j * width + off + d];
        scores[j] = s * scale;
        best = std::max(best, scores[j]);
      }
      float total = 0.0f;
      for (auto& s : scores) {
        s = std::exp(s - best);
        total += s;
      }
      for (std::size_t d = 0; d < head_dim; ++d) {
        float acc = 0.0f;
        for (std::size_t j = 0; j < rows; ++j) acc += scores[j] * v[j * width + off + d];
        ctx[i * width + off + d] = acc / total;
      }
    }
  }

  std::vector<float> attn(rows * width);
  kernels::linear(exec, ctx, rows, width, b.attn_out.weight, b.attn_out.bias, width, attn);
  for (std::size_t i = 0; i < attn.size(); ++i) attn[i] += h[i];
  layer_norm(attn, rows, b.attn_norm);

  const std::size_t inner = b.intermediate.out;
  std::vector<float> mid(rows * inner);
  kernels::linear(exec, attn, rows, width, b.intermediate.weight, b.intermediate.bias, inner, mid);
  for (auto& x : mid) x = gelu(x, config_.tanh_gelu);
  std::vector<float> out(rows * width);
  kernels::linear(exec, mid, rows, inner, b.output.weight, b.output.bias, width, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += attn[i];
  layer_norm(out, rows, b.out_norm);
  h = std::move(out);
}

std::vector<float> BertEncoder::hidden_states(const std::vector<std::int64_t>& ids, int layer,
                                              kernels::Exec exec) const {
  if (layer < 0 || static_cast<std::size_t>(layer) > config_.layers) {
    throw UsageError("layer " + std::to_string(layer) + " outside [0, " +
                     std::to_string(config_.layers) + "]");
  }
  const std::size_t rows = ids.size();
  if (rows > config_.max_positions) {
    throw DataError("sequence of " + std::to_string(rows) + " tokens exceeds the model limit of " +
                    std::to_string(config_.max_positions));
  }
  const std::size_t width = config_.hidden;
  std::vector<float> h(rows * width);
  for (std::size_t r = 0; r < rows; ++r) {
    if (ids[r] < 0 || static_cast<std::size_t>(ids[r]) >= vocab_size_) {
      throw DataError("token id " + std::to_string(ids[r]) + " outside the embedding table");
    }
    const float* w = word_embeddings_.data() + static_cast<std::size_t>(ids[r]) * width;
    const float* p = position_embeddings_.data() + r * width;
    const float* t = token_type_embeddings_.data();
    for (std::size_t i = 0; i < width; ++i) h[r * width + i] = w[i] + p[i] + t[i];
  }
  layer_norm(h, rows, embedding_norm_);
  for (int l = 0; l < layer; ++l) run_block(blocks_[static_cast<std::size_t>(l)], h, rows, exec);
  return h;
}

std::unique_ptr<ModelRuntimeBackend> ModelRuntimeBackend::load(const std::filesystem::path& model_path,
                                                               int layer) {
  if (!std::filesystem::exists(model_path)) {
    throw DataError("model path '" + model_path.string() + "' does not exist");
  }
  auto weights = std::filesystem::is_directory(model_path) ? model_path / "model.safetensors" : model_path;
  auto config_path = sibling(model_path, "config.json");
  std::string config = std::filesystem::exists(config_path) ? read_file(config_path) : std::string();
  BertEncoder encoder(read_safetensors(weights), config);
  Vocabulary vocab = Vocabulary::load(sibling(model_path, "vocab.txt"));
  return std::make_unique<ModelRuntimeBackend>(std::move(encoder), std::move(vocab), layer);
}

ModelRuntimeBackend::ModelRuntimeBackend(BertEncoder encoder, Vocabulary vocab, int layer)
    : encoder_(std::move(encoder)), vocab_(std::move(vocab)), layer_(layer) {
  if (layer_ < 0 || static_cast<std::size_t>(layer_) > encoder_.config().layers) {
    throw UsageError("model has " + std::to_string(encoder_.config().layers) +
                     " layers; layer " + std::to_string(layer_) + " is not available");
  }
}

EmbeddingMatrix ModelRuntimeBackend::encode(const TokenSeq& seq) const {
  std::vector<float> h = encoder_.hidden_states(seq.ids, layer_, exec_);
  const std::size_t width = encoder_.config().hidden;
  EmbeddingMatrix m(seq.size(), width);
  for (std::size_t r = 0; r < seq.size(); ++r) {
    auto row = m.row(r);
    for (std::size_t i = 0; i < width; ++i) row[i] = h[r * width + i];
  }
  return m;
}

}  // namespace asreval
