#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deepam/corpus.hpp"
#include "deepam/graph.hpp"

namespace deepam {

enum class CellType { Gru, Tanh };

struct ModelConfig {
  std::size_t api_vocab_size = 10000;
  std::size_t word_vocab_size = 10000;
  std::size_t embedding_dim = 64;
  std::size_t hidden_units = 64;   // paper scale: 1000
  std::size_t num_layers = 1;      // paper scale: 2
  std::size_t max_api_len = 30;
  std::size_t max_desc_len = 30;
  std::size_t batch_size = 200;    // half per language
  std::uint64_t seed = 1;
  bool separate_encoders = false;  // one encoder per language instead of shared
  CellType cell = CellType::Gru;
  double init_half_range = 0.08;
  double grad_clip_norm = 5.0;
  double adadelta_rho = 0.95;
  double adadelta_epsilon = 1e-6;

  std::size_t semantic_dim() const { return 2 * hidden_units; }

  void validate() const {
    if (!api_vocab_size || !word_vocab_size || !embedding_dim || !hidden_units ||
        !num_layers || !max_api_len || !max_desc_len || !batch_size)
      throw config_error("model config fields must all be positive");
    if (batch_size % 2 != 0) throw config_error("batch_size must be even");
  }
};

struct SemanticVector {
  Vec values;
  std::string record_id;
  LanguageTag language = LanguageTag::Source;
};

struct EncodedPair {
  EncodedSequence api;
  EncodedSequence desc;  // BOS ... EOS, padded
  LanguageTag language = LanguageTag::Source;
  std::string record_id;
};

struct LossStats {
  double joint = 0.0;       // the trained objective
  double nll_sum = 0.0;     // unweighted token NLL, for per-token reporting
  std::size_t tokens = 0;   // real predicted tokens (EOS included, BOS not)

  double per_token() const { return tokens ? nll_sum / static_cast<double>(tokens) : 0.0; }
};

class JointModel {
 public:
  explicit JointModel(ModelConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    build_params();
    params_.init_uniform(cfg_.init_half_range, cfg_.seed);
  }

  const ModelConfig& config() const { return cfg_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  SemanticVector embed(const EncodedSequence& api, LanguageTag lang,
                       const std::string& record_id = {}) const {
    Graph g(params_);
    Graph::Ref sem = encode(g, api, lang);
    return SemanticVector{g.value(sem), record_id, lang};
  }

  LossStats forward_loss(const std::vector<EncodedPair>& batch) const {
    Graph g(params_);
    return run_batch(g, batch);
  }

  LossStats forward_backward(const std::vector<EncodedPair>& batch, GradMap& grads) const {
    Graph g(params_);
    LossStats stats = run_batch(g, batch);
    GradMap touched = g.backward();
    grads = params_.zero_grads();  // untouched parameters keep zero gradients
    for (auto& [name, t] : touched) grads[name].data = std::move(t.data);
    return stats;
  }

  std::vector<SemanticVector> embed_corpus(const Corpus& corpus) const {
    std::vector<SemanticVector> out;
    out.reserve(corpus.records.size());
    for (const auto& rec : corpus.records) {
      auto enc = encode_sequence(rec.api_sequence, corpus.api_vocab, cfg_.max_api_len);
      out.push_back(embed(enc, rec.language, rec.id));
    }
    return out;
  }

 private:
  static std::size_t real_length(const EncodedSequence& seq) {
    std::size_t n = seq.length();
    if (n == 0) throw data_error("all-PAD sequence cannot be embedded");
    for (std::size_t i = 0; i < n; ++i)
      if (!seq.mask[i]) throw data_error("padding must be trailing");
    return n;
  }

  std::string encoder_prefix(LanguageTag lang) const {
    if (!cfg_.separate_encoders) return "enc.";
    return lang == LanguageTag::Source ? "enc_src." : "enc_tgt.";
  }

  void add_cell_params(const std::string& base, std::size_t input_dim) {
    const std::size_t h = cfg_.hidden_units;
    if (cfg_.cell == CellType::Gru) {
      params_.add(base + "Wz", {h, input_dim + h});
      params_.add(base + "bz", {h});
      params_.add(base + "Wr", {h, input_dim + h});
      params_.add(base + "br", {h});
      params_.add(base + "Wc", {h, input_dim + h});
      params_.add(base + "bc", {h});
    } else {
      params_.add(base + "W", {h, input_dim + h});
      params_.add(base + "b", {h});
    }
  }

  void build_params() {
    const std::size_t h = cfg_.hidden_units;
    const std::size_t e = cfg_.embedding_dim;
    params_.add("api_emb", {cfg_.api_vocab_size, e});
    params_.add("word_emb", {cfg_.word_vocab_size, e});

    std::vector<std::string> enc_prefixes;
    if (cfg_.separate_encoders)
      enc_prefixes = {"enc_src.", "enc_tgt."};
    else
      enc_prefixes = {"enc."};
    for (const auto& prefix : enc_prefixes)
      for (std::size_t l = 0; l < cfg_.num_layers; ++l) {
        const std::size_t in = l == 0 ? e : 2 * h;
        add_cell_params(prefix + "l" + std::to_string(l) + ".fwd.", in);
        add_cell_params(prefix + "l" + std::to_string(l) + ".bwd.", in);
      }

    for (std::size_t l = 0; l < cfg_.num_layers; ++l) {
      params_.add("dec.init.l" + std::to_string(l) + ".W", {h, 2 * h});
      params_.add("dec.init.l" + std::to_string(l) + ".b", {h});
      const std::size_t in = l == 0 ? e + 2 * h : h;
      add_cell_params("dec.l" + std::to_string(l) + ".", in);
    }
    params_.add("out.W", {cfg_.word_vocab_size, h});
    params_.add("out.b", {cfg_.word_vocab_size});
  }

  Graph::Ref cell_step(Graph& g, const std::string& base, Graph::Ref x, Graph::Ref h) const {
    if (cfg_.cell == CellType::Tanh)
      return g.tanh_of(g.affine(base + "W", base + "b", g.concat({x, h})));
    Graph::Ref xh = g.concat({x, h});
    Graph::Ref z = g.sigmoid_of(g.affine(base + "Wz", base + "bz", xh));
    Graph::Ref r = g.sigmoid_of(g.affine(base + "Wr", base + "br", xh));
    Graph::Ref cand =
        g.tanh_of(g.affine(base + "Wc", base + "bc", g.concat({x, g.hadamard(r, h)})));
    return g.blend(z, h, cand);
  }

  // Bidirectional stacked encoder; returns [fwd_top(last); bwd_top(first)].
  Graph::Ref encode(Graph& g, const EncodedSequence& api, LanguageTag lang) const {
    const std::size_t n = real_length(api);
    const std::string prefix = encoder_prefix(lang);

    std::vector<Graph::Ref> inputs(n);
    for (std::size_t t = 0; t < n; ++t)
      inputs[t] = g.embedding_row("api_emb", static_cast<std::size_t>(api.ids[t]));

    Graph::Ref fwd_last = 0, bwd_first = 0;
    for (std::size_t l = 0; l < cfg_.num_layers; ++l) {
      const std::string lbase = prefix + "l" + std::to_string(l) + ".";
      std::vector<Graph::Ref> fwd(n), bwd(n);
      Graph::Ref h = g.constant(Vec(cfg_.hidden_units, 0.0));
      for (std::size_t t = 0; t < n; ++t) {
        h = cell_step(g, lbase + "fwd.", inputs[t], h);
        fwd[t] = h;
      }
      h = g.constant(Vec(cfg_.hidden_units, 0.0));
      for (std::size_t t = n; t-- > 0;) {
        h = cell_step(g, lbase + "bwd.", inputs[t], h);
        bwd[t] = h;
      }
      for (std::size_t t = 0; t < n; ++t) inputs[t] = g.concat({fwd[t], bwd[t]});
      fwd_last = fwd[n - 1];
      bwd_first = bwd[0];
    }
    return g.concat({fwd_last, bwd_first});
  }

  // Teacher-forced decoding; the semantic vector is an input at every step.
  // Adds weight * NLL(token) to the graph loss per real target token.
  LossStats decode_loss(Graph& g, Graph::Ref semantic, const EncodedSequence& desc,
                        double weight) const {
    const std::size_t n = real_length(desc);  // BOS w_1..w_k EOS
    if (n < 2) throw data_error("decoder sequence must contain BOS and EOS");

    std::vector<Graph::Ref> state(cfg_.num_layers);
    for (std::size_t l = 0; l < cfg_.num_layers; ++l) {
      const std::string base = "dec.init.l" + std::to_string(l) + ".";
      state[l] = g.affine(base + "W", base + "b", semantic);
    }

    LossStats stats;
    for (std::size_t t = 1; t < n; ++t) {
      Graph::Ref prev_word =
          g.embedding_row("word_emb", static_cast<std::size_t>(desc.ids[t - 1]));
      Graph::Ref x = g.concat({prev_word, semantic});
      for (std::size_t l = 0; l < cfg_.num_layers; ++l) {
        state[l] = cell_step(g, "dec.l" + std::to_string(l) + ".", x, state[l]);
        x = state[l];
      }
      Graph::Ref logits = g.affine("out.W", "out.b", state[cfg_.num_layers - 1]);
      const std::size_t target = static_cast<std::size_t>(desc.ids[t]);
      stats.nll_sum += g.cross_entropy(logits, target, weight) / weight;
      ++stats.tokens;
    }
    return stats;
  }

  LossStats run_batch(Graph& g, const std::vector<EncodedPair>& batch) const {
    std::size_t n_source = 0, n_target = 0;
    for (const auto& p : batch)
      (p.language == LanguageTag::Source ? n_source : n_target) += 1;
    if (n_source == 0 || n_target == 0)
      throw data_error("batch must contain pairs for both languages");

    LossStats stats;
    for (const auto& p : batch) {
      const double weight =
          1.0 / static_cast<double>(p.language == LanguageTag::Source ? n_source : n_target);
      Graph::Ref sem = encode(g, p.api, p.language);
      LossStats s = decode_loss(g, sem, p.desc, weight);
      stats.nll_sum += s.nll_sum;
      stats.tokens += s.tokens;
    }
    stats.joint = g.loss();
    if (!std::isfinite(stats.joint)) throw numeric_error("non-finite loss");
    return stats;
  }

  ModelConfig cfg_;
  ParamStore params_;
};

// Encodes a corpus once into model-ready pairs (API side plain, description
// side BOS/EOS decorated).
inline std::vector<EncodedPair> encode_pairs(const Corpus& corpus, const ModelConfig& cfg) {
  std::vector<EncodedPair> out;
  out.reserve(corpus.records.size());
  for (const auto& rec : corpus.records) {
    EncodedPair p;
    p.api = encode_sequence(rec.api_sequence, corpus.api_vocab, cfg.max_api_len);
    p.desc = encode_sequence(rec.description, corpus.word_vocab, cfg.max_desc_len + 2, true);
    p.language = rec.language;
    p.record_id = rec.id;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace deepam
