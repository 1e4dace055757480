#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "deepam/checkpoint.hpp"
#include "deepam/demo.hpp"
#include "deepam/gradcheck.hpp"
#include "deepam/model.hpp"
#include "deepam/train.hpp"

using namespace deepam;

namespace {

ModelConfig tiny_config(std::size_t hidden = 8, std::size_t vocab = 12) {
  ModelConfig c;
  c.api_vocab_size = vocab;
  c.word_vocab_size = vocab;
  c.embedding_dim = 6;
  c.hidden_units = hidden;
  c.num_layers = 1;
  c.max_api_len = 8;
  c.max_desc_len = 8;
  c.batch_size = 4;
  c.seed = 21;
  return c;
}

EncodedSequence seq(std::vector<int> ids, std::size_t pad_to) {
  EncodedSequence s;
  s.ids = std::move(ids);
  s.mask.assign(s.ids.size(), true);
  while (s.ids.size() < pad_to) {
    s.ids.push_back(Vocabulary::kPad);
    s.mask.push_back(false);
  }
  return s;
}

std::vector<EncodedPair> tiny_batch() {
  // vocab indices 4..11 are ordinary tokens; desc sequences carry BOS/EOS
  std::vector<EncodedPair> batch;
  auto mk = [](std::vector<int> api, std::vector<int> words, LanguageTag lang) {
    EncodedPair p;
    p.api = seq(std::move(api), 5);
    std::vector<int> desc = {Vocabulary::kBos};
    for (int w : words) desc.push_back(w);
    desc.push_back(Vocabulary::kEos);
    p.desc = seq(std::move(desc), 7);
    p.language = lang;
    return p;
  };
  batch.push_back(mk({4, 5, 6}, {7, 8}, LanguageTag::Source));
  batch.push_back(mk({5, 7}, {9}, LanguageTag::Source));
  batch.push_back(mk({8, 9, 10}, {6, 4, 5}, LanguageTag::Target));
  batch.push_back(mk({11}, {10, 11}, LanguageTag::Target));
  return batch;
}

}  // namespace

TEST_CASE("embed returns a vector of twice the hidden width") {
  JointModel model(tiny_config());
  auto v = model.embed(seq({4, 5, 6}, 5), LanguageTag::Source, "r1");
  CHECK(v.values.size() == model.config().semantic_dim());
  for (double x : v.values) CHECK(std::isfinite(x));
}

TEST_CASE("embed is deterministic and mask-invariant") {
  JointModel model(tiny_config());
  auto a = model.embed(seq({4, 5, 6}, 5), LanguageTag::Source);
  auto b = model.embed(seq({4, 5, 6}, 5), LanguageTag::Source);
  CHECK(a.values == b.values);
  auto c = model.embed(seq({4, 5, 6}, 8), LanguageTag::Source);  // more trailing PAD
  CHECK(a.values == c.values);
}

TEST_CASE("embed rejects all-PAD input") {
  JointModel model(tiny_config());
  EncodedSequence s;
  s.ids = {0, 0};
  s.mask = {false, false};
  CHECK_THROWS_AS(model.embed(s, LanguageTag::Source), data_error);
}

TEST_CASE("untrained per-token loss is close to ln(vocab size)") {
  auto cfg = tiny_config(16, 50);
  JointModel model(cfg);
  auto batch = tiny_batch();
  LossStats stats = model.forward_loss(batch);
  const double expected = std::log(static_cast<double>(cfg.word_vocab_size));
  CHECK(stats.per_token() == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("loss has mean semantics: duplicating the batch changes nothing") {
  JointModel model(tiny_config());
  auto batch = tiny_batch();
  LossStats once = model.forward_loss(batch);
  auto doubled = batch;
  doubled.insert(doubled.end(), batch.begin(), batch.end());
  LossStats twice = model.forward_loss(doubled);
  CHECK(once.joint == doctest::Approx(twice.joint).epsilon(1e-12));
}

TEST_CASE("joint loss is the sum of the two language-restricted losses") {
  JointModel model(tiny_config());
  auto batch = tiny_batch();
  LossStats joint = model.forward_loss(batch);

  // per-language halves evaluated separately via a trick: a one-language
  // batch is rejected, so compute each side's mean NLL directly
  double source_term = 0.0, target_term = 0.0;
  std::size_t n_source = 0, n_target = 0;
  for (const auto& p : batch) (p.language == LanguageTag::Source ? n_source : n_target) += 1;
  for (const auto& p : batch) {
    std::vector<EncodedPair> lone = {p, p};
    lone[1].language =
        p.language == LanguageTag::Source ? LanguageTag::Target : LanguageTag::Source;
    // evaluate the single pair's summed NLL through forward_loss bookkeeping
    LossStats s = model.forward_loss(lone);
    // nll_sum counts both copies; the pair's own NLL is half of it only if
    // both copies share the sequence, which they do
    const double pair_nll = s.nll_sum / 2.0;
    if (p.language == LanguageTag::Source)
      source_term += pair_nll / static_cast<double>(n_source);
    else
      target_term += pair_nll / static_cast<double>(n_target);
  }
  CHECK(joint.joint == doctest::Approx(source_term + target_term).epsilon(1e-9));
}

TEST_CASE("single-language batches are rejected") {
  JointModel model(tiny_config());
  auto batch = tiny_batch();
  batch.erase(batch.begin() + 2, batch.end());  // drop target pairs
  CHECK_THROWS_AS(model.forward_loss(batch), data_error);
}

TEST_CASE("model gradients match finite differences at tiny width") {
  auto cfg = tiny_config(4, 12);
  JointModel model(cfg);
  auto batch = tiny_batch();

  GradMap analytic;
  model.forward_backward(batch, analytic);
  // gradient_check perturbs the supplied store in place, and we hand it the
  // model's own store, so the closure only needs to re-evaluate the loss
  auto loss_fn = [&](const ParamStore&) { return model.forward_loss(batch).joint; };
  auto report = gradient_check(loss_fn, model.params(), analytic, 1e-4, 100, 1e-5, 31);
  INFO("max rel err ", report.max_rel_error, " at ", report.worst_parameter);
  CHECK(report.pass);
}

TEST_CASE("separate encoders and tanh cell variants stay trainable") {
  for (bool separate : {false, true}) {
    for (CellType cell : {CellType::Gru, CellType::Tanh}) {
      auto cfg = tiny_config();
      cfg.separate_encoders = separate;
      cfg.cell = cell;
      JointModel model(cfg);
      GradMap grads;
      LossStats stats = model.forward_backward(tiny_batch(), grads);
      CHECK(std::isfinite(stats.joint));
      double norm = global_grad_norm(grads);
      CHECK(norm > 0.0);
    }
  }
}

TEST_CASE("embed_corpus preserves order and matches one-at-a-time embedding") {
  auto specs = demo_concept_specs();
  GroundTruth truth;
  Corpus corpus = generate_synthetic_corpus(specs, 2, 5, &truth);
  ModelConfig cfg = tiny_config();
  cfg.api_vocab_size = corpus.api_vocab.size();
  cfg.word_vocab_size = corpus.word_vocab.size();
  cfg.max_api_len = 30;
  JointModel model(cfg);

  auto vectors = model.embed_corpus(corpus);
  REQUIRE(vectors.size() == corpus.records.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    CHECK(vectors[i].record_id == corpus.records[i].id);
    auto enc = encode_sequence(corpus.records[i].api_sequence, corpus.api_vocab, 30);
    auto single = model.embed(enc, corpus.records[i].language);
    CHECK(vectors[i].values == single.values);
  }
}

TEST_CASE("training is deterministic under a fixed seed") {
  auto specs = demo_concept_specs();
  Corpus corpus = generate_synthetic_corpus(specs, 3, 9, nullptr);
  auto run_once = [&] {
    ModelConfig cfg = tiny_config();
    cfg.api_vocab_size = corpus.api_vocab.size();
    cfg.word_vocab_size = corpus.word_vocab.size();
    cfg.max_api_len = 30;
    cfg.batch_size = 8;
    JointModel model(cfg);
    TrainOptions opts;
    opts.epochs = 2;
    opts.early_stop = false;
    TrainingLog log = train(model, corpus, opts);
    return std::pair{log, model.params().value("out.W").data};
  };
  auto [log1, w1] = run_once();
  auto [log2, w2] = run_once();
  REQUIRE(log1.entries.size() == log2.entries.size());
  for (std::size_t i = 0; i < log1.entries.size(); ++i)
    CHECK(log1.entries[i].mean_loss == log2.entries[i].mean_loss);
  CHECK(w1 == w2);
}

TEST_CASE("zero epochs leaves the model unchanged with an empty log") {
  auto specs = demo_concept_specs();
  Corpus corpus = generate_synthetic_corpus(specs, 2, 9, nullptr);
  ModelConfig cfg = tiny_config();
  cfg.api_vocab_size = corpus.api_vocab.size();
  cfg.word_vocab_size = corpus.word_vocab.size();
  cfg.max_api_len = 30;
  cfg.batch_size = 4;
  JointModel model(cfg);
  auto before = model.params().value("out.W").data;
  TrainOptions opts;
  opts.epochs = 0;
  TrainingLog log = train(model, corpus, opts);
  CHECK(log.entries.empty());
  CHECK(model.params().value("out.W").data == before);
}

TEST_CASE("training a single-language corpus fails with the both-terms error") {
  Corpus corpus;
  SnippetRecord r;
  r.id = "s1";
  r.language = LanguageTag::Source;
  r.api_sequence = {"A.x"};
  r.description = {"read"};
  corpus.records.push_back(r);
  corpus.build_vocabularies(100, 100);
  JointModel model(tiny_config());
  TrainOptions opts;
  CHECK_THROWS_AS(train(model, corpus, opts), data_error);
}

TEST_CASE("checkpoint round-trip restores embeddings bit-exactly") {
  JointModel model(tiny_config());
  auto tmp = (std::filesystem::temp_directory_path() / "deepam_model.ckpt").string();
  save_checkpoint(model, tmp);
  JointModel loaded = load_checkpoint(tmp);
  auto a = model.embed(seq({4, 5, 6}, 5), LanguageTag::Source);
  auto b = loaded.embed(seq({4, 5, 6}, 5), LanguageTag::Source);
  CHECK(a.values == b.values);
  std::remove(tmp.c_str());
}

TEST_CASE("checkpoint detects corruption, truncation and version mismatch") {
  JointModel model(tiny_config());
  auto tmp = (std::filesystem::temp_directory_path() / "deepam_corrupt.ckpt").string();
  save_checkpoint(model, tmp);

  std::ifstream in(tmp, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  {  // flip one payload byte
    std::string corrupted = bytes;
    corrupted[bytes.size() / 2] ^= 0x01;
    std::ofstream out(tmp, std::ios::binary);
    out.write(corrupted.data(), static_cast<std::streamsize>(corrupted.size()));
    out.close();
    CHECK_THROWS_WITH_AS(load_checkpoint(tmp), doctest::Contains("checksum"), data_error);
  }
  {  // truncate
    std::ofstream out(tmp, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    out.close();
    CHECK_THROWS_AS(load_checkpoint(tmp), data_error);
  }
  {  // bump the version field (offset 8), then fix the checksum
    std::string versioned = bytes;
    versioned[8] = 99;
    std::string payload = versioned.substr(0, versioned.size() - 8);
    std::uint64_t sum = detail::fnv1a(payload);
    for (int i = 0; i < 8; ++i)
      versioned[versioned.size() - 8 + i] = static_cast<char>((sum >> (8 * i)) & 0xff);
    std::ofstream out(tmp, std::ios::binary);
    out.write(versioned.data(), static_cast<std::streamsize>(versioned.size()));
    out.close();
    try {
      load_checkpoint(tmp);
      FAIL("expected version error");
    } catch (const data_error& e) {
      std::string msg = e.what();
      CHECK(msg.find("99") != std::string::npos);
      CHECK(msg.find("1") != std::string::npos);
    }
  }
  std::remove(tmp.c_str());
}
