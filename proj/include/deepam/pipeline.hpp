#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "deepam/align.hpp"
#include "deepam/checkpoint.hpp"
#include "deepam/demo.hpp"
#include "deepam/eval.hpp"
#include "deepam/phrase.hpp"
#include "deepam/synth.hpp"
#include "deepam/train.hpp"

namespace deepam {

struct PipelineConfig {
  std::string out_dir = "out";
  std::string specs_path;   // empty -> bundled demo specs
  std::string corpus_path;  // set -> skip synthesis and load instead
  std::string alignment_truth_path;  // required with corpus_path for accuracy
  std::size_t n_per_concept = 50;
  std::uint64_t seed = 7;
  std::size_t epochs = 30;
  ModelConfig model;
  CorpusLimits limits;
  AlignOptions alignment;
  std::size_t max_phrase_len = 8;
  double mining_threshold = 0.5;
  bool timestamps = true;
  std::ostream* progress = nullptr;

  void validate() const {
    if (mining_threshold < 0.0 || mining_threshold >= 1.0)
      throw config_error("mining threshold must lie in [0, 1)");
    if (!specs_path.empty() && !std::filesystem::exists(specs_path))
      throw config_error("concept spec file does not exist: " + specs_path);
    if (!corpus_path.empty() && !std::filesystem::exists(corpus_path))
      throw config_error("corpus file does not exist: " + corpus_path);
  }
};

struct PipelineResult {
  AlignmentAccuracy neural_accuracy;
  AlignmentAccuracy ir_accuracy;
  RuleBuckets buckets;
  std::size_t rule_count = 0;
  EvalReport method_report;
  EvalReport class_report;
  double migration_correctness = -1.0;
  double migration_edr = -1.0;
  double first_epoch_loss = 0.0;
  double final_epoch_loss = 0.0;
  std::string report_path;
  std::string rules_path;
};

namespace detail {

inline std::vector<SequencePair> pairs_to_sequences(const std::vector<AlignedPair>& pairs,
                                                    const Corpus& corpus) {
  std::map<std::string, const SnippetRecord*> by_id;
  for (const auto& r : corpus.records) by_id[r.id] = &r;
  std::vector<SequencePair> out;
  for (const auto& p : pairs) {
    auto s = by_id.find(p.source_id);
    auto t = by_id.find(p.target_id);
    if (s == by_id.end() || t == by_id.end())
      throw data_error("aligned pair references unknown record id");
    // normalize so the source side is always SOURCE-language
    const SnippetRecord* src = s->second;
    const SnippetRecord* tgt = t->second;
    if (src->language == LanguageTag::Target) std::swap(src, tgt);
    out.push_back({src->api_sequence, tgt->api_sequence});
  }
  return out;
}

}  // namespace detail

// Steps: synthesize/load corpus -> train -> embed -> align (neural + IR
// baseline) -> mine -> evaluate, with every stage output persisted under
// cfg.out_dir so stages can be re-run independently.
inline PipelineResult run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  auto path = [&](const char* name) { return (fs::path(cfg.out_dir) / name).string(); };
  auto note = [&](const std::string& msg) {
    if (cfg.progress) *cfg.progress << msg << "\n";
  };

  // Step 1: corpus
  Corpus corpus;
  GroundTruth truth;
  std::vector<ConceptSpec> specs;
  bool have_specs = false;
  if (!cfg.corpus_path.empty()) {
    LoadReport rep;
    corpus = load_corpus(cfg.corpus_path, cfg.limits, &rep);
    truth = load_ground_truth(cfg.alignment_truth_path);
    note("loaded corpus: " + std::to_string(rep.kept()) + " records");
  } else {
    specs = cfg.specs_path.empty() ? demo_concept_specs() : load_concept_specs(cfg.specs_path);
    have_specs = true;
    corpus = generate_synthetic_corpus(specs, cfg.n_per_concept, cfg.seed, &truth, cfg.limits);
    save_corpus(corpus, path("corpus.tsv"));
    save_ground_truth(truth, path("alignment_truth.tsv"));
    note("synthesized corpus: " + std::to_string(corpus.records.size()) + " records");
  }
  require_bilingual(corpus);

  // Step 2: joint embedding model
  ModelConfig mc = cfg.model;
  // vocabularies are already capped by CorpusLimits; size the model to fit
  mc.api_vocab_size = corpus.api_vocab.size();
  mc.word_vocab_size = corpus.word_vocab.size();
  mc.max_api_len = cfg.limits.max_api_len;
  mc.max_desc_len = cfg.limits.max_desc_len;
  mc.seed = cfg.seed;
  JointModel model(mc);
  TrainOptions topts;
  topts.epochs = cfg.epochs;
  topts.progress = cfg.progress;
  TrainingLog log = train(model, corpus, topts);
  save_training_log(log, path("train_log.tsv"), cfg.timestamps);
  save_checkpoint(model, path("model.ckpt"));

  // Step 3: semantic vectors + alignment
  std::vector<SemanticVector> vectors = model.embed_corpus(corpus);
  std::vector<SemanticVector> src_vecs, tgt_vecs;
  std::set<std::string> source_ids;
  for (auto& v : vectors) {
    if (v.language == LanguageTag::Source) {
      source_ids.insert(v.record_id);
      src_vecs.push_back(v);
    } else {
      tgt_vecs.push_back(v);
    }
  }
  EmbeddingIndex src_index(std::move(src_vecs)), tgt_index(std::move(tgt_vecs));
  AlignOptions aopts = cfg.alignment;
  aopts.direction = AlignDirection::Both;  // both directions, Table-5 style
  std::vector<AlignedPair> aligned = align(src_index, tgt_index, aopts);
  save_alignment(aligned, path("alignment.tsv"));

  IrAlignmentResult ir = ir_baseline_align(corpus);
  save_alignment(ir.pairs, path("ir_alignment.tsv"));

  PipelineResult result;
  result.neural_accuracy = alignment_accuracy(aligned, truth, source_ids);
  result.ir_accuracy = alignment_accuracy(ir.pairs, truth, source_ids);
  if (!log.entries.empty()) {
    result.first_epoch_loss = log.entries.front().mean_loss;
    result.final_epoch_loss = log.entries.back().mean_loss;
  }

  // Step 4: phrase mining on source-direction pairs
  std::vector<AlignedPair> mine_input;
  for (const auto& p : aligned)
    if (source_ids.count(p.source_id)) mine_input.push_back(p);
  PhraseCounts counts =
      extract_phrase_pairs(detail::pairs_to_sequences(mine_input, corpus), cfg.max_phrase_len);
  std::vector<MappingRule> rules = mine_mappings(counts, cfg.mining_threshold, &result.buckets);
  result.rule_count = rules.size();
  result.rules_path = path("rules.tsv");
  save_rules(rules, result.rules_path);

  // Evaluation against spec-implied token mappings and migrated patterns
  OneToOneMappings ones = one_to_one_mappings(rules);
  if (have_specs) {
    GroundTruthSet method_truth;
    method_truth.granularity = MappingGranularity::Method;
    for (const auto& m : method_mappings_from_specs(specs)) method_truth.mappings.insert(m);
    GroundTruthSet class_truth;
    class_truth.granularity = MappingGranularity::Class;
    for (const auto& m : method_truth.mappings)
      class_truth.mappings.emplace(class_of(m.first), class_of(m.second));
    {
      std::ofstream mt(path("mapping_truth.tsv"));
      for (const auto& m : method_truth.mappings) mt << m.first << '\t' << m.second << '\n';
    }

    MinedMappingSet mined_method{MappingGranularity::Method,
                                 {ones.method_level.begin(), ones.method_level.end()}};
    MinedMappingSet mined_class{MappingGranularity::Class,
                                {ones.class_level.begin(), ones.class_level.end()}};
    result.method_report = score_mappings(mined_method, method_truth);
    result.class_report = score_mappings(mined_class, class_truth);

    std::vector<SequenceResult> migrations;
    for (const auto& s : specs)
      migrations.push_back({migrate_sequence(rules, s.source_pattern), s.target_pattern});
    result.migration_correctness = correctness(migrations);
    result.migration_edr = edit_distance_ratio(migrations);
  }

  // Report
  result.report_path = path("report.txt");
  std::ofstream rep(result.report_path);
  if (!rep) throw data_error("cannot write report: " + result.report_path);
  rep << std::fixed << std::setprecision(4);
  rep << "# pipeline report\n";
  rep << "# correctness here is exact-match against synthetic ground truth,\n";
  rep << "# not manual judgment; edit distances use unit-cost substitution.\n";
  if (cfg.timestamps) {
    double total = 0;
    for (const auto& e : log.entries) total += e.wall_seconds;
    rep << "train_wall_seconds = " << total << "\n";
  }
  rep << "records = " << corpus.records.size() << "\n";
  rep << "epochs_run = " << log.entries.size() << "\n";
  rep << "first_epoch_mean_loss = " << result.first_epoch_loss << "\n";
  rep << "final_epoch_mean_loss = " << result.final_epoch_loss << "\n";
  rep << "alignment_accuracy_source = " << result.neural_accuracy.source_direction << "\n";
  rep << "alignment_accuracy_target = " << result.neural_accuracy.target_direction << "\n";
  rep << "alignment_accuracy_mean = " << result.neural_accuracy.mean << "\n";
  rep << "ir_accuracy_source = " << result.ir_accuracy.source_direction << "\n";
  rep << "ir_accuracy_target = " << result.ir_accuracy.target_direction << "\n";
  rep << "ir_accuracy_mean = " << result.ir_accuracy.mean << "\n";
  rep << "rules_total = " << result.rule_count << "\n";
  rep << "rules_len_1 = " << result.buckets.counts[0] << "\n";
  rep << "rules_len_2_3 = " << result.buckets.counts[1] << "\n";
  rep << "rules_len_4_7 = " << result.buckets.counts[2] << "\n";
  rep << "rules_len_8_plus = " << result.buckets.counts[3] << "\n";
  if (have_specs) {
    auto row = [&](const char* label, const EvalRow& r) {
      rep << label << "_precision = " << r.precision << "\n";
      rep << label << "_recall = " << r.recall << "\n";
      rep << label << "_f_score = " << r.f_score << "\n";
    };
    row("method", result.method_report.overall);
    row("class", result.class_report.overall);
    rep << "migration_correctness = " << result.migration_correctness << "\n";
    rep << "migration_edr = " << result.migration_edr << "\n";
  }
  return result;
}

}  // namespace deepam
