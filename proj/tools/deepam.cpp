#include <iostream>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "deepam/pipeline.hpp"

namespace {

using namespace deepam;

AlignDirection parse_direction(const std::string& s) {
  if (s == "s2t") return AlignDirection::SourceToTarget;
  if (s == "t2s") return AlignDirection::TargetToSource;
  if (s == "both") return AlignDirection::Both;
  throw config_error("direction must be one of s2t, t2s, both");
}

struct CommonModelFlags {
  std::size_t hidden = 64;
  std::size_t embedding = 64;
  std::size_t layers = 1;
  std::size_t batch = 200;
  bool separate_encoders = false;
  std::string cell = "gru";

  void attach(CLI::App* cmd) {
    cmd->add_option("--hidden", hidden, "hidden units per layer");
    cmd->add_option("--embedding", embedding, "token embedding dimension");
    cmd->add_option("--layers", layers, "encoder/decoder layers");
    cmd->add_option("--batch", batch, "batch size (half per language)");
    cmd->add_flag("--separate-encoders", separate_encoders,
                  "use one encoder per language instead of a shared one");
    cmd->add_option("--cell", cell, "recurrent cell: gru or tanh")
        ->check(CLI::IsMember({"gru", "tanh"}));
  }

  void apply(ModelConfig& mc) const {
    mc.hidden_units = hidden;
    mc.embedding_dim = embedding;
    mc.num_layers = layers;
    mc.batch_size = batch;
    mc.separate_encoders = separate_encoders;
    mc.cell = cell == "gru" ? CellType::Gru : CellType::Tanh;
  }
};

Corpus load_or_die(const std::string& path, const CorpusLimits& limits, LoadReport* rep) {
  return load_corpus(path, limits, rep);
}

int run(int argc, char** argv) {
  CLI::App app{"DeepAM: cross-language API mapping via joint semantic embedding"};
  app.require_subcommand(1);
  app.set_config("--config");

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "generate a synthetic bilingual corpus");
  std::string sy_specs, sy_out = "corpus.tsv", sy_truth = "alignment_truth.tsv";
  std::string sy_mapping_truth;
  std::size_t sy_n = 50;
  std::uint64_t sy_seed = 7;
  bool sy_demo = false;
  synth->add_option("--specs", sy_specs, "concept spec file");
  synth->add_flag("--demo", sy_demo, "use the bundled demo concepts");
  synth->add_option("--n", sy_n, "records per concept per language");
  synth->add_option("--seed", sy_seed, "random seed");
  synth->add_option("--out", sy_out, "corpus output path");
  synth->add_option("--truth", sy_truth, "record->concept ground truth output path");
  synth->add_option("--mapping-truth", sy_mapping_truth, "token mapping truth output path");

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "train the joint embedding model");
  std::string tr_corpus, tr_ckpt = "model.ckpt", tr_log = "train_log.tsv", tr_resume;
  std::size_t tr_epochs = 30;
  std::uint64_t tr_seed = 7;
  bool tr_no_early_stop = false, tr_no_timestamps = false;
  CommonModelFlags tr_model;
  train_cmd->add_option("--corpus", tr_corpus, "corpus file")->required();
  train_cmd->add_option("--out", tr_ckpt, "checkpoint output path");
  train_cmd->add_option("--log", tr_log, "training log output path");
  train_cmd->add_option("--epochs", tr_epochs, "training epochs");
  train_cmd->add_option("--seed", tr_seed, "random seed");
  train_cmd->add_option("--resume", tr_resume, "checkpoint to continue from");
  train_cmd->add_flag("--no-early-stop", tr_no_early_stop, "disable the loss plateau stop");
  train_cmd->add_flag("--no-timestamps", tr_no_timestamps, "suppress wall time in the log");
  tr_model.attach(train_cmd);

  // ---- align ----
  auto* align_cmd = app.add_subcommand("align", "align sequences by cosine similarity");
  std::string al_ckpt, al_corpus, al_out = "alignment.tsv", al_direction = "s2t";
  bool al_mutual = false;
  double al_min_score = -2.0;
  align_cmd->add_option("--checkpoint", al_ckpt, "trained model checkpoint")->required();
  align_cmd->add_option("--corpus", al_corpus, "corpus file")->required();
  align_cmd->add_option("--out", al_out, "alignment output path");
  align_cmd->add_option("--direction", al_direction, "s2t, t2s, or both");
  align_cmd->add_flag("--mutual", al_mutual, "keep only mutual nearest neighbors");
  align_cmd->add_option("--min-score", al_min_score, "drop pairs below this cosine");

  // ---- mine ----
  auto* mine_cmd = app.add_subcommand("mine", "mine mapping rules from aligned pairs");
  std::string mi_pairs, mi_corpus, mi_out = "rules.tsv";
  double mi_threshold = 0.5;
  std::size_t mi_max_len = 8;
  bool mi_multiplicity = false;
  mine_cmd->add_option("--pairs", mi_pairs, "alignment file")->required();
  mine_cmd->add_option("--corpus", mi_corpus, "corpus file (record id lookup)")->required();
  mine_cmd->add_option("--out", mi_out, "rules output path");
  mine_cmd->add_option("--threshold", mi_threshold, "strict probability threshold");
  mine_cmd->add_option("--max-phrase-len", mi_max_len, "maximum phrase length");
  mine_cmd->add_flag("--multiplicity", mi_multiplicity,
                     "count positional occurrences instead of presence per pair");

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "score alignments and mined mappings");
  std::string ev_alignment, ev_truth, ev_rules, ev_mapping_truth, ev_corpus;
  std::string ev_granularity = "method";
  eval_cmd->add_option("--alignment", ev_alignment, "alignment file to score");
  eval_cmd->add_option("--truth", ev_truth, "record->concept ground truth");
  eval_cmd->add_option("--corpus", ev_corpus, "corpus file (for language of record ids)");
  eval_cmd->add_option("--rules", ev_rules, "mined rules file to score");
  eval_cmd->add_option("--mapping-truth", ev_mapping_truth, "token mapping ground truth");
  eval_cmd->add_option("--granularity", ev_granularity, "method or class")
      ->check(CLI::IsMember({"method", "class"}));

  // ---- pipeline ----
  auto* pipe_cmd = app.add_subcommand("pipeline", "run synth/train/align/mine/eval end to end");
  PipelineConfig pc;
  bool pl_no_timestamps = false, pl_mutual = false, pl_quiet = false;
  CommonModelFlags pl_model;
  pipe_cmd->add_option("--specs", pc.specs_path, "concept spec file (default: bundled demo)");
  pipe_cmd->add_option("--corpus", pc.corpus_path, "existing corpus instead of synthesis");
  pipe_cmd->add_option("--truth", pc.alignment_truth_path, "ground truth for --corpus");
  pipe_cmd->add_option("--out-dir", pc.out_dir, "output directory");
  pipe_cmd->add_option("--n", pc.n_per_concept, "records per concept per language");
  pipe_cmd->add_option("--seed", pc.seed, "random seed");
  pipe_cmd->add_option("--epochs", pc.epochs, "training epochs");
  pipe_cmd->add_option("--threshold", pc.mining_threshold, "mining threshold");
  pipe_cmd->add_option("--max-phrase-len", pc.max_phrase_len, "maximum phrase length");
  pipe_cmd->add_flag("--mutual", pl_mutual, "mutual-nearest filter during alignment");
  pipe_cmd->add_flag("--no-timestamps", pl_no_timestamps, "suppress wall times in outputs");
  pipe_cmd->add_flag("--quiet", pl_quiet, "suppress progress output");
  pl_model.attach(pipe_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors map to exit code 2
  }

  CorpusLimits limits;

  if (synth->parsed()) {
    if (sy_specs.empty() && !sy_demo)
      throw config_error("synth needs --specs or --demo");
    auto specs = sy_specs.empty() ? demo_concept_specs() : load_concept_specs(sy_specs);
    GroundTruth truth;
    Corpus corpus = generate_synthetic_corpus(specs, sy_n, sy_seed, &truth);
    save_corpus(corpus, sy_out);
    save_ground_truth(truth, sy_truth);
    if (!sy_mapping_truth.empty()) {
      std::ofstream out(sy_mapping_truth);
      if (!out) throw data_error("cannot write " + sy_mapping_truth);
      for (const auto& m : method_mappings_from_specs(specs))
        out << m.first << '\t' << m.second << '\n';
    }
    std::cout << "wrote " << corpus.records.size() << " records to " << sy_out << " ("
              << corpus.count(LanguageTag::Source) << " SOURCE, "
              << corpus.count(LanguageTag::Target) << " TARGET)\n";
    return 0;
  }

  if (train_cmd->parsed()) {
    LoadReport rep;
    Corpus corpus = load_or_die(tr_corpus, limits, &rep);
    require_bilingual(corpus);
    ModelConfig mc;
    tr_model.apply(mc);
    mc.api_vocab_size = corpus.api_vocab.size();
    mc.word_vocab_size = corpus.word_vocab.size();
    mc.seed = tr_seed;

    JointModel model = tr_resume.empty() ? JointModel(mc) : load_checkpoint(tr_resume);
    TrainOptions topts;
    topts.epochs = tr_epochs;
    topts.early_stop = !tr_no_early_stop;
    topts.progress = &std::cout;
    TrainingLog log = train(model, corpus, topts);
    save_training_log(log, tr_log, !tr_no_timestamps);
    save_checkpoint(model, tr_ckpt);
    std::cout << "kept " << rep.kept() << " records (dropped " << rep.dropped_too_long
              << " over-length); checkpoint: " << tr_ckpt << "\n";
    return 0;
  }

  if (align_cmd->parsed()) {
    Corpus corpus = load_or_die(al_corpus, limits, nullptr);
    JointModel model = load_checkpoint(al_ckpt);
    auto vectors = model.embed_corpus(corpus);
    std::vector<SemanticVector> src, tgt;
    for (auto& v : vectors)
      (v.language == LanguageTag::Source ? src : tgt).push_back(std::move(v));
    AlignOptions opts;
    opts.direction = parse_direction(al_direction);
    opts.mutual_only = al_mutual;
    opts.min_score = al_min_score;
    auto pairs = align(EmbeddingIndex(std::move(src)), EmbeddingIndex(std::move(tgt)), opts);
    save_alignment(pairs, al_out);
    std::cout << "wrote " << pairs.size() << " aligned pairs to " << al_out << "\n";
    return 0;
  }

  if (mine_cmd->parsed()) {
    Corpus corpus = load_or_die(mi_corpus, limits, nullptr);
    auto pairs = load_alignment(mi_pairs);
    auto seqs = detail::pairs_to_sequences(pairs, corpus);
    PhraseCounts counts = extract_phrase_pairs(seqs, mi_max_len, mi_multiplicity);
    RuleBuckets buckets;
    auto rules = mine_mappings(counts, mi_threshold, &buckets);
    save_rules(rules, mi_out);
    std::cout << "mined " << rules.size() << " rules (len buckets " << buckets.counts[0] << "/"
              << buckets.counts[1] << "/" << buckets.counts[2] << "/" << buckets.counts[3]
              << ") to " << mi_out << "\n";
    return 0;
  }

  if (eval_cmd->parsed()) {
    bool did_anything = false;
    if (!ev_alignment.empty()) {
      if (ev_truth.empty() || ev_corpus.empty())
        throw config_error("eval --alignment needs --truth and --corpus");
      Corpus corpus = load_or_die(ev_corpus, limits, nullptr);
      std::set<std::string> source_ids;
      for (const auto& r : corpus.records)
        if (r.language == LanguageTag::Source) source_ids.insert(r.id);
      auto pairs = load_alignment(ev_alignment);
      auto acc = alignment_accuracy(pairs, load_ground_truth(ev_truth), source_ids);
      std::cout << "alignment accuracy: source " << acc.source_direction << ", target "
                << acc.target_direction << ", mean " << acc.mean << "\n";
      did_anything = true;
    }
    if (!ev_rules.empty()) {
      if (ev_mapping_truth.empty())
        throw config_error("eval --rules needs --mapping-truth");
      const auto gran =
          ev_granularity == "method" ? MappingGranularity::Method : MappingGranularity::Class;
      GroundTruthSet truth = load_mapping_truth(ev_mapping_truth, gran);
      std::ifstream in(ev_rules);
      if (!in) throw data_error("cannot open rules file: " + ev_rules);
      std::vector<MappingRule> rules;
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = detail::split_tabs(line);
        if (f.size() != 5) throw data_error("bad rules line: " + line);
        rules.push_back({detail::split_ws(f[0]), detail::split_ws(f[1]),
                         static_cast<std::size_t>(std::stoull(f[3])),
                         static_cast<std::size_t>(std::stoull(f[4])), std::stod(f[2])});
      }
      OneToOneMappings ones = one_to_one_mappings(rules);
      MinedMappingSet mined;
      mined.granularity = gran;
      const auto& src = gran == MappingGranularity::Method ? ones.method_level : ones.class_level;
      mined.mappings.insert(src.begin(), src.end());
      EvalReport report = score_mappings(mined, truth);
      std::cout << ev_granularity << " P " << report.overall.precision << " R "
                << report.overall.recall << " F " << report.overall.f_score << " (TP "
                << report.overall.true_positives << " FP " << report.overall.false_positives
                << " FN " << report.overall.false_negatives << ")\n";
      for (const auto& row : report.per_package)
        std::cout << "  " << row.label << " P " << row.precision << " R " << row.recall << " F "
                  << row.f_score << "\n";
      did_anything = true;
    }
    if (!did_anything) throw config_error("eval needs --alignment and/or --rules");
    return 0;
  }

  if (pipe_cmd->parsed()) {
    pc.timestamps = !pl_no_timestamps;
    pc.alignment.mutual_only = pl_mutual;
    pl_model.apply(pc.model);
    if (!pl_quiet) pc.progress = &std::cout;
    PipelineResult r = run_pipeline(pc);
    std::cout << "alignment accuracy (neural vs IR baseline):\n"
              << "  source: " << r.neural_accuracy.source_direction << " vs "
              << r.ir_accuracy.source_direction << "\n"
              << "  target: " << r.neural_accuracy.target_direction << " vs "
              << r.ir_accuracy.target_direction << "\n"
              << "  mean:   " << r.neural_accuracy.mean << " vs " << r.ir_accuracy.mean << "\n"
              << "rules: " << r.rule_count << " (buckets " << r.buckets.counts[0] << "/"
              << r.buckets.counts[1] << "/" << r.buckets.counts[2] << "/" << r.buckets.counts[3]
              << ")\n"
              << "report: " << r.report_path << "\n";
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const deepam::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const deepam::data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const deepam::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
