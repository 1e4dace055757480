#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "deepam/model.hpp"
#include "deepam/rng.hpp"

namespace deepam {

struct EpochLogEntry {
  std::size_t epoch = 0;
  double mean_loss = 0.0;  // per-token mean NLL over the epoch
  double joint_loss = 0.0; // mean objective value over the epoch's batches
  double wall_seconds = 0.0;
};

struct TrainingLog {
  std::vector<EpochLogEntry> entries;
  bool stopped_early = false;
};

struct TrainOptions {
  std::size_t epochs = 15;
  bool early_stop = true;
  double plateau_rel_improvement = 1e-4;
  std::size_t plateau_epochs = 3;
  bool verbose = false;
  std::ostream* progress = nullptr;
};

// One epoch = shuffle each language's pair list (seeded, without
// replacement), then consume aligned half-batches until the smaller
// language pool runs out; the leftover tail is dropped.
inline TrainingLog train(JointModel& model, const Corpus& corpus, const TrainOptions& opts) {
  require_bilingual(corpus);
  const ModelConfig& cfg = model.config();
  const std::vector<EncodedPair> pairs = encode_pairs(corpus, cfg);

  std::vector<std::size_t> source_idx, target_idx;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    (pairs[i].language == LanguageTag::Source ? source_idx : target_idx).push_back(i);

  const std::size_t half = cfg.batch_size / 2;
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  TrainingLog log;

  for (std::size_t epoch = 1; epoch <= opts.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    rng.shuffle(source_idx);
    rng.shuffle(target_idx);

    const std::size_t n_batches =
        std::max<std::size_t>(1, std::min(source_idx.size(), target_idx.size()) / half);

    double nll_sum = 0.0, joint_sum = 0.0;
    std::size_t token_sum = 0;
    for (std::size_t b = 0; b < n_batches; ++b) {
      std::vector<EncodedPair> batch;
      batch.reserve(2 * half);
      for (std::size_t k = 0; k < half && b * half + k < source_idx.size(); ++k)
        batch.push_back(pairs[source_idx[b * half + k]]);
      for (std::size_t k = 0; k < half && b * half + k < target_idx.size(); ++k)
        batch.push_back(pairs[target_idx[b * half + k]]);

      GradMap grads;
      LossStats stats = model.forward_backward(batch, grads);
      clip_gradients(grads, cfg.grad_clip_norm);
      adadelta_update(model.params(), grads, cfg.adadelta_rho, cfg.adadelta_epsilon);
      nll_sum += stats.nll_sum;
      token_sum += stats.tokens;
      joint_sum += stats.joint;
    }

    EpochLogEntry entry;
    entry.epoch = epoch;
    entry.mean_loss = token_sum ? nll_sum / static_cast<double>(token_sum) : 0.0;
    entry.joint_loss = joint_sum / static_cast<double>(n_batches);
    entry.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log.entries.push_back(entry);
    if (opts.progress)
      *opts.progress << "epoch " << epoch << " mean_loss " << entry.mean_loss << "\n";

    if (opts.early_stop && log.entries.size() > opts.plateau_epochs) {
      const double before = log.entries[log.entries.size() - 1 - opts.plateau_epochs].mean_loss;
      const double now = entry.mean_loss;
      if (before > 0 && (before - now) / before < opts.plateau_rel_improvement) {
        log.stopped_early = true;
        break;
      }
    }
  }
  return log;
}

// One epoch per line: epoch, mean_loss, wall_time (seconds).
inline void save_training_log(const TrainingLog& log, const std::string& path,
                              bool with_timestamps = true) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write training log: " + path);
  out << std::setprecision(12);
  for (const auto& e : log.entries)
    out << e.epoch << '\t' << e.mean_loss << '\t'
        << (with_timestamps ? e.wall_seconds : 0.0) << '\n';
}

}  // namespace deepam
