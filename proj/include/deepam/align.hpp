#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

#include "deepam/errors.hpp"
#include "deepam/model.hpp"
#include "deepam/synth.hpp"

namespace deepam {

inline double cosine_similarity(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw numeric_error("cosine_similarity length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw numeric_error("cosine_similarity of a zero vector");
  double s = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(s, -1.0, 1.0);
}

class EmbeddingIndex {
 public:
  EmbeddingIndex() = default;

  explicit EmbeddingIndex(std::vector<SemanticVector> vectors)
      : vectors_(std::move(vectors)) {
    norms_.reserve(vectors_.size());
    for (const auto& v : vectors_) {
      double sq = 0.0;
      for (double x : v.values) sq += x * x;
      const double norm = std::sqrt(sq);
      if (norm == 0.0) throw numeric_error("zero-norm semantic vector: " + v.record_id);
      norms_.push_back(norm);
    }
  }

  bool empty() const { return vectors_.empty(); }
  std::size_t size() const { return vectors_.size(); }
  const SemanticVector& vector(std::size_t i) const { return vectors_[i]; }
  double norm(std::size_t i) const { return norms_[i]; }

 private:
  std::vector<SemanticVector> vectors_;
  std::vector<double> norms_;
};

struct AlignedPair {
  std::string source_id;
  std::string target_id;
  double score = 0.0;
};

enum class AlignDirection { SourceToTarget, TargetToSource, Both };

struct AlignOptions {
  AlignDirection direction = AlignDirection::SourceToTarget;
  bool mutual_only = false;
  double min_score = -2.0;  // keep everything by default
};

namespace detail {

// Exact argmax-cosine search; ties broken by smaller record id.
inline AlignedPair best_match(const EmbeddingIndex& from, std::size_t i,
                              const EmbeddingIndex& to) {
  const SemanticVector& q = from.vector(i);
  double best = -2.0;
  std::size_t best_j = 0;
  for (std::size_t j = 0; j < to.size(); ++j) {
    double dot = 0.0;
    const Vec& t = to.vector(j).values;
    if (t.size() != q.values.size()) throw numeric_error("embedding dimension mismatch");
    for (std::size_t k = 0; k < t.size(); ++k) dot += q.values[k] * t[k];
    const double score = std::clamp(dot / (from.norm(i) * to.norm(j)), -1.0, 1.0);
    if (score > best ||
        (score == best && to.vector(j).record_id < to.vector(best_j).record_id)) {
      best = score;
      best_j = j;
    }
  }
  return {q.record_id, to.vector(best_j).record_id, best};
}

}  // namespace detail

inline std::vector<AlignedPair> align(const EmbeddingIndex& source_index,
                                      const EmbeddingIndex& target_index,
                                      const AlignOptions& options = {}) {
  if (source_index.empty() || target_index.empty())
    throw data_error("alignment requires non-empty indices for both languages");

  // source_id always holds the query record and target_id its best match,
  // so the direction a pair came from stays recoverable downstream
  std::vector<AlignedPair> out;
  auto run_direction = [&](const EmbeddingIndex& from, const EmbeddingIndex& to) {
    for (std::size_t i = 0; i < from.size(); ++i) {
      AlignedPair p = detail::best_match(from, i, to);
      if (p.score < options.min_score) continue;
      if (options.mutual_only) {
        // mutual nearest neighbor: the match must point back
        std::size_t j = 0;
        for (; j < to.size(); ++j)
          if (to.vector(j).record_id == p.target_id) break;
        AlignedPair back = detail::best_match(to, j, from);
        if (back.target_id != p.source_id) continue;
      }
      out.push_back(std::move(p));
    }
  };

  if (options.direction == AlignDirection::SourceToTarget ||
      options.direction == AlignDirection::Both)
    run_direction(source_index, target_index);
  if (options.direction == AlignDirection::TargetToSource ||
      options.direction == AlignDirection::Both)
    run_direction(target_index, source_index);
  return out;
}

struct AlignmentAccuracy {
  double source_direction = 0.0;
  double target_direction = 0.0;
  double mean = 0.0;
  std::size_t source_pairs = 0;
  std::size_t target_pairs = 0;
};

// A pair counts as correct when both records belong to the same concept.
// A pair whose query (source_id) is a SOURCE-language record counts toward
// the source direction, otherwise toward the target direction; `source_ids`
// supplies the SOURCE-language record ids.
inline AlignmentAccuracy alignment_accuracy(const std::vector<AlignedPair>& pairs,
                                            const GroundTruth& truth,
                                            const std::set<std::string>& source_ids) {
  std::size_t src_total = 0, src_ok = 0, tgt_total = 0, tgt_ok = 0;
  for (const auto& p : pairs) {
    const bool correct = truth.concept_of(p.source_id) == truth.concept_of(p.target_id);
    if (source_ids.count(p.source_id)) {
      ++src_total;
      src_ok += correct;
    } else {
      ++tgt_total;
      tgt_ok += correct;
    }
  }
  AlignmentAccuracy acc;
  acc.source_pairs = src_total;
  acc.target_pairs = tgt_total;
  acc.source_direction = src_total ? static_cast<double>(src_ok) / src_total : 0.0;
  acc.target_direction = tgt_total ? static_cast<double>(tgt_ok) / tgt_total : 0.0;
  if (src_total && tgt_total)
    acc.mean = 0.5 * (acc.source_direction + acc.target_direction);
  else
    acc.mean = src_total ? acc.source_direction : acc.target_direction;
  return acc;
}

inline void save_alignment(const std::vector<AlignedPair>& pairs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write alignment file: " + path);
  out << std::fixed << std::setprecision(6);
  for (const auto& p : pairs)
    out << p.source_id << '\t' << p.target_id << '\t' << p.score << '\n';
}

inline std::vector<AlignedPair> load_alignment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open alignment file: " + path);
  std::vector<AlignedPair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = detail::split_tabs(line);
    if (fields.size() != 3)
      throw data_error("alignment line " + std::to_string(lineno) + ": expected 3 fields");
    pairs.push_back({fields[0], fields[1], std::stod(fields[2])});
  }
  return pairs;
}

}  // namespace deepam
