#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "deepam/align.hpp"
#include "deepam/corpus.hpp"
#include "deepam/errors.hpp"

namespace deepam {

enum class MappingGranularity { Class, Method };

struct GroundTruthSet {
  MappingGranularity granularity = MappingGranularity::Method;
  std::set<std::pair<std::string, std::string>> mappings;
  std::map<std::string, std::string> package_of_source;  // optional Table-1 breakdown

  bool empty() const { return mappings.empty(); }
};

// File: source_token \t target_token [\t package]
inline GroundTruthSet load_mapping_truth(const std::string& path,
                                         MappingGranularity granularity) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open mapping ground truth: " + path);
  GroundTruthSet truth;
  truth.granularity = granularity;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split_tabs(line);
    if (fields.size() < 2)
      throw data_error("mapping truth line " + std::to_string(lineno) + ": expected 2+ fields");
    truth.mappings.emplace(fields[0], fields[1]);
    if (fields.size() > 2 && !fields[2].empty()) truth.package_of_source[fields[0]] = fields[2];
  }
  if (truth.empty()) throw data_error("mapping ground truth empty: " + path);
  return truth;
}

struct EvalRow {
  std::string label;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

struct EvalReport {
  EvalRow overall;
  std::vector<EvalRow> per_package;
};

namespace detail {

inline void finish_row(EvalRow& row) {
  const double tp = static_cast<double>(row.true_positives);
  // P reported as 0 when nothing was mined; F as 0 when P+R = 0
  row.precision = (row.true_positives + row.false_positives)
                      ? tp / static_cast<double>(row.true_positives + row.false_positives)
                      : 0.0;
  row.recall = (row.true_positives + row.false_negatives)
                   ? tp / static_cast<double>(row.true_positives + row.false_negatives)
                   : 0.0;
  row.f_score = (row.precision + row.recall) > 0.0
                    ? 2.0 * row.precision * row.recall / (row.precision + row.recall)
                    : 0.0;
}

}  // namespace detail

struct MinedMappingSet {
  MappingGranularity granularity = MappingGranularity::Method;
  std::set<std::pair<std::string, std::string>> mappings;
};

inline EvalReport score_mappings(const MinedMappingSet& mined, const GroundTruthSet& truth) {
  if (mined.granularity != truth.granularity)
    throw data_error("granularity mismatch between mined mappings and ground truth");
  if (truth.empty()) throw data_error("mapping ground truth is empty");

  EvalReport report;
  report.overall.label = "all";
  for (const auto& m : mined.mappings)
    (truth.mappings.count(m) ? report.overall.true_positives : report.overall.false_positives) += 1;
  for (const auto& m : truth.mappings)
    if (!mined.mappings.count(m)) ++report.overall.false_negatives;
  detail::finish_row(report.overall);

  if (!truth.package_of_source.empty()) {
    std::set<std::string> packages;
    for (const auto& [src, pkg] : truth.package_of_source) packages.insert(pkg);
    for (const auto& pkg : packages) {
      EvalRow row;
      row.label = pkg;
      auto in_package = [&](const std::pair<std::string, std::string>& m) {
        auto it = truth.package_of_source.find(m.first);
        return it != truth.package_of_source.end() && it->second == pkg;
      };
      for (const auto& m : mined.mappings)
        if (in_package(m)) (truth.mappings.count(m) ? row.true_positives : row.false_positives) += 1;
      for (const auto& m : truth.mappings)
        if (in_package(m) && !mined.mappings.count(m)) ++row.false_negatives;
      detail::finish_row(row);
      report.per_package.push_back(std::move(row));
    }
  }
  return report;
}

enum class EditCostModel {
  UnitSubstitution,  // classic Levenshtein, substitution cost 1
  DeleteAddOnly      // substitution realized as delete + add, cost 2
};

inline std::size_t edit_distance(const std::vector<std::string>& a,
                                 const std::vector<std::string>& b,
                                 EditCostModel model = EditCostModel::UnitSubstitution) {
  const std::size_t sub_cost = model == EditCostModel::UnitSubstitution ? 1 : 2;
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : sub_cost);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

struct SequenceResult {
  std::vector<std::string> result;
  std::vector<std::string> truth;
};

// EDR = sum of edit distances / sum of truth lengths
inline double edit_distance_ratio(const std::vector<SequenceResult>& results,
                                  EditCostModel model = EditCostModel::UnitSubstitution) {
  if (results.empty()) throw data_error("no sequence results to score");
  std::size_t dist = 0, len = 0;
  for (const auto& r : results) {
    if (r.truth.empty()) throw data_error("ground truth sequence is empty");
    dist += edit_distance(r.result, r.truth, model);
    len += r.truth.size();
  }
  return static_cast<double>(dist) / static_cast<double>(len);
}

// Fraction of exact matches; an optional judgment vector overrides equality.
inline double correctness(const std::vector<SequenceResult>& results,
                          const std::vector<bool>& judgments = {}) {
  if (results.empty()) throw data_error("no sequence results to score");
  if (!judgments.empty() && judgments.size() != results.size())
    throw data_error("judgment count does not match result count");
  std::size_t ok = 0;
  for (std::size_t i = 0; i < results.size(); ++i)
    ok += judgments.empty() ? (results[i].result == results[i].truth) : judgments[i];
  return static_cast<double>(ok) / static_cast<double>(results.size());
}

struct IrOptions {
  bool stopwords = false;
  bool stem = false;
};

namespace detail {

inline bool is_stopword(const std::string& w) {
  static const std::set<std::string> kStop = {
      "a", "an", "the", "to", "of", "in", "on", "for", "from", "with",
      "and", "or", "into", "onto", "at", "by", "as", "is", "are", "be"};
  return kStop.count(w) != 0;
}

// crude suffix stripping, enough to merge simple inflections
inline std::string stem_word(std::string w) {
  auto ends = [&](const char* suf) {
    const std::size_t n = std::strlen(suf);
    return w.size() > n + 2 && w.compare(w.size() - n, n, suf) == 0;
  };
  if (ends("ing")) w.resize(w.size() - 3);
  else if (ends("ies")) { w.resize(w.size() - 3); w.push_back('y'); }
  else if (ends("ed")) w.resize(w.size() - 2);
  else if (ends("es")) w.resize(w.size() - 2);
  else if (ends("s")) w.resize(w.size() - 1);
  return w;
}

}  // namespace detail

struct IrAlignmentResult {
  std::vector<AlignedPair> pairs;
  std::vector<std::string> skipped;         // empty after filtering
  std::vector<std::string> low_confidence;  // best similarity was 0
};

// TF-IDF bag-of-words over descriptions: tf * log(N / (df + 1)) with N the
// size of the whole description collection (both languages). For each
// source description the highest-cosine target is aligned; ties and
// all-zero similarities fall back to the smallest record id.
inline IrAlignmentResult ir_baseline_align(const Corpus& corpus, const IrOptions& options = {}) {
  require_bilingual(corpus);

  auto terms_of = [&](const SnippetRecord& r) {
    std::map<std::string, double> tf;
    for (std::string w : r.description) {
      if (options.stopwords && detail::is_stopword(w)) continue;
      if (options.stem) w = detail::stem_word(w);
      tf[w] += 1.0;
    }
    return tf;
  };

  std::vector<std::map<std::string, double>> tfs(corpus.records.size());
  std::map<std::string, double> df;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    tfs[i] = terms_of(corpus.records[i]);
    for (const auto& [w, c] : tfs[i]) df[w] += 1.0;
  }
  const double n_docs = static_cast<double>(corpus.records.size());

  IrAlignmentResult result;
  std::vector<std::map<std::string, double>> weights(corpus.records.size());
  std::vector<double> norms(corpus.records.size(), 0.0);
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    for (const auto& [w, c] : tfs[i]) {
      const double v = c * std::log(n_docs / (df[w] + 1.0));
      weights[i][w] = v;
      norms[i] += v * v;
    }
    norms[i] = std::sqrt(norms[i]);
    if (weights[i].empty() || norms[i] == 0.0)
      result.skipped.push_back(corpus.records[i].id);
  }

  auto run_direction = [&](LanguageTag from) {
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
      if (corpus.records[i].language != from || norms[i] == 0.0) continue;
      double best = -1.0;
      std::size_t best_j = corpus.records.size();
      for (std::size_t j = 0; j < corpus.records.size(); ++j) {
        if (corpus.records[j].language == from || norms[j] == 0.0) continue;
        double dot = 0.0;
        for (const auto& [w, v] : weights[i]) {
          auto it = weights[j].find(w);
          if (it != weights[j].end()) dot += v * it->second;
        }
        const double score = dot / (norms[i] * norms[j]);
        if (best_j == corpus.records.size() || score > best ||
            (score == best && corpus.records[j].id < corpus.records[best_j].id)) {
          best = score;
          best_j = j;
        }
      }
      if (best_j == corpus.records.size()) continue;
      if (best <= 0.0) result.low_confidence.push_back(corpus.records[i].id);
      result.pairs.push_back({corpus.records[i].id, corpus.records[best_j].id, std::max(best, 0.0)});
    }
  };
  run_direction(LanguageTag::Source);
  run_direction(LanguageTag::Target);
  return result;
}

}  // namespace deepam
