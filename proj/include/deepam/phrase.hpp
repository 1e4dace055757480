#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "deepam/errors.hpp"

namespace deepam {

using TokenSeq = std::vector<std::string>;

struct SequencePair {
  TokenSeq source;
  TokenSeq target;
};

// Phrases keyed by their space-joined form; ordered maps keep mining output
// deterministic.
struct PhraseCounts {
  std::map<TokenSeq, std::size_t> source_count;                      // count(s)
  std::map<std::pair<TokenSeq, TokenSeq>, std::size_t> pair_count;   // count(s,t)
  std::size_t max_phrase_len = 8;
};

namespace detail {

inline std::vector<TokenSeq> phrases_of(const TokenSeq& seq, std::size_t max_len,
                                        bool distinct) {
  std::vector<TokenSeq> out;
  std::set<TokenSeq> seen;
  for (std::size_t start = 0; start < seq.size(); ++start)
    for (std::size_t len = 1; len <= max_len && start + len <= seq.size(); ++len) {
      TokenSeq p(seq.begin() + start, seq.begin() + start + len);
      if (distinct && !seen.insert(p).second) continue;
      out.push_back(std::move(p));
    }
  return out;
}

}  // namespace detail

// count(s) = pairs whose source contains s; count(s,t) = pairs where s and t
// co-occur. Default is set semantics (presence per pair); multiplicity mode
// counts positional occurrences instead, in which case count(s,t) may exceed
// count(s).
inline PhraseCounts extract_phrase_pairs(const std::vector<SequencePair>& aligned_pairs,
                                         std::size_t max_phrase_len = 8,
                                         bool multiplicity = false) {
  if (aligned_pairs.empty()) throw data_error("no aligned pairs to mine");
  PhraseCounts counts;
  counts.max_phrase_len = max_phrase_len;
  for (const auto& pair : aligned_pairs) {
    if (pair.source.empty() || pair.target.empty()) continue;
    auto src = detail::phrases_of(pair.source, max_phrase_len, !multiplicity);
    auto tgt = detail::phrases_of(pair.target, max_phrase_len, !multiplicity);
    for (const auto& s : src) {
      ++counts.source_count[s];
      for (const auto& t : tgt) ++counts.pair_count[{s, t}];
    }
  }
  return counts;
}

// p(t|s) = count(s,t) / (count(s) + 1)
inline double translation_probability(std::size_t count_st, std::size_t count_s) {
  if (count_st > count_s)
    throw data_error("count(s,t) exceeds count(s)");
  return static_cast<double>(count_st) / (static_cast<double>(count_s) + 1.0);
}

struct MappingRule {
  TokenSeq source;
  TokenSeq target;
  std::size_t cooccurrence_count = 0;
  std::size_t source_count = 0;
  double probability = 0.0;
};

// Table-3 style buckets by source phrase length: 1, 2-3, 4-7, 8+.
struct RuleBuckets {
  std::array<std::size_t, 4> counts{};

  static std::size_t bucket_of(std::size_t len) {
    if (len == 1) return 0;
    if (len <= 3) return 1;
    if (len <= 7) return 2;
    return 3;
  }
  std::size_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
};

// Strict threshold: only probability > threshold survives.
inline std::vector<MappingRule> mine_mappings(const PhraseCounts& counts, double threshold = 0.5,
                                              RuleBuckets* buckets = nullptr) {
  if (threshold < 0.0 || threshold >= 1.0)
    throw config_error("mining threshold must lie in [0, 1)");
  std::vector<MappingRule> rules;
  for (const auto& [st, c_st] : counts.pair_count) {
    const std::size_t c_s = counts.source_count.at(st.first);
    const double p = static_cast<double>(c_st) / (static_cast<double>(c_s) + 1.0);
    if (p > threshold)
      rules.push_back({st.first, st.second, c_st, c_s, p});
  }
  std::sort(rules.begin(), rules.end(), [](const MappingRule& a, const MappingRule& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    if (a.cooccurrence_count != b.cooccurrence_count)
      return a.cooccurrence_count > b.cooccurrence_count;
    if (a.source != b.source) return a.source < b.source;
    return a.target < b.target;
  });
  if (buckets) {
    RuleBuckets rb;
    for (const auto& r : rules) ++rb.counts[RuleBuckets::bucket_of(r.source.size())];
    *buckets = rb;
  }
  return rules;
}

struct OneToOneMappings {
  std::vector<std::pair<std::string, std::string>> method_level;  // rule order
  std::vector<std::pair<std::string, std::string>> class_level;   // deduplicated
};

inline std::string class_of(const std::string& token) {
  const std::size_t dot = token.find('.');
  return dot == std::string::npos ? token : token.substr(0, dot);
}

// Method level: every rule with both phrases of length one. Class level:
// per source class keep the highest-probability target class, ties by
// lexicographically smaller target.
inline OneToOneMappings one_to_one_mappings(const std::vector<MappingRule>& rules) {
  OneToOneMappings out;
  std::map<std::string, std::pair<std::string, double>> best_class;
  for (const auto& r : rules) {
    if (r.source.size() != 1 || r.target.size() != 1) continue;
    out.method_level.emplace_back(r.source[0], r.target[0]);
    const std::string sc = class_of(r.source[0]);
    const std::string tc = class_of(r.target[0]);
    auto it = best_class.find(sc);
    if (it == best_class.end() || r.probability > it->second.second ||
        (r.probability == it->second.second && tc < it->second.first))
      best_class[sc] = {tc, r.probability};
  }
  for (const auto& [sc, tp] : best_class) out.class_level.emplace_back(sc, tp.first);
  return out;
}

// Greedy longest-match lookup migration: at each position take the longest
// source phrase with a rule (highest probability wins within a length),
// emit its target phrase, and advance past it; tokens with no rule are
// dropped.
inline TokenSeq migrate_sequence(const std::vector<MappingRule>& rules, const TokenSeq& seq) {
  std::map<TokenSeq, const MappingRule*> best;
  for (const auto& r : rules) {
    auto it = best.find(r.source);
    if (it == best.end() || r.probability > it->second->probability) best[r.source] = &r;
  }
  std::size_t max_len = 1;
  for (const auto& [s, r] : best) max_len = std::max(max_len, s.size());

  TokenSeq out;
  std::size_t i = 0;
  while (i < seq.size()) {
    const MappingRule* hit = nullptr;
    std::size_t hit_len = 0;
    for (std::size_t len = std::min(max_len, seq.size() - i); len >= 1; --len) {
      TokenSeq cand(seq.begin() + i, seq.begin() + i + len);
      auto it = best.find(cand);
      if (it != best.end()) {
        hit = it->second;
        hit_len = len;
        break;
      }
    }
    if (hit) {
      out.insert(out.end(), hit->target.begin(), hit->target.end());
      i += hit_len;
    } else {
      ++i;
    }
  }
  return out;
}

// One rule per line:
// source phrase \t target phrase \t p(t|s) \t count(s,t) \t count(s)
inline void save_rules(const std::vector<MappingRule>& rules, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write rules file: " + path);
  out << std::fixed << std::setprecision(6);
  for (const auto& r : rules) {
    for (std::size_t i = 0; i < r.source.size(); ++i) out << (i ? " " : "") << r.source[i];
    out << '\t';
    for (std::size_t i = 0; i < r.target.size(); ++i) out << (i ? " " : "") << r.target[i];
    out << '\t' << r.probability << '\t' << r.cooccurrence_count << '\t' << r.source_count
        << '\n';
  }
}

}  // namespace deepam
