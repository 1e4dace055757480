#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "deepam/corpus.hpp"
#include "deepam/errors.hpp"
#include "deepam/rng.hpp"

namespace deepam {

// Desk-scale stand-in for a mined corpus: each concept is one cross-language
// API usage pattern plus per-language description paraphrases.
struct ConceptSpec {
  std::string concept_id;
  std::vector<std::string> source_pattern;
  std::vector<std::string> target_pattern;
  std::vector<std::vector<std::string>> source_paraphrases;
  std::vector<std::vector<std::string>> target_paraphrases;
  double noise_insert = 0.0;
  double noise_substitute = 0.0;

  void validate() const {
    if (concept_id.empty()) throw config_error("concept spec missing id");
    if (source_pattern.empty() || target_pattern.empty())
      throw config_error("concept " + concept_id + ": patterns must be non-empty");
    if (source_paraphrases.size() < 2 || target_paraphrases.size() < 2)
      throw config_error("concept " + concept_id + ": each language needs >= 2 paraphrases");
    std::set<std::string> src(source_pattern.begin(), source_pattern.end());
    for (const auto& t : target_pattern)
      if (src.count(t))
        throw config_error("concept " + concept_id + ": token namespaces overlap at '" + t + "'");
    if (noise_insert < 0 || noise_insert >= 1 || noise_substitute < 0 || noise_substitute >= 1)
      throw config_error("concept " + concept_id + ": noise rates must be in [0,1)");
  }
};

struct GroundTruth {
  std::map<std::string, std::string> record_to_concept;

  const std::string& concept_of(const std::string& record_id) const {
    auto it = record_to_concept.find(record_id);
    if (it == record_to_concept.end())
      throw data_error("no ground truth entry for record " + record_id);
    return it->second;
  }
};

// Concept spec file: INI-like sections, one per concept.
//
//   [concept read_file]
//   source_pattern = JFile.open JFile.read JFile.close
//   target_pattern = NFile.Open NFile.Read NFile.Close
//   source_paraphrase = read text from a file
//   source_paraphrase = load the file contents
//   target_paraphrase = read text from a file
//   target_paraphrase = fetch the document payload
//   noise_insert = 0.05
//   noise_substitute = 0.05
inline std::vector<ConceptSpec> load_concept_specs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open concept spec file: " + path);

  std::vector<ConceptSpec> specs;
  ConceptSpec cur;
  bool open = false;
  auto flush = [&] {
    if (open) {
      cur.validate();
      specs.push_back(cur);
      cur = ConceptSpec{};
    }
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos || line[a] == '#') continue;
    std::size_t b = line.find_last_not_of(" \t\r");
    std::string body = line.substr(a, b - a + 1);

    if (body.front() == '[') {
      if (body.back() != ']' || body.rfind("[concept ", 0) != 0)
        throw config_error("concept spec line " + std::to_string(lineno) + ": expected [concept <id>]");
      flush();
      cur.concept_id = body.substr(9, body.size() - 10);
      open = true;
      continue;
    }
    std::size_t eq = body.find('=');
    if (eq == std::string::npos || !open)
      throw config_error("concept spec line " + std::to_string(lineno) + ": expected key = value");
    std::string key = body.substr(0, eq);
    std::string value = body.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    std::size_t v = value.find_first_not_of(" \t");
    value = v == std::string::npos ? "" : value.substr(v);

    if (key == "source_pattern")
      cur.source_pattern = detail::split_ws(value);
    else if (key == "target_pattern")
      cur.target_pattern = detail::split_ws(value);
    else if (key == "source_paraphrase")
      cur.source_paraphrases.push_back(detail::split_ws(value));
    else if (key == "target_paraphrase")
      cur.target_paraphrases.push_back(detail::split_ws(value));
    else if (key == "noise_insert")
      cur.noise_insert = std::stod(value);
    else if (key == "noise_substitute")
      cur.noise_substitute = std::stod(value);
    else
      throw config_error("concept spec line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  flush();
  if (specs.empty()) throw config_error("concept spec file defines no concepts: " + path);
  return specs;
}

inline void save_concept_specs(const std::vector<ConceptSpec>& specs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write concept spec file: " + path);
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + v[i];
    return s;
  };
  for (const auto& c : specs) {
    out << "[concept " << c.concept_id << "]\n";
    out << "source_pattern = " << join(c.source_pattern) << '\n';
    out << "target_pattern = " << join(c.target_pattern) << '\n';
    for (const auto& p : c.source_paraphrases) out << "source_paraphrase = " << join(p) << '\n';
    for (const auto& p : c.target_paraphrases) out << "target_paraphrase = " << join(p) << '\n';
    out << "noise_insert = " << c.noise_insert << '\n';
    out << "noise_substitute = " << c.noise_substitute << "\n\n";
  }
}

namespace detail {

inline std::vector<std::string> noised_pattern(const std::vector<std::string>& pattern,
                                               const std::vector<std::string>& token_pool,
                                               double p_insert, double p_substitute, Rng& rng) {
  std::vector<std::string> out;
  for (const auto& tok : pattern) {
    if (p_insert > 0 && rng.next_unit() < p_insert)
      out.push_back(token_pool[rng.next_below(token_pool.size())]);
    if (p_substitute > 0 && rng.next_unit() < p_substitute)
      out.push_back(token_pool[rng.next_below(token_pool.size())]);
    else
      out.push_back(tok);
  }
  return out;
}

}  // namespace detail

// Deterministic under seed: specs in order, SOURCE before TARGET, record
// index ascending, one shared generator.
inline Corpus generate_synthetic_corpus(const std::vector<ConceptSpec>& specs,
                                        std::size_t n_per_concept, std::uint64_t seed,
                                        GroundTruth* truth = nullptr,
                                        const CorpusLimits& limits = CorpusLimits{}) {
  if (n_per_concept < 1) throw config_error("n_per_concept must be >= 1");
  for (const auto& s : specs) s.validate();

  // Per-language pools for noise token draws, covering all concepts.
  std::vector<std::string> source_pool, target_pool;
  {
    std::set<std::string> sp, tp;
    for (const auto& s : specs) {
      sp.insert(s.source_pattern.begin(), s.source_pattern.end());
      tp.insert(s.target_pattern.begin(), s.target_pattern.end());
    }
    source_pool.assign(sp.begin(), sp.end());
    target_pool.assign(tp.begin(), tp.end());
  }

  Rng rng(seed);
  Corpus corpus;
  corpus.max_api_len = limits.max_api_len;
  corpus.max_desc_len = limits.max_desc_len;
  GroundTruth gt;

  for (std::size_t ci = 0; ci < specs.size(); ++ci) {
    const ConceptSpec& spec = specs[ci];
    for (int lang_i = 0; lang_i < 2; ++lang_i) {
      const bool is_source = lang_i == 0;
      const auto& pattern = is_source ? spec.source_pattern : spec.target_pattern;
      const auto& pool = is_source ? source_pool : target_pool;
      const auto& paras = is_source ? spec.source_paraphrases : spec.target_paraphrases;
      for (std::size_t k = 0; k < n_per_concept; ++k) {
        SnippetRecord rec;
        std::ostringstream id;
        id << spec.concept_id << (is_source ? "_s_" : "_t_") << k;
        rec.id = id.str();
        rec.language = is_source ? LanguageTag::Source : LanguageTag::Target;
        rec.api_sequence =
            detail::noised_pattern(pattern, pool, spec.noise_insert, spec.noise_substitute, rng);
        rec.description = paras[rng.next_below(paras.size())];
        rec.provenance = "synthetic:" + spec.concept_id;
        if (rec.api_sequence.size() > corpus.max_api_len)
          rec.api_sequence.resize(corpus.max_api_len);
        gt.record_to_concept[rec.id] = spec.concept_id;
        corpus.records.push_back(std::move(rec));
      }
    }
  }
  corpus.build_vocabularies(limits.api_vocab_size, limits.word_vocab_size);
  if (truth) *truth = std::move(gt);
  return corpus;
}

inline void save_ground_truth(const GroundTruth& truth, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write ground truth file: " + path);
  for (const auto& [rec, concept_id] : truth.record_to_concept)
    out << rec << '\t' << concept_id << '\n';
}

inline GroundTruth load_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open ground truth file: " + path);
  GroundTruth gt;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = detail::split_tabs(line);
    if (fields.size() != 2)
      throw data_error("ground truth line " + std::to_string(lineno) + ": expected 2 fields");
    gt.record_to_concept[fields[0]] = fields[1];
  }
  if (gt.record_to_concept.empty()) throw data_error("ground truth file empty: " + path);
  return gt;
}

// Method-level token mappings implied by the specs, paired by position.
// Only concepts whose two patterns have equal length contribute.
inline std::vector<std::pair<std::string, std::string>> method_mappings_from_specs(
    const std::vector<ConceptSpec>& specs) {
  std::set<std::pair<std::string, std::string>> uniq;
  for (const auto& s : specs) {
    if (s.source_pattern.size() != s.target_pattern.size()) continue;
    for (std::size_t i = 0; i < s.source_pattern.size(); ++i)
      uniq.emplace(s.source_pattern[i], s.target_pattern[i]);
  }
  return {uniq.begin(), uniq.end()};
}

}  // namespace deepam
