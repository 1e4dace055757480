#pragma once

#include <cctype>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "deepam/errors.hpp"
#include "deepam/vocab.hpp"

namespace deepam {

enum class LanguageTag { Source, Target };

inline const char* to_string(LanguageTag lang) {
  return lang == LanguageTag::Source ? "SOURCE" : "TARGET";
}

inline LanguageTag language_from_string(const std::string& s) {
  if (s == "SOURCE") return LanguageTag::Source;
  if (s == "TARGET") return LanguageTag::Target;
  throw data_error("unknown language tag: " + s);
}

struct SnippetRecord {
  std::string id;
  LanguageTag language = LanguageTag::Source;
  std::vector<std::string> api_sequence;
  std::vector<std::string> description;
  std::string provenance;
};

struct CorpusLimits {
  std::size_t max_api_len = 30;
  std::size_t max_desc_len = 30;
  std::size_t api_vocab_size = 10000;
  std::size_t word_vocab_size = 10000;
  bool dedup = false;  // drop exact <api,desc,lang> duplicates
};

struct LoadReport {
  std::size_t lines_parsed = 0;
  std::size_t kept_source = 0;
  std::size_t kept_target = 0;
  std::size_t dropped_too_long = 0;
  std::size_t dropped_duplicate = 0;

  std::size_t kept() const { return kept_source + kept_target; }
};

struct Corpus {
  std::vector<SnippetRecord> records;
  Vocabulary api_vocab{Modality::Api};
  Vocabulary word_vocab{Modality::Word};
  std::size_t max_api_len = 30;
  std::size_t max_desc_len = 30;

  std::size_t count(LanguageTag lang) const {
    std::size_t n = 0;
    for (const auto& r : records)
      if (r.language == lang) ++n;
    return n;
  }

  void build_vocabularies(std::size_t api_vocab_size, std::size_t word_vocab_size) {
    std::vector<std::vector<std::string>> apis, words;
    apis.reserve(records.size());
    words.reserve(records.size());
    for (const auto& r : records) {
      apis.push_back(r.api_sequence);
      words.push_back(r.description);
    }
    api_vocab = build_vocabulary(apis, Modality::Api, api_vocab_size);
    word_vocab = build_vocabulary(words, Modality::Word, word_vocab_size);
  }
};

// Fails when training would be meaningless; load itself tolerates a
// single-language or even empty record set (records may all be dropped by
// the length caps).
inline void require_bilingual(const Corpus& corpus) {
  if (corpus.count(LanguageTag::Source) == 0 || corpus.count(LanguageTag::Target) == 0)
    throw data_error("corpus must contain records for both SOURCE and TARGET");
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

}  // namespace detail

// File format: id \t lang \t space-joined API tokens \t space-joined words
inline Corpus load_corpus(const std::string& path, const CorpusLimits& limits,
                          LoadReport* report = nullptr) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open corpus file: " + path);

  Corpus corpus;
  corpus.max_api_len = limits.max_api_len;
  corpus.max_desc_len = limits.max_desc_len;
  LoadReport rep;
  std::vector<std::string> seen;  // dedup keys

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ++rep.lines_parsed;
    auto fields = detail::split_tabs(line);
    if (fields.size() < 4)
      throw data_error("corpus line " + std::to_string(lineno) + ": expected 4 tab-separated fields");

    SnippetRecord rec;
    rec.id = fields[0];
    rec.language = [&] {
      try {
        return language_from_string(fields[1]);
      } catch (const data_error&) {
        throw data_error("corpus line " + std::to_string(lineno) + ": bad language tag '" + fields[1] + "'");
      }
    }();
    rec.api_sequence = detail::split_ws(fields[2]);
    rec.description = detail::split_ws(fields[3]);
    if (fields.size() > 4) rec.provenance = fields[4];
    if (rec.id.empty() || rec.api_sequence.empty() || rec.description.empty())
      throw data_error("corpus line " + std::to_string(lineno) + ": empty id, API sequence, or description");

    if (rec.api_sequence.size() > limits.max_api_len ||
        rec.description.size() > limits.max_desc_len) {
      ++rep.dropped_too_long;
      continue;
    }
    if (limits.dedup) {
      std::string key = fields[1] + "\t" + fields[2] + "\t" + fields[3];
      bool dup = false;
      for (const auto& k : seen)
        if (k == key) { dup = true; break; }
      if (dup) {
        ++rep.dropped_duplicate;
        continue;
      }
      seen.push_back(std::move(key));
    }
    if (rec.language == LanguageTag::Source)
      ++rep.kept_source;
    else
      ++rep.kept_target;
    corpus.records.push_back(std::move(rec));
  }

  if (rep.lines_parsed == 0) throw data_error("corpus empty: " + path);
  if (!corpus.records.empty())
    corpus.build_vocabularies(limits.api_vocab_size, limits.word_vocab_size);
  if (report) *report = rep;
  return corpus;
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write corpus file: " + path);
  for (const auto& r : corpus.records) {
    out << r.id << '\t' << to_string(r.language) << '\t';
    for (std::size_t i = 0; i < r.api_sequence.size(); ++i)
      out << (i ? " " : "") << r.api_sequence[i];
    out << '\t';
    for (std::size_t i = 0; i < r.description.size(); ++i)
      out << (i ? " " : "") << r.description[i];
    if (!r.provenance.empty()) out << '\t' << r.provenance;
    out << '\n';
  }
}

struct EncodedSequence {
  std::vector<int> ids;
  std::vector<bool> mask;  // true at real (non-PAD) positions

  std::size_t length() const {
    std::size_t n = 0;
    for (bool b : mask)
      if (b) ++n;
    return n;
  }
};

// decorate=true wraps the sequence in BOS...EOS (decoder side).
inline EncodedSequence encode_sequence(const std::vector<std::string>& tokens,
                                       const Vocabulary& vocab, std::size_t max_len,
                                       bool decorate = false) {
  if (tokens.empty()) throw data_error("cannot encode an empty token sequence");
  EncodedSequence enc;
  if (decorate) enc.ids.push_back(Vocabulary::kBos);
  for (const auto& t : tokens) enc.ids.push_back(vocab.lookup(t));
  if (decorate) enc.ids.push_back(Vocabulary::kEos);
  if (enc.ids.size() > max_len)
    throw data_error("sequence longer than max_len after encoding");
  enc.mask.assign(enc.ids.size(), true);
  while (enc.ids.size() < max_len) {
    enc.ids.push_back(Vocabulary::kPad);
    enc.mask.push_back(false);
  }
  return enc;
}

inline std::vector<std::string> decode_sequence(const EncodedSequence& enc,
                                                const Vocabulary& vocab) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < enc.ids.size(); ++i) {
    if (!enc.mask[i]) continue;
    int id = enc.ids[i];
    if (id == Vocabulary::kBos || id == Vocabulary::kEos) continue;
    out.push_back(vocab.token(static_cast<std::size_t>(id)));
  }
  return out;
}

namespace detail {

// Removes //, /**, */, leading '*' decoration and XML doc tags like
// <summary> so they neither produce word tokens nor mask sentence ends.
inline std::string strip_comment_markers(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool at_line_start = true;
  for (std::size_t i = 0; i < text.size();) {
    char c = text[i];
    if (c == '<') {  // XML doc tag
      std::size_t close = text.find('>', i);
      if (close != std::string::npos) {
        out.push_back(' ');
        i = close + 1;
        continue;
      }
    }
    if (c == '/' && i + 1 < text.size() && (text[i + 1] == '/' || text[i + 1] == '*')) {
      i += 2;
      while (i < text.size() && (text[i] == '/' || text[i] == '*')) ++i;
      out.push_back(' ');
      at_line_start = false;
      continue;
    }
    if (c == '*') {
      if (at_line_start || (i + 1 < text.size() && text[i + 1] == '/')) {
        i += (i + 1 < text.size() && text[i + 1] == '/') ? 2 : 1;
        out.push_back(' ');
        continue;
      }
    }
    if (c == '\n') {
      at_line_start = true;
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      at_line_start = false;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

}  // namespace detail

// First sentence of a documentation comment, lowercased and tokenized on
// non-alphanumeric boundaries.
inline std::vector<std::string> extract_summary(const std::string& comment_text) {
  if (comment_text.empty()) throw data_error("empty documentation comment");
  const std::string cleaned = detail::strip_comment_markers(comment_text);

  // Cut at the first '.', '!' or '?' followed by whitespace or end of text.
  std::string first = cleaned;
  for (std::size_t i = 0; i < cleaned.size(); ++i) {
    char c = cleaned[i];
    if (c == '.' || c == '!' || c == '?') {
      if (i + 1 == cleaned.size() ||
          std::isspace(static_cast<unsigned char>(cleaned[i + 1]))) {
        first = cleaned.substr(0, i);
        break;
      }
    }
  }

  std::vector<std::string> words;
  std::string cur;
  for (char ch : first) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      words.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(cur);
  if (words.empty()) throw data_error("documentation comment has no alphanumeric content");
  return words;
}

}  // namespace deepam
