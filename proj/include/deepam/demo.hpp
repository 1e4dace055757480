#pragma once

#include <string>
#include <vector>

#include "deepam/synth.hpp"

namespace deepam {

// Bundled 20-concept demo corpus spec, built as 10 twin pairs.
//
// Each pair shares a description frame "<verb> the <A> into the <B>"; the
// twin concept swaps A and B, so within a pair the two descriptions use the
// exact same bag of words in a different order. The cross-language paraphrase
// sets are made disjoint by synonym substitution on the sentence-final
// adverb: every source sentence ends in the source-language adverb and every
// target sentence in its synonym, so no paraphrase appears in both languages.
//
// This shape separates the sequential model from the bag-of-words baseline:
// TF-IDF retrieval cannot tell twins apart (identical bags, broken only by
// record-id ties) and never matches the adverb across languages, while the
// sequence model sees the word order and is pulled together across languages
// by the shared frame tokens.
inline std::vector<ConceptSpec> demo_concept_specs(double noise_insert = 0.05,
                                                   double noise_substitute = 0.0) {
  struct Pair {
    const char* base;     // concept id stem; twins are <base>_fwd / <base>_rev
    const char* noun_a;   // frame slot A
    const char* noun_b;   // frame slot B
    const char* verbs;    // two verbs shared across languages
    const char* src_adv;  // sentence-final adverb, source language
    const char* tgt_adv;  // synonym adverb, target language
    const char* src_api;  // camelCase stem for the J* action token
    const char* tgt_api;  // PascalCase stem for the N* action token
  };
  static const Pair pairs[] = {
      {"copy", "file", "backup", "copy duplicate", "quickly", "rapidly", "copyTo", "CopyTo"},
      {"insert", "row", "table", "insert add", "carefully", "cautiously", "insertInto",
       "InsertInto"},
      {"send", "packet", "socket", "send push", "immediately", "instantly", "sendVia", "SendVia"},
      {"post", "message", "queue", "post submit", "safely", "securely", "postTo", "PostTo"},
      {"put", "entry", "cache", "put place", "neatly", "tidily", "putInto", "PutInto"},
      {"draw", "image", "canvas", "draw paint", "quietly", "silently", "drawOn", "DrawOn"},
      {"merge", "record", "index", "merge fold", "directly", "promptly", "mergeInto", "MergeInto"},
      {"load", "page", "frame", "load read", "gently", "softly", "loadInto", "LoadInto"},
      {"swap", "value", "register", "swap move", "eagerly", "keenly", "swapInto", "SwapInto"},
      {"write", "block", "ledger", "write save", "firmly", "strongly", "writeTo", "WriteTo"},
  };

  auto cap = [](std::string w) {
    w[0] = static_cast<char>(w[0] - 'a' + 'A');
    return w;
  };

  std::vector<ConceptSpec> specs;
  for (const Pair& p : pairs) {
    auto verbs = detail::split_ws(p.verbs);
    for (int rev = 0; rev < 2; ++rev) {
      std::string a = rev ? p.noun_b : p.noun_a;
      std::string b = rev ? p.noun_a : p.noun_b;
      auto paras = [&](const std::string& adv) {
        std::vector<std::vector<std::string>> out;
        for (const auto& v : verbs) {
          out.push_back({v, "the", a, "into", "the", b, adv});
          out.push_back({v, "every", a, "into", "its", b, adv});
          out.push_back({"please", v, "this", a, "into", "that", b, adv});
        }
        return out;
      };
      ConceptSpec c;
      c.concept_id = std::string(p.base) + (rev ? "_rev" : "_fwd");
      c.source_pattern = {"J" + cap(a) + ".open",   "J" + cap(a) + ".validate",
                          "J" + cap(a) + "." + p.src_api,
                          "J" + cap(b) + ".create", "J" + cap(b) + ".commit",
                          "J" + cap(b) + ".close"};
      c.target_pattern = {"N" + cap(a) + ".Open",   "N" + cap(a) + ".Validate",
                          "N" + cap(a) + "." + p.tgt_api,
                          "N" + cap(b) + ".Create", "N" + cap(b) + ".Commit",
                          "N" + cap(b) + ".Close"};
      c.source_paraphrases = paras(p.src_adv);
      c.target_paraphrases = paras(p.tgt_adv);
      c.noise_insert = noise_insert;
      c.noise_substitute = noise_substitute;
      c.validate();
      specs.push_back(std::move(c));
    }
  }
  return specs;
}

}  // namespace deepam
