#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include "deepam/eval.hpp"
#include "deepam/rng.hpp"

using namespace deepam;

namespace {

MinedMappingSet mined(std::set<std::pair<std::string, std::string>> m,
                      MappingGranularity g = MappingGranularity::Method) {
  MinedMappingSet s;
  s.granularity = g;
  s.mappings = std::move(m);
  return s;
}

GroundTruthSet truth_set(std::set<std::pair<std::string, std::string>> m,
                         MappingGranularity g = MappingGranularity::Method) {
  GroundTruthSet s;
  s.granularity = g;
  s.mappings = std::move(m);
  return s;
}

// exponential-time reference Levenshtein, safe for short sequences
std::size_t slow_edit_distance(const std::vector<std::string>& a,
                               const std::vector<std::string>& b, std::size_t sub_cost) {
  std::function<std::size_t(std::size_t, std::size_t)> rec = [&](std::size_t i,
                                                                 std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    std::size_t best = rec(i + 1, j + 1) + (a[i] == b[j] ? 0 : sub_cost);
    best = std::min(best, rec(i + 1, j) + 1);
    best = std::min(best, rec(i, j + 1) + 1);
    return best;
  };
  return rec(0, 0);
}

}  // namespace

TEST_CASE("precision/recall/F on the {m1,m3} vs {m1,m2} fixture") {
  auto report = score_mappings(mined({{"m1", "n1"}, {"m3", "n3"}}),
                               truth_set({{"m1", "n1"}, {"m2", "n2"}}));
  CHECK(report.overall.true_positives == 1);
  CHECK(report.overall.false_positives == 1);
  CHECK(report.overall.false_negatives == 1);
  CHECK(report.overall.precision == doctest::Approx(0.5));
  CHECK(report.overall.recall == doctest::Approx(0.5));
  CHECK(report.overall.f_score == doctest::Approx(0.5));
}

TEST_CASE("empty mined set: P = 0 by convention, R = 0, F = 0") {
  auto report = score_mappings(mined({}), truth_set({{"m1", "n1"}}));
  CHECK(report.overall.precision == 0.0);
  CHECK(report.overall.recall == 0.0);
  CHECK(report.overall.f_score == 0.0);
}

TEST_CASE("perfect mined set scores 1 everywhere") {
  auto report = score_mappings(mined({{"m1", "n1"}, {"m2", "n2"}}),
                               truth_set({{"m1", "n1"}, {"m2", "n2"}}));
  CHECK(report.overall.precision == 1.0);
  CHECK(report.overall.recall == 1.0);
  CHECK(report.overall.f_score == 1.0);
}

TEST_CASE("F satisfies F * (P + R) = 2 P R on random sets") {
  Rng rng(41);
  for (int it = 0; it < 30; ++it) {
    std::set<std::pair<std::string, std::string>> m, t;
    for (int i = 0; i < 12; ++i) {
      auto key = std::pair{"m" + std::to_string(rng.next_below(9)),
                           "n" + std::to_string(rng.next_below(9))};
      if (rng.next_unit() < 0.5) m.insert(key);
      if (rng.next_unit() < 0.5) t.insert(key);
    }
    if (t.empty()) t.insert({"m0", "n0"});
    auto r = score_mappings(mined(m), truth_set(t)).overall;
    CHECK(r.f_score * (r.precision + r.recall) ==
          doctest::Approx(2.0 * r.precision * r.recall).epsilon(1e-12));
  }
}

TEST_CASE("granularity mismatch is rejected") {
  CHECK_THROWS_AS(score_mappings(mined({{"a", "b"}}, MappingGranularity::Class),
                                 truth_set({{"a", "b"}}, MappingGranularity::Method)),
                  data_error);
}

TEST_CASE("per-package rows appear when the truth carries packages") {
  GroundTruthSet t = truth_set({{"io.read", "x"}, {"io.write", "y"}, {"net.open", "z"}});
  t.package_of_source = {{"io.read", "io"}, {"io.write", "io"}, {"net.open", "net"}};
  auto report = score_mappings(mined({{"io.read", "x"}, {"net.open", "bad"}}), t);
  REQUIRE(report.per_package.size() == 2);
  CHECK(report.per_package[0].label == "io");
  CHECK(report.per_package[0].true_positives == 1);
  CHECK(report.per_package[0].false_negatives == 1);
  CHECK(report.per_package[1].label == "net");
  CHECK(report.per_package[1].false_positives == 1);
  CHECK(report.per_package[1].true_positives == 0);
}

TEST_CASE("mapping truth file parsing") {
  auto tmp = (std::filesystem::temp_directory_path() / "deepam_truth.tsv").string();
  {
    std::ofstream out(tmp);
    out << "# comment\n"
        << "m1\tn1\tio\n"
        << "m2\tn2\n";
  }
  auto t = load_mapping_truth(tmp, MappingGranularity::Method);
  CHECK(t.mappings.size() == 2);
  CHECK(t.package_of_source.at("m1") == "io");
  std::remove(tmp.c_str());

  {
    std::ofstream out(tmp);
    out << "only_one_field\n";
  }
  CHECK_THROWS_AS(load_mapping_truth(tmp, MappingGranularity::Method), data_error);
  std::remove(tmp.c_str());
}

TEST_CASE("edit distance fixtures") {
  CHECK(edit_distance({"a", "b", "c"}, {"a", "x", "c"}) == 1);
  CHECK(edit_distance({"a", "b", "c"}, {"a", "x", "c"}, EditCostModel::DeleteAddOnly) == 2);
  CHECK(edit_distance({}, {"a", "b"}) == 2);
  CHECK(edit_distance({"a", "b"}, {}) == 2);
  CHECK(edit_distance({"a"}, {"a"}) == 0);
}

TEST_CASE("edit distance agrees with a recursive reference on short inputs") {
  Rng rng(19);
  const std::vector<std::string> pool = {"p", "q", "r", "s"};
  for (int it = 0; it < 40; ++it) {
    std::vector<std::string> a, b;
    for (std::size_t i = rng.next_below(7); i-- > 0;) a.push_back(pool[rng.next_below(4)]);
    for (std::size_t i = rng.next_below(7); i-- > 0;) b.push_back(pool[rng.next_below(4)]);
    CHECK(edit_distance(a, b) == slow_edit_distance(a, b, 1));
    CHECK(edit_distance(a, b, EditCostModel::DeleteAddOnly) == slow_edit_distance(a, b, 2));
  }
}

TEST_CASE("edit distance is invariant under consistent token renaming") {
  std::vector<std::string> a = {"u", "v", "u", "w"};
  std::vector<std::string> b = {"u", "w", "w"};
  auto rename = [](std::vector<std::string> s) {
    for (auto& t : s) t = "X_" + t;
    return s;
  };
  CHECK(edit_distance(a, b) == edit_distance(rename(a), rename(b)));
}

TEST_CASE("EDR fixtures: 1/3 and 1/5") {
  // one substitution over a truth of length 3
  std::vector<SequenceResult> one = {{{"a", "x", "c"}, {"a", "b", "c"}}};
  CHECK(edit_distance_ratio(one) == doctest::Approx(1.0 / 3.0));

  // distances 1 + 0 over lengths 3 + 2
  std::vector<SequenceResult> two = {{{"a", "x", "c"}, {"a", "b", "c"}},
                                     {{"d", "e"}, {"d", "e"}}};
  CHECK(edit_distance_ratio(two) == doctest::Approx(1.0 / 5.0));
}

TEST_CASE("EDR rejects degenerate inputs") {
  CHECK_THROWS_AS(edit_distance_ratio({}), data_error);
  std::vector<SequenceResult> bad = {{{"a"}, {}}};
  CHECK_THROWS_AS(edit_distance_ratio(bad), data_error);
}

TEST_CASE("correctness counts exact matches, 7/8 fixture") {
  std::vector<SequenceResult> results;
  for (int i = 0; i < 7; ++i) results.push_back({{"a", "b"}, {"a", "b"}});
  results.push_back({{"a", "x"}, {"a", "b"}});
  CHECK(correctness(results) == doctest::Approx(7.0 / 8.0));
  // explicit judgments override equality
  CHECK(correctness(results, std::vector<bool>(8, true)) == 1.0);
  CHECK_THROWS_AS(correctness(results, {true}), data_error);
  CHECK_THROWS_AS(correctness({}), data_error);
}

namespace {

Corpus ir_corpus() {
  Corpus c;
  auto put = [&](std::string id, LanguageTag lang, std::vector<std::string> desc) {
    SnippetRecord r;
    r.id = std::move(id);
    r.language = lang;
    r.api_sequence = {"A.x"};
    r.description = std::move(desc);
    c.records.push_back(std::move(r));
  };
  put("s1", LanguageTag::Source, {"read", "text", "file"});
  put("s2", LanguageTag::Source, {"open", "network", "socket"});
  put("t1", LanguageTag::Target, {"read", "text", "file"});
  put("t2", LanguageTag::Target, {"open", "network", "socket"});
  return c;
}

}  // namespace

TEST_CASE("IR baseline aligns identical descriptions with similarity 1") {
  auto result = ir_baseline_align(ir_corpus());
  REQUIRE(result.pairs.size() == 4);
  std::map<std::string, std::string> match;
  for (const auto& p : result.pairs) match[p.source_id] = p.target_id;
  CHECK(match.at("s1") == "t1");
  CHECK(match.at("s2") == "t2");
  CHECK(match.at("t1") == "s1");
  CHECK(match.at("t2") == "s2");
  for (const auto& p : result.pairs) CHECK(p.score == doctest::Approx(1.0));
  CHECK(result.low_confidence.empty());
}

TEST_CASE("IR baseline with zero lexical overlap falls back to the smallest id") {
  Corpus c;
  auto put = [&](std::string id, LanguageTag lang, std::vector<std::string> desc) {
    SnippetRecord r;
    r.id = std::move(id);
    r.language = lang;
    r.api_sequence = {"A.x"};
    r.description = std::move(desc);
    c.records.push_back(std::move(r));
  };
  put("s1", LanguageTag::Source, {"alpha", "beta"});
  put("t2", LanguageTag::Target, {"gamma"});
  put("t1", LanguageTag::Target, {"delta"});
  auto result = ir_baseline_align(c);
  REQUIRE(result.pairs.size() == 3);
  CHECK(result.pairs[0].source_id == "s1");
  CHECK(result.pairs[0].target_id == "t1");  // smallest id despite file order
  CHECK(result.pairs[0].score == 0.0);
  CHECK(std::count(result.low_confidence.begin(), result.low_confidence.end(), "s1") == 1);
}

TEST_CASE("IR options: stopwords and stemming change term vectors") {
  CHECK(detail::is_stopword("the"));
  CHECK_FALSE(detail::is_stopword("file"));
  CHECK(detail::stem_word("reading") == "read");
  CHECK(detail::stem_word("copies") == "copy");
  CHECK(detail::stem_word("files") == "fil");  // crude "es" strip
  CHECK(detail::stem_word("parsed") == "pars");
  CHECK(detail::stem_word("is") == "is");  // too short to strip

  Corpus c = ir_corpus();
  c.records[0].description = {"reading", "the", "text", "files"};
  IrOptions opts;
  opts.stopwords = true;
  opts.stem = true;
  auto result = ir_baseline_align(c, opts);
  std::map<std::string, std::string> match;
  for (const auto& p : result.pairs) match[p.source_id] = p.target_id;
  CHECK(match.at("s1") == "t1");  // still matches after normalization
}

TEST_CASE("IR baseline requires both languages") {
  Corpus c;
  SnippetRecord r;
  r.id = "s1";
  r.language = LanguageTag::Source;
  r.api_sequence = {"A.x"};
  r.description = {"read"};
  c.records.push_back(r);
  CHECK_THROWS_AS(ir_baseline_align(c), data_error);
}
