#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "crossvox/artic.hpp"
#include "crossvox/rng.hpp"
#include "crossvox/unicode.hpp"
#include "test_util.hpp"

using namespace crossvox;

namespace {

std::string tsv_header() {
  std::string h = "symbol";
  for (int i = 0; i < 66; ++i) h += "\tf" + std::to_string(i);
  return h + "\n";
}

// Row with the class marker at one-hot position `cls` (0 vowel, 1 consonant,
// 2 special) and optional extra active one-hot dims.
std::string row(const std::string& symbol, int cls, std::vector<int> extra_onehot = {},
                std::vector<std::pair<int, int>> ternary = {}) {
  std::vector<int> tern(24, 0);
  for (auto [idx, val] : ternary) tern[idx] = val;
  std::vector<int> onehot(42, 0);
  onehot[cls] = 1;
  for (int idx : extra_onehot) onehot[idx] = 1;
  std::string line = symbol;
  for (int v : tern) line += "\t" + std::to_string(v);
  for (int v : onehot) line += "\t" + std::to_string(v);
  return line + "\n";
}

FeatureTable table_from(const std::string& body, const std::string& name) {
  const auto dir = cvtest::scratch_dir(name);
  const auto path = dir + "/table.tsv";
  cvtest::write_file(path, tsv_header() + body);
  return load_feature_table(path);
}

}  // namespace

TEST(Nfd, DecomposesPrecomposedLatin) {
  EXPECT_EQ(nfd_utf8("ã"), "ã");  // a-tilde
  EXPECT_EQ(nfd_utf8("ç"), "ç");  // c-cedilla
  EXPECT_EQ(nfd_utf8("abc"), "abc");
}

TEST(Nfd, CanonicalOrderingSortsCombiningMarks) {
  // Cedilla (ccc 202) must precede tilde (ccc 230) regardless of input order.
  EXPECT_EQ(nfd_utf8("ã̧"), "ã̧");
  EXPECT_EQ(nfd_utf8("ã̧"), "ã̧");
  // Equal combining classes keep their relative order (stable).
  EXPECT_EQ(nfd_utf8("á̀"), "á̀");
}

TEST(Nfd, Idempotent) {
  Rng rng(404);
  const std::vector<std::string> pieces = {"a",      "ã", "̃", "p",
                                           "ç", "̧", "t",      "ː"};
  for (int iter = 0; iter < 500; ++iter) {
    std::string s;
    const std::size_t len = rng.below(8);
    for (std::size_t i = 0; i < len; ++i) s += pieces[rng.below(pieces.size())];
    const auto once = nfd_utf8(s);
    EXPECT_EQ(nfd_utf8(once), once);
  }
}

TEST(Utf8, RejectsInvalidSequences) {
  EXPECT_THROW(utf8_decode("\xFF"), ParseError);
  EXPECT_THROW(utf8_decode("\xC3"), ParseError);          // truncated
  EXPECT_THROW(utf8_decode("\xC0\xAF"), ParseError);      // overlong
  EXPECT_THROW(utf8_decode("\xED\xA0\x80"), ParseError);  // surrogate
  EXPECT_EQ(utf8_encode(utf8_decode("p͡a")), "p͡a");
}

TEST(LoadFeatureTable, WellFormedRows) {
  const auto table = table_from(row("p", 1) + row("a", 0) + row("_", 2), "load_ok");
  EXPECT_EQ(table.size(), 3u);
  EXPECT_TRUE(table.contains("p"));
  EXPECT_TRUE(table.contains("a"));
}

TEST(LoadFeatureTable, MissingFile) {
  EXPECT_THROW(load_feature_table("/nonexistent/table.tsv"), FileNotFoundError);
}

TEST(LoadFeatureTable, TernaryValueOutOfDomain) {
  std::string bad = row("p", 1);
  const auto pos = bad.find("\t0");
  bad.replace(pos, 2, "\t2");
  EXPECT_THROW(table_from(bad, "load_bad_ternary"), MalformedRowError);
}

TEST(LoadFeatureTable, WrongColumnCount) {
  EXPECT_THROW(table_from("p\t1\t0\n", "load_cols"), MalformedRowError);
}

TEST(LoadFeatureTable, DuplicateSymbol) {
  EXPECT_THROW(table_from(row("a", 0) + row("a", 0), "load_dup"), DuplicateSymbolError);
}

TEST(LoadFeatureTable, DuplicateAfterNormalization) {
  // Precomposed U+00E3 and "a" + COMBINING TILDE are the same key after NFD.
  EXPECT_THROW(table_from(row("ã", 0) + row("ã", 0), "load_dup_nfd"),
               DuplicateSymbolError);
}

TEST(LoadFeatureTable, OneHotViolation) {
  // Two active dims in the class group.
  EXPECT_THROW(table_from(row("p", 1, {0}), "load_onehot"), OneHotViolationError);
}

TEST(LoadFeatureTable, OneHotMinusOneRejected) {
  std::string bad = row("p", 1);
  const auto last_tab = bad.rfind("\t0");
  bad.replace(last_tab, 2, "\t-1");
  EXPECT_THROW(table_from(bad, "load_onehot_neg"), MalformedRowError);
}

TEST(SegmentIpa, EmptyInput) {
  const auto table = table_from(row("p", 1) + row("a", 0), "seg_empty");
  EXPECT_TRUE(segment_ipa("", table).empty());
}

TEST(SegmentIpa, GreedyLongestMatch) {
  const auto table = table_from(row("p", 1) + row("a", 0) + row("pa", 0), "seg_greedy");
  const auto segs = segment_ipa("pa", table);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].symbol, "pa");
}

TEST(SegmentIpa, UnknownSymbolPosition) {
  const auto table = table_from(row("p", 1), "seg_unknown");
  try {
    segment_ipa("p5", table);
    FAIL() << "expected UnknownSymbolError";
  } catch (const UnknownSymbolError& e) {
    EXPECT_EQ(e.position(), 1u);
    EXPECT_EQ(e.cluster(), "5");
  }
}

TEST(SegmentIpa, UnknownReportsGraphemeCluster) {
  const auto table = table_from(row("p", 1), "seg_cluster");
  try {
    segment_ipa("pã", table);  // a + combining tilde after NFD
    FAIL() << "expected UnknownSymbolError";
  } catch (const UnknownSymbolError& e) {
    EXPECT_EQ(e.position(), 1u);
    EXPECT_EQ(e.cluster(), "ã");
  }
}

TEST(SegmentIpa, NormalizationMakesCompositionIrrelevant) {
  // Table stores precomposed; input arrives decomposed.
  const auto table = table_from(row("ã", 0) + row("a", 0), "seg_nfd");
  const auto segs = segment_ipa("ã", table);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].symbol, nfd_utf8("ã"));
}

TEST(SegmentIpa, WhitespaceDroppedByDefault) {
  const auto table = table_from(row("p", 1) + row("a", 0), "seg_ws");
  const auto segs = segment_ipa("p a\tp", table);
  ASSERT_EQ(segs.size(), 3u);
  EXPECT_EQ(segs[0].symbol, "p");
  EXPECT_EQ(segs[1].symbol, "a");
}

TEST(SegmentIpa, BoundaryMappingEmitsBoundaryRow) {
  const auto table = table_from(row("p", 1) + row("_", 2), "seg_boundary");
  FrontendOptions opts;
  opts.map_word_boundaries = true;
  const auto segs = segment_ipa("p p", table, opts);
  ASSERT_EQ(segs.size(), 3u);
  EXPECT_EQ(segs[1].symbol, "_");
  // One boundary per delimiter run.
  EXPECT_EQ(segment_ipa("p  \t p", table, opts).size(), 3u);
}

TEST(Vectorize, PureLookup) {
  const auto table = table_from(row("p", 1), "vec_pure");
  const auto segs = segment_ipa("p", table);
  const auto& v1 = vectorize(segs[0], table);
  const auto& v2 = vectorize(segs[0], table);
  EXPECT_EQ(v1.values, v2.values);
}

TEST(FeaturizeUtterance, ComposesSegmentAndLookup) {
  const auto table = table_from(row("p", 1) + row("a", 0), "feat_compose");
  EXPECT_TRUE(featurize_utterance("", table).empty());
  EXPECT_EQ(featurize_utterance("pa", table).size(), 2u);
  EXPECT_THROW(featurize_utterance("pXa", table), UnknownSymbolError);
}

// --- Bundled table ----------------------------------------------------------

TEST(BundledTable, AllEntriesSatisfyVectorInvariants) {
  const auto table = load_feature_table(cvtest::bundled_table_path());
  ASSERT_GT(table.size(), 80u);
  for (const auto& e : table.entries()) {
    SCOPED_TRACE(e.symbol);
    EXPECT_NO_THROW(FeatureTable::validate_vector(e.symbol, e.vector));
    // Round-trip: each bundled symbol segments to itself.
    const auto segs = segment_ipa(e.symbol, table);
    ASSERT_EQ(segs.size(), 1u);
    EXPECT_EQ(segs[0].symbol, e.symbol);
  }
}

TEST(BundledTable, PlosiveBilabialVoicelessReadbackForP) {
  const auto table = load_feature_table(cvtest::bundled_table_path());
  const auto& p = table.entry(table.row_of("p")).vector;
  const auto onehot = p.onehot_block();
  EXPECT_EQ(onehot[1], 1.0);       // class: consonant
  EXPECT_EQ(onehot[15], 1.0);      // place: bilabial
  EXPECT_EQ(onehot[27], 1.0);      // manner: plosive
  EXPECT_EQ(onehot[39], 1.0);      // voicing: voiceless
  EXPECT_EQ(p.values[2], 1.0);     // consonantal
  EXPECT_EQ(p.values[8], -1.0);    // voice
}

TEST(BundledTable, SyllabicSeparatesVowelsFromConsonants) {
  const auto table = load_feature_table(cvtest::bundled_table_path());
  const auto& p = table.entry(table.row_of("p")).vector;
  const auto& a = table.entry(table.row_of("a")).vector;
  EXPECT_EQ(p.values[0], -1.0);
  EXPECT_EQ(a.values[0], 1.0);
}

TEST(BundledTable, AffricateIsSingleSegment) {
  const auto table = load_feature_table(cvtest::bundled_table_path());
  const auto segs = segment_ipa("t͡s", table);  // t + tie bar + s
  ASSERT_EQ(segs.size(), 1u);
  const auto segs_plain = segment_ipa("ts", table);
  EXPECT_EQ(segs_plain.size(), 2u);
}

TEST(BundledTable, SegmentationIdempotentUnderRenormalization) {
  const auto table = load_feature_table(cvtest::bundled_table_path());
  Rng rng(2024);
  for (int iter = 0; iter < 200; ++iter) {
    std::string utterance;
    std::vector<std::string> expected;
    const std::size_t len = 1 + rng.below(12);
    for (std::size_t i = 0; i < len; ++i) {
      const auto& symbol = table.entry(rng.below(table.size())).symbol;
      utterance += symbol;
    }
    const auto first = segment_ipa(utterance, table);
    std::string rebuilt;
    for (const auto& s : first) rebuilt += s.symbol;
    const auto second = segment_ipa(rebuilt, table);
    ASSERT_EQ(first.size(), second.size());
    for (std::size_t i = 0; i < first.size(); ++i)
      EXPECT_EQ(first[i].table_row, second[i].table_row);
  }
}

TEST(BundledTable, ConcatenationProperty) {
  const auto table = load_feature_table(cvtest::bundled_table_path());
  Rng rng(77);
  int checked = 0;
  for (int iter = 0; iter < 200; ++iter) {
    std::string s1, s2;
    const std::size_t n1 = 1 + rng.below(6), n2 = 1 + rng.below(6);
    for (std::size_t i = 0; i < n1; ++i) s1 += table.entry(rng.below(table.size())).symbol;
    for (std::size_t i = 0; i < n2; ++i) s2 += table.entry(rng.below(table.size())).symbol;
    const auto joint = featurize_utterance(s1 + s2, table);
    const auto left = featurize_utterance(s1, table);
    const auto right = featurize_utterance(s2, table);
    // The boundary must not have merged into a longer symbol.
    if (joint.size() != left.size() + right.size()) continue;
    ++checked;
    for (std::size_t i = 0; i < joint.size(); ++i) {
      const auto& expect = i < left.size() ? left[i] : right[i - left.size()];
      EXPECT_EQ(joint[i].values, expect.values);
    }
  }
  EXPECT_GT(checked, 150);
}

int active_in_group(const ArticulatoryVector& v, const OneHotGroup& g) {
  int active = 0;
  for (std::size_t i = 0; i < g.width; ++i)
    if (v.onehot_block()[g.begin + i] == 1.0) ++active;
  return active;
}

TEST(BundledTable, VowelsAndConsonantsFillTheirGroups) {
  const auto table = load_feature_table(cvtest::bundled_table_path());
  for (const auto& e : table.entries()) {
    SCOPED_TRACE(e.symbol);
    const auto cat = table.category(table.row_of(e.symbol));
    if (cat == PhonemeCategory::Vowel) {
      EXPECT_EQ(active_in_group(e.vector, kOneHotGroups[1]), 1);  // frontness
      EXPECT_EQ(active_in_group(e.vector, kOneHotGroups[2]), 1);  // openness
      EXPECT_EQ(active_in_group(e.vector, kOneHotGroups[4]), 0);  // no place
    } else if (cat == PhonemeCategory::Consonant) {
      EXPECT_EQ(active_in_group(e.vector, kOneHotGroups[4]), 1);  // place
      EXPECT_EQ(active_in_group(e.vector, kOneHotGroups[5]), 1);  // manner
      EXPECT_EQ(active_in_group(e.vector, kOneHotGroups[1]), 0);  // no frontness
    }
  }
}
