#ifndef CROSSVOX_ARTIC_HPP
#define CROSSVOX_ARTIC_HPP

#include <array>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "crossvox/core.hpp"
#include "crossvox/errors.hpp"
#include "crossvox/unicode.hpp"

namespace crossvox {

// 66-dimensional articulatory encoding of one phoneme: a ternary block of 24
// phonological features followed by 42 grouped one-hot articulatory features.
inline constexpr std::size_t kTernaryDim = 24;
inline constexpr std::size_t kOneHotDim = 42;
inline constexpr std::size_t kArticDim = kTernaryDim + kOneHotDim;

struct ArticulatoryVector {
  std::array<double, kArticDim> values{};

  std::span<const double> all() const { return {values.data(), kArticDim}; }
  std::span<const double> ternary_block() const { return {values.data(), kTernaryDim}; }
  std::span<const double> onehot_block() const { return {values.data() + kTernaryDim, kOneHotDim}; }
};

// Names of the 24 ternary features, in column order.
inline constexpr std::array<std::string_view, kTernaryDim> kTernaryFeatureNames = {
    "syl",  "son",  "cons",   "cont", "delrel", "lat",   "nas",  "strid",
    "voi",  "sg",   "cg",     "ant",  "cor",    "distr", "lab",  "hi",
    "lo",   "back", "round",  "velaric", "tense", "long", "hitone", "hireg"};

// One-hot group schema: (name, first dim, width) within the 42-dim block.
// Widths sum to 42.
struct OneHotGroup {
  std::string_view name;
  std::size_t begin;
  std::size_t width;
};

inline constexpr std::array<OneHotGroup, 8> kOneHotGroups = {{
    {"class", 0, 3},            // vowel, consonant, special
    {"vowel_frontness", 3, 3},  // front, central, back
    {"vowel_openness", 6, 7},   // close .. open
    {"vowel_rounding", 13, 2},  // rounded, unrounded
    {"cons_place", 15, 12},     // bilabial .. labial_velar
    {"cons_manner", 27, 11},    // plosive .. click
    {"voicing", 38, 2},         // voiced, voiceless
    {"length", 40, 2},          // short, long
}};

enum class PhonemeCategory { Vowel, Consonant, Special };

struct PhonemeSegment {
  std::string symbol;     // NFD-normalized UTF-8
  std::size_t table_row;  // index into FeatureTable entries
};

class FeatureTable {
 public:
  struct Entry {
    std::string symbol;  // NFD-normalized UTF-8
    ArticulatoryVector vector;
  };

  std::size_t size() const { return entries_.size(); }
  const Entry& entry(std::size_t row) const { return entries_[row]; }
  const std::vector<Entry>& entries() const { return entries_; }

  bool contains(std::string_view symbol) const {
    return index_.count(nfd_utf8(symbol)) != 0;
  }

  // Row index of a symbol; normalizes before lookup.
  std::size_t row_of(std::string_view symbol) const {
    const auto it = index_.find(nfd_utf8(symbol));
    if (it == index_.end()) throw UnknownSymbolError(0, std::string(symbol));
    return it->second;
  }

  std::size_t max_key_length() const { return max_key_cps_; }

  PhonemeCategory category(std::size_t row) const {
    const auto block = entries_[row].vector.onehot_block();
    if (block[0] == 1.0) return PhonemeCategory::Vowel;
    if (block[1] == 1.0) return PhonemeCategory::Consonant;
    return PhonemeCategory::Special;
  }

  void add_entry(std::string symbol, const ArticulatoryVector& v) {
    std::string key = nfd_utf8(symbol);
    validate_vector(key, v);
    if (index_.count(key)) throw DuplicateSymbolError(key);
    index_.emplace(key, entries_.size());
    const std::u32string cps = utf8_decode(key);
    max_key_cps_ = std::max(max_key_cps_, cps.size());
    keys32_.emplace(std::move(cps), entries_.size());
    entries_.push_back(Entry{std::move(key), v});
  }

  // Enforces the per-entry invariants: ternary block in {-1,0,+1}, one-hot
  // block in {0,1} with at most one active dim per group.
  static void validate_vector(const std::string& symbol, const ArticulatoryVector& v) {
    for (std::size_t i = 0; i < kTernaryDim; ++i) {
      const double x = v.values[i];
      if (x != -1.0 && x != 0.0 && x != 1.0)
        throw ParseError("symbol '" + symbol + "': ternary feature " +
                         std::string(kTernaryFeatureNames[i]) + " outside {-1,0,1}");
    }
    for (std::size_t i = kTernaryDim; i < kArticDim; ++i) {
      const double x = v.values[i];
      if (x != 0.0 && x != 1.0)
        throw ParseError("symbol '" + symbol + "': one-hot dim " + std::to_string(i) +
                         " outside {0,1}");
    }
    for (const auto& g : kOneHotGroups) {
      int active = 0;
      for (std::size_t i = 0; i < g.width; ++i)
        if (v.values[kTernaryDim + g.begin + i] == 1.0) ++active;
      if (active > 1) throw OneHotViolationError(symbol, std::string(g.name));
    }
  }

  // Used by the segmenter: longest-match lookup over normalized code points.
  const std::map<std::u32string, std::size_t>& keys32() const { return keys32_; }

 private:
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> index_;
  std::map<std::u32string, std::size_t> keys32_;
  std::size_t max_key_cps_ = 0;
};

namespace detail {

inline std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

inline double parse_feature_value(const std::string& s, std::size_t line_no) {
  if (s == "-1") return -1.0;
  if (s == "0") return 0.0;
  if (s == "1") return 1.0;
  throw MalformedRowError(line_no, "feature value '" + s + "' outside {-1,0,1}");
}

}  // namespace detail

// Loads a feature table from TSV: header row, then one row per symbol with
// 1 + 24 + 42 columns. Comment lines start with '#'. The header is only
// checked for column count.
inline FeatureTable load_feature_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError(path);

  FeatureTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cols = detail::split_tsv(line);
    if (cols.size() != 1 + kArticDim)
      throw MalformedRowError(line_no, "expected " + std::to_string(1 + kArticDim) +
                                           " columns, got " + std::to_string(cols.size()));
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    if (cols[0].empty()) throw MalformedRowError(line_no, "empty symbol");
    ArticulatoryVector v;
    for (std::size_t i = 0; i < kArticDim; ++i) {
      const double x = detail::parse_feature_value(cols[1 + i], line_no);
      if (i >= kTernaryDim && x == -1.0)
        throw MalformedRowError(line_no, "one-hot value '-1' outside {0,1}");
      v.values[i] = x;
    }
    try {
      table.add_entry(cols[0], v);
    } catch (const ParseError& e) {
      throw MalformedRowError(line_no, e.what());
    }
  }
  if (!header_seen) throw MalformedRowError(line_no, "missing header row");
  return table;
}

struct FrontendOptions {
  // Extra single-code-point delimiters to drop besides whitespace.
  std::string extra_delimiters;
  // When true, runs of dropped delimiters emit one boundary segment,
  // provided boundary_symbol exists in the table.
  bool map_word_boundaries = false;
  std::string boundary_symbol = "_";
};

namespace detail {

inline bool is_default_delimiter(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == 0x00A0;
}

}  // namespace detail

// Greedy longest-match segmentation of an IPA string against the table keys.
// Both sides are NFD-normalized; whitespace and configured delimiters are
// dropped (or mapped to a boundary row). Unmatchable positions are a hard
// error: silently emitting zero vectors would corrupt training sets.
inline std::vector<PhonemeSegment> segment_ipa(std::string_view text, const FeatureTable& table,
                                               const FrontendOptions& opts = {}) {
  const std::u32string input = nfd(utf8_decode(text));
  const std::u32string delims = utf8_decode(opts.extra_delimiters);
  const auto is_delim = [&](char32_t cp) {
    return detail::is_default_delimiter(cp) || delims.find(cp) != std::u32string::npos;
  };

  std::vector<PhonemeSegment> out;
  const auto& keys = table.keys32();
  const std::size_t max_len = table.max_key_length();

  std::size_t i = 0;
  while (i < input.size()) {
    if (is_delim(input[i])) {
      const bool emit = opts.map_word_boundaries && table.contains(opts.boundary_symbol);
      while (i < input.size() && is_delim(input[i])) ++i;
      if (emit) {
        const std::size_t row = table.row_of(opts.boundary_symbol);
        out.push_back(PhonemeSegment{table.entry(row).symbol, row});
      }
      continue;
    }
    std::size_t matched = 0;
    std::size_t matched_row = 0;
    const std::size_t limit = std::min(max_len, input.size() - i);
    for (std::size_t len = limit; len >= 1; --len) {
      const auto it = keys.find(input.substr(i, len));
      if (it != keys.end()) {
        matched = len;
        matched_row = it->second;
        break;
      }
    }
    if (matched == 0) {
      // Report the full grapheme cluster: base char plus combining marks.
      std::u32string cluster(1, input[i]);
      std::size_t j = i + 1;
      while (j < input.size() && detail::combining_class(input[j]) != 0)
        cluster.push_back(input[j++]);
      throw UnknownSymbolError(i, utf8_encode(cluster));
    }
    out.push_back(PhonemeSegment{table.entry(matched_row).symbol, matched_row});
    i += matched;
  }
  return out;
}

// Pure table lookup; the segment's row is authoritative.
inline const ArticulatoryVector& vectorize(const PhonemeSegment& segment,
                                           const FeatureTable& table) {
  return table.entry(segment.table_row).vector;
}

inline std::vector<ArticulatoryVector> featurize_utterance(std::string_view text,
                                                           const FeatureTable& table,
                                                           const FrontendOptions& opts = {}) {
  std::vector<ArticulatoryVector> out;
  for (const auto& seg : segment_ipa(text, table, opts)) out.push_back(vectorize(seg, table));
  return out;
}

}  // namespace crossvox

#endif  // CROSSVOX_ARTIC_HPP
