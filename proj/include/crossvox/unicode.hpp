#ifndef CROSSVOX_UNICODE_HPP
#define CROSSVOX_UNICODE_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>

#include "crossvox/detail/nfd_data.hpp"
#include "crossvox/errors.hpp"

namespace crossvox {

// UTF-8 <-> code point conversion and canonical decomposition (NFD).
//
// IPA symbols arrive with diacritics in inconsistent composition orders
// ("a" + COMBINING TILDE vs the precomposed U+00E3), so both table keys and
// input text are decomposed before matching. The bundled data covers code
// points below U+3000, which spans Latin, IPA, Greek, Cyrillic and all
// combining mark blocks; anything above passes through unchanged.

inline std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    char32_t cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      throw ParseError("invalid utf-8 byte at offset " + std::to_string(i));
    }
    if (i + len > s.size()) throw ParseError("truncated utf-8 sequence at offset " + std::to_string(i));
    for (std::size_t k = 1; k < len; ++k) {
      const auto bk = static_cast<unsigned char>(s[i + k]);
      if ((bk & 0xC0) != 0x80)
        throw ParseError("invalid utf-8 continuation at offset " + std::to_string(i + k));
      cp = (cp << 6) | (bk & 0x3F);
    }
    // Reject overlong encodings and surrogates.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF)
      throw ParseError("invalid utf-8 code point at offset " + std::to_string(i));
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void utf8_append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string utf8_encode(std::u32string_view s) {
  std::string out;
  out.reserve(s.size() * 2);
  for (char32_t cp : s) utf8_append(out, cp);
  return out;
}

namespace detail {

inline const NfdDecomp* find_decomp(char32_t cp) {
  const auto* begin = std::begin(kNfdDecomp);
  const auto* end = std::end(kNfdDecomp);
  const auto* it = std::lower_bound(begin, end, cp,
                                    [](const NfdDecomp& d, char32_t c) { return d.cp < c; });
  return (it != end && it->cp == cp) ? it : nullptr;
}

inline std::uint8_t combining_class(char32_t cp) {
  const auto* begin = std::begin(kNfdCombining);
  const auto* end = std::end(kNfdCombining);
  const auto* it = std::lower_bound(begin, end, cp,
                                    [](const NfdCombining& d, char32_t c) { return d.cp < c; });
  return (it != end && it->cp == cp) ? it->ccc : 0;
}

}  // namespace detail

// Canonical decomposition followed by canonical ordering of combining marks.
// The bundled decompositions are already fully expanded, so no recursion is
// needed at run time.
inline std::u32string nfd(std::u32string_view s) {
  std::u32string out;
  out.reserve(s.size() + 4);
  for (char32_t cp : s) {
    if (const auto* d = detail::find_decomp(cp)) {
      for (std::uint8_t k = 0; k < d->len; ++k)
        out.push_back(detail::kNfdExpansion[d->offset + k]);
    } else {
      out.push_back(cp);
    }
  }
  // Canonical ordering: stable-sort each run of nonzero combining classes.
  std::size_t i = 0;
  while (i < out.size()) {
    if (detail::combining_class(out[i]) == 0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < out.size() && detail::combining_class(out[j]) != 0) ++j;
    std::stable_sort(out.begin() + i, out.begin() + j, [](char32_t a, char32_t b) {
      return detail::combining_class(a) < detail::combining_class(b);
    });
    i = j;
  }
  return out;
}

inline std::string nfd_utf8(std::string_view s) { return utf8_encode(nfd(utf8_decode(s))); }

}  // namespace crossvox

#endif  // CROSSVOX_UNICODE_HPP
