#!/usr/bin/env python3
"""Regenerates include/crossvox/detail/nfd_data.hpp from Python's unicodedata.

Covers code points below U+3000, which is enough for Latin, IPA, Greek,
Cyrillic and every combining mark block. Hangul and CJK compatibility
decompositions are deliberately excluded; IPA input never contains them.
"""

import sys
import unicodedata

LIMIT = 0x3000


def main(out_path: str) -> None:
    decomp_entries = []  # (cp, [decomposed code points])
    ccc_entries = []     # (cp, combining class)
    flat: list[int] = []

    for cp in range(LIMIT):
        ch = chr(cp)
        ccc = unicodedata.combining(ch)
        if ccc != 0:
            ccc_entries.append((cp, ccc))
        nfd = unicodedata.normalize("NFD", ch)
        # Only canonical decompositions map to a different sequence.
        if nfd != ch:
            decomp_entries.append((cp, [ord(c) for c in nfd]))

    with open(out_path, "w", encoding="utf-8") as f:
        w = f.write
        w("// Generated by scripts/gen_nfd_table.py -- do not edit by hand.\n")
        w("// Canonical decompositions and combining classes for U+0000..U+%04X.\n" % (LIMIT - 1))
        w("#ifndef CROSSVOX_DETAIL_NFD_DATA_HPP\n")
        w("#define CROSSVOX_DETAIL_NFD_DATA_HPP\n\n")
        w("#include <cstdint>\n\n")
        w("namespace crossvox::detail {\n\n")

        w("struct NfdDecomp {\n")
        w("  char32_t cp;\n")
        w("  std::uint32_t offset;\n")
        w("  std::uint8_t len;\n")
        w("};\n\n")
        w("struct NfdCombining {\n")
        w("  char32_t cp;\n")
        w("  std::uint8_t ccc;\n")
        w("};\n\n")

        for _, seq in decomp_entries:
            flat.extend(seq)
        w("inline constexpr char32_t kNfdExpansion[] = {\n")
        for i in range(0, len(flat), 12):
            w("    " + ", ".join("0x%04X" % c for c in flat[i:i + 12]) + ",\n")
        w("};\n\n")

        w("inline constexpr NfdDecomp kNfdDecomp[] = {\n")
        off = 0
        for cp, seq in decomp_entries:
            w("    {0x%04X, %d, %d},\n" % (cp, off, len(seq)))
            off += len(seq)
        w("};\n\n")

        w("inline constexpr NfdCombining kNfdCombining[] = {\n")
        for cp, ccc in ccc_entries:
            w("    {0x%04X, %d},\n" % (cp, ccc))
        w("};\n\n")

        w("inline constexpr char32_t kNfdCoverageLimit = 0x%04X;\n\n" % LIMIT)
        w("}  // namespace crossvox::detail\n\n")
        w("#endif  // CROSSVOX_DETAIL_NFD_DATA_HPP\n")

    print(f"{len(decomp_entries)} decompositions, {len(ccc_entries)} combining marks, "
          f"{len(flat)} expansion code points -> {out_path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "include/crossvox/detail/nfd_data.hpp")
