#!/usr/bin/env python3
"""Regenerates data/feature_table.tsv, the bundled articulatory feature table.

Each row is one IPA segment: 24 ternary phonological features followed by a
42-dim block of grouped one-hot articulatory features. Edit the inventories
below and rerun rather than editing the TSV by hand.
"""

import sys

TERNARY = ["syl", "son", "cons", "cont", "delrel", "lat", "nas", "strid",
           "voi", "sg", "cg", "ant", "cor", "distr", "lab", "hi", "lo",
           "back", "round", "velaric", "tense", "long", "hitone", "hireg"]

GROUPS = [
    ("class", ["vowel", "consonant", "special"]),
    ("vfront", ["front", "central", "back"]),
    ("vopen", ["close", "near_close", "close_mid", "mid", "open_mid", "near_open", "open"]),
    ("vround", ["rounded", "unrounded"]),
    ("place", ["bilabial", "labiodental", "dental", "alveolar", "postalveolar", "retroflex",
               "palatal", "velar", "uvular", "pharyngeal", "glottal", "labial_velar"]),
    ("manner", ["plosive", "nasal", "trill", "tap", "fricative", "affricate", "approximant",
                "lateral_approximant", "lateral_fricative", "implosive", "click"]),
    ("voicing", ["voiced", "voiceless"]),
    ("length", ["short", "long"]),
]

ONE_HOT_DIM = sum(len(vals) for _, vals in GROUPS)
assert ONE_HOT_DIM == 42, ONE_HOT_DIM

# vowel -> (frontness, openness, rounded, tense)
VOWELS = {
    "i": ("front", "close", False, 1), "y": ("front", "close", True, 1),
    "ɨ": ("central", "close", False, 0), "ʉ": ("central", "close", True, 0),
    "ɯ": ("back", "close", False, 1), "u": ("back", "close", True, 1),
    "ɪ": ("front", "near_close", False, -1), "ʏ": ("front", "near_close", True, -1),
    "ʊ": ("back", "near_close", True, -1),
    "e": ("front", "close_mid", False, 1), "ø": ("front", "close_mid", True, 1),
    "ɘ": ("central", "close_mid", False, 0), "ɵ": ("central", "close_mid", True, 0),
    "ɤ": ("back", "close_mid", False, 1), "o": ("back", "close_mid", True, 1),
    "ə": ("central", "mid", False, 0),
    "ɛ": ("front", "open_mid", False, -1), "œ": ("front", "open_mid", True, -1),
    "ɜ": ("central", "open_mid", False, 0), "ɞ": ("central", "open_mid", True, 0),
    "ʌ": ("back", "open_mid", False, -1), "ɔ": ("back", "open_mid", True, -1),
    "æ": ("front", "near_open", False, -1), "ɐ": ("central", "near_open", False, 0),
    "a": ("front", "open", False, -1), "ɶ": ("front", "open", True, -1),
    "ɑ": ("back", "open", False, -1), "ɒ": ("back", "open", True, -1),
}

LONG_VOWELS = ["iː", "yː", "uː", "eː", "oː", "aː", "ɛː", "ɔː", "øː"]
NASAL_VOWELS = {"ã": "a", "ẽ": "e", "ĩ": "i", "õ": "o", "ũ": "u"}  # precomposed on purpose

# consonant -> (place, manner, voiced)
CONSONANTS = {
    "p": ("bilabial", "plosive", False), "b": ("bilabial", "plosive", True),
    "t": ("alveolar", "plosive", False), "d": ("alveolar", "plosive", True),
    "ʈ": ("retroflex", "plosive", False), "ɖ": ("retroflex", "plosive", True),
    "c": ("palatal", "plosive", False), "ɟ": ("palatal", "plosive", True),
    "k": ("velar", "plosive", False), "ɡ": ("velar", "plosive", True),
    "g": ("velar", "plosive", True),  # ASCII alias of ɡ
    "q": ("uvular", "plosive", False), "ɢ": ("uvular", "plosive", True),
    "ʔ": ("glottal", "plosive", False),
    "m": ("bilabial", "nasal", True), "ɱ": ("labiodental", "nasal", True),
    "n": ("alveolar", "nasal", True), "ɳ": ("retroflex", "nasal", True),
    "ɲ": ("palatal", "nasal", True), "ŋ": ("velar", "nasal", True),
    "ɴ": ("uvular", "nasal", True),
    "ʙ": ("bilabial", "trill", True), "r": ("alveolar", "trill", True),
    "ʀ": ("uvular", "trill", True),
    "ɾ": ("alveolar", "tap", True), "ɽ": ("retroflex", "tap", True),
    "ɸ": ("bilabial", "fricative", False), "β": ("bilabial", "fricative", True),
    "f": ("labiodental", "fricative", False), "v": ("labiodental", "fricative", True),
    "θ": ("dental", "fricative", False), "ð": ("dental", "fricative", True),
    "s": ("alveolar", "fricative", False), "z": ("alveolar", "fricative", True),
    "ʃ": ("postalveolar", "fricative", False), "ʒ": ("postalveolar", "fricative", True),
    "ʂ": ("retroflex", "fricative", False), "ʐ": ("retroflex", "fricative", True),
    "ç": ("palatal", "fricative", False), "ʝ": ("palatal", "fricative", True),
    "x": ("velar", "fricative", False), "ɣ": ("velar", "fricative", True),
    "χ": ("uvular", "fricative", False), "ʁ": ("uvular", "fricative", True),
    "ħ": ("pharyngeal", "fricative", False), "ʕ": ("pharyngeal", "fricative", True),
    "h": ("glottal", "fricative", False), "ɦ": ("glottal", "fricative", True),
    "t͡s": ("alveolar", "affricate", False), "t͡ʃ": ("postalveolar", "affricate", False),
    "d͡ʒ": ("postalveolar", "affricate", True), "p͡f": ("labiodental", "affricate", False),
    "ʋ": ("labiodental", "approximant", True), "ɹ": ("alveolar", "approximant", True),
    "ɻ": ("retroflex", "approximant", True), "j": ("palatal", "approximant", True),
    "ɰ": ("velar", "approximant", True), "w": ("labial_velar", "approximant", True),
    "l": ("alveolar", "lateral_approximant", True), "ɭ": ("retroflex", "lateral_approximant", True),
    "ʎ": ("palatal", "lateral_approximant", True), "ʟ": ("velar", "lateral_approximant", True),
    "ɬ": ("alveolar", "lateral_fricative", False), "ɮ": ("alveolar", "lateral_fricative", True),
}

LONG_CONSONANTS = ["tː", "sː", "nː", "lː"]  # geminates

STRIDENT = {"f", "v", "s", "z", "ʃ", "ʒ", "ʂ", "ʐ", "t͡s", "t͡ʃ", "d͡ʒ", "p͡f", "sː"}


def f(**kv):
    base = {k: 0 for k in TERNARY}
    base.update(kv)
    return base


def vowel_ternary(front, open_, rounded, tense, nasal=False, long_=False):
    t = f(syl=1, son=1, cons=-1, cont=1, delrel=-1, lat=-1, strid=-1,
          voi=1, sg=-1, cg=-1, ant=-1, cor=-1, distr=-1, velaric=-1)
    t["nas"] = 1 if nasal else -1
    t["lab"] = 1 if rounded else -1
    t["round"] = 1 if rounded else -1
    t["hi"] = 1 if open_ in ("close", "near_close") else -1
    t["lo"] = 1 if open_ in ("near_open", "open") else -1
    t["back"] = {"front": -1, "central": 0, "back": 1}[front]
    t["tense"] = tense
    t["long"] = 1 if long_ else -1
    return t


PLACE_TERNARY = {
    # place -> (ant, cor, distr, lab, hi, lo, back)
    "bilabial":     (1, -1, 0, 1, -1, -1, -1),
    "labiodental":  (1, -1, 0, 1, -1, -1, -1),
    "dental":       (1, 1, 1, -1, -1, -1, -1),
    "alveolar":     (1, 1, -1, -1, -1, -1, -1),
    "postalveolar": (-1, 1, 1, -1, -1, -1, -1),
    "retroflex":    (-1, 1, -1, -1, -1, -1, -1),
    "palatal":      (-1, -1, 0, -1, 1, -1, -1),
    "velar":        (-1, -1, 0, -1, 1, -1, 1),
    "uvular":       (-1, -1, 0, -1, -1, -1, 1),
    "pharyngeal":   (-1, -1, 0, -1, -1, 1, 1),
    "glottal":      (-1, -1, 0, -1, -1, -1, -1),
    "labial_velar": (1, -1, 0, 1, 1, -1, 1),
}

MANNER_TERNARY = {
    # manner -> (son, cons, cont, delrel, lat, nas)
    "plosive":             (-1, 1, -1, -1, -1, -1),
    "nasal":               (1, 1, -1, -1, -1, 1),
    "trill":               (1, 1, 1, -1, -1, -1),
    "tap":                 (1, 1, 1, -1, -1, -1),
    "fricative":           (-1, 1, 1, -1, -1, -1),
    "affricate":           (-1, 1, -1, 1, -1, -1),
    "approximant":         (1, -1, 1, -1, -1, -1),
    "lateral_approximant": (1, 1, -1, -1, 1, -1),
    "lateral_fricative":   (-1, 1, 1, -1, 1, -1),
}


def consonant_ternary(sym, place, manner, voiced, long_=False):
    son, cons, cont, delrel, lat, nas = MANNER_TERNARY[manner]
    ant, cor, distr, lab, hi, lo, back = PLACE_TERNARY[place]
    t = f(syl=-1, son=son, cons=cons, cont=cont, delrel=delrel, lat=lat, nas=nas,
          ant=ant, cor=cor, distr=distr, lab=lab, hi=hi, lo=lo, back=back,
          velaric=-1, tense=0)
    t["strid"] = 1 if sym in STRIDENT else -1
    t["voi"] = 1 if voiced else -1
    t["sg"] = 1 if sym in ("h", "ɦ") else -1
    t["cg"] = 1 if sym == "ʔ" else -1
    # Glottals and glides are placeless/vocalic enough to drop [cons].
    if sym in ("h", "ɦ"):
        t["cons"] = -1
    t["round"] = 1 if place == "labial_velar" else -1
    t["long"] = 1 if long_ else -1
    return t


def onehot(**active):
    cols = []
    for group, values in GROUPS:
        chosen = active.get(group)
        for v in values:
            cols.append(1 if v == chosen else 0)
    return cols


def vowel_row(sym, base, nasal=False, long_=False):
    front, open_, rounded, tense = VOWELS[base]
    tern = vowel_ternary(front, open_, rounded, tense, nasal=nasal, long_=long_)
    oh = onehot(**{"class": "vowel", "vfront": front, "vopen": open_,
                   "vround": "rounded" if rounded else "unrounded",
                   "voicing": "voiced", "length": "long" if long_ else "short"})
    return sym, tern, oh


def consonant_row(sym, base, long_=False):
    place, manner, voiced = CONSONANTS[base]
    tern = consonant_ternary(base, place, manner, voiced, long_=long_)
    oh = onehot(**{"class": "consonant", "place": place, "manner": manner,
                   "voicing": "voiced" if voiced else "voiceless",
                   "length": "long" if long_ else "short"})
    return sym, tern, oh


def main(out_path):
    rows = []
    for sym in VOWELS:
        rows.append(vowel_row(sym, sym))
    for sym in LONG_VOWELS:
        rows.append(vowel_row(sym, sym[:-1], long_=True))
    for sym, base in NASAL_VOWELS.items():
        rows.append(vowel_row(sym, base, nasal=True))
    for sym in CONSONANTS:
        rows.append(consonant_row(sym, sym))
    for sym in LONG_CONSONANTS:
        rows.append(consonant_row(sym, sym[:-1], long_=True))
    rows.append(("_", f(), onehot(**{"class": "special"})))

    with open(out_path, "w", encoding="utf-8") as out:
        out.write("# Bundled articulatory feature table. Generated by scripts/gen_feature_table.py.\n")
        header = ["symbol"] + TERNARY + [f"{g}:{v}" for g, vals in GROUPS for v in vals]
        out.write("\t".join(header) + "\n")
        for sym, tern, oh in rows:
            cols = [sym] + [str(tern[k]) for k in TERNARY] + [str(x) for x in oh]
            assert len(cols) == 67, (sym, len(cols))
            out.write("\t".join(cols) + "\n")
    print(f"{len(rows)} segments -> {out_path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/feature_table.tsv")
