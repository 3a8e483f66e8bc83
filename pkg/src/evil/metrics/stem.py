"""Classical suffix-stripping stemmer (Porter's original algorithm).

Used by the unigram-alignment metric's stem-match stage.  The
implementation follows the original five-step rule tables; behavior is
pinned by a frozen word/stem table in the tests.  Input is assumed
lower-case (the shared tokenizer guarantees it).
"""

from __future__ import annotations

_VOWELS = "aeiou"


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Number of vowel->consonant transitions ([C](VC)^m[V] form)."""
    flags = [_is_consonant(stem, i) for i in range(len(stem))]
    return sum(1 for i in range(1, len(flags)) if flags[i] and not flags[i - 1])


def _has_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(stem: str) -> bool:
    return (
        len(stem) >= 2
        and stem[-1] == stem[-2]
        and _is_consonant(stem, len(stem) - 1)
        and _is_consonant(stem, len(stem) - 2)
    )


def _ends_cvc(stem: str) -> bool:
    if len(stem) < 3:
        return False
    return (
        _is_consonant(stem, len(stem) - 3)
        and not _is_consonant(stem, len(stem) - 2)
        and _is_consonant(stem, len(stem) - 1)
        and stem[-1] not in "wxy"
    )


def _apply_longest(word: str, rules) -> str:
    """Fire the longest matching suffix rule; a failed condition still ends the step."""
    for suffix, replacement, condition in sorted(rules, key=lambda r: -len(r[0])):
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if condition is None or condition(stem):
                return stem + replacement
            return word
    return word


_STEP2 = [
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
]

_STEP3 = [
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
]

_STEP4 = [
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
]


def stem(word: str) -> str:
    """Stem one lower-case word."""
    if len(word) <= 2:
        return word

    # step 1a: plurals
    word = _apply_longest(word, [
        ("sses", "ss", None),
        ("ies", "i", None),
        ("ss", "ss", None),
        ("s", "", None),
    ])

    # step 1b: -eed / -ed / -ing
    if word.endswith("eed"):
        if _measure(word[:-3]) > 0:
            word = word[:-1]
    else:
        removed = None
        if word.endswith("ed") and _has_vowel(word[:-2]):
            removed = word = word[:-2]
        elif word.endswith("ing") and _has_vowel(word[:-3]):
            removed = word = word[:-3]
        if removed is not None:
            if word.endswith(("at", "bl", "iz")):
                word += "e"
            elif _ends_double_consonant(word) and word[-1] not in "lsz":
                word = word[:-1]
            elif _measure(word) == 1 and _ends_cvc(word):
                word += "e"

    # step 1c: terminal y after a vowel
    if word.endswith("y") and _has_vowel(word[:-1]):
        word = word[:-1] + "i"

    word = _apply_longest(
        word, [(s, r, lambda stem: _measure(stem) > 0) for s, r in _STEP2]
    )
    word = _apply_longest(
        word, [(s, r, lambda stem: _measure(stem) > 0) for s, r in _STEP3]
    )

    def _step4_condition(suffix):
        if suffix == "ion":
            return lambda stem: _measure(stem) > 1 and stem.endswith(("s", "t"))
        return lambda stem: _measure(stem) > 1

    word = _apply_longest(word, [(s, "", _step4_condition(s)) for s in _STEP4])

    # step 5a: terminal e
    if word.endswith("e"):
        stem_part = word[:-1]
        m = _measure(stem_part)
        if m > 1 or (m == 1 and not _ends_cvc(stem_part)):
            word = stem_part

    # step 5b: -ll reduction
    if word.endswith("ll") and _measure(word) > 1:
        word = word[:-1]

    return word
