"""Shared text utilities: tokenization, stopwords, phrase matching.

One tokenizer serves topic labeling, lexical-novelty ratios and keyword
matching so that every module sees the same token stream.
"""

from __future__ import annotations

import re

# Lowercase words, hyphenated compounds kept whole ("multi-objective" is one token).
_TOKEN_RE = re.compile(r"[a-z0-9]+(?:-[a-z0-9]+)*")

STOPWORDS = frozenset(
    """
    a about above after again against all also am an and any are as at be
    because been before being below between both but by can cannot could did
    do does doing down during each few for from further had has have having
    he her here hers herself him himself his how i if in into is it its
    itself just me more most my myself no nor not now of off on once only or
    other our ours ourselves out over own same she should so some such than
    that the their theirs them themselves then there these they this those
    through to too under until up very was we were what when where which
    while who whom why will with you your yours yourself yourselves
    """.split()
)


def tokenize(text: str, drop_stopwords: bool = True) -> list[str]:
    """Lowercase token list of ``text``.

    Splits on non-alphanumerics but keeps hyphenated compounds intact.
    Stopword filtering is on by default (topic labeling, type-token ratios);
    phrase matching passes ``drop_stopwords=False`` to preserve contiguity.
    """
    tokens = _TOKEN_RE.findall(text.lower())
    if drop_stopwords:
        return [t for t in tokens if t not in STOPWORDS]
    return tokens


def contains_phrase(tokens: list[str], phrase_tokens: list[str]) -> bool:
    """True when ``phrase_tokens`` occurs contiguously inside ``tokens``."""
    if not phrase_tokens:
        return False
    n, m = len(tokens), len(phrase_tokens)
    first = phrase_tokens[0]
    for i in range(n - m + 1):
        if tokens[i] == first and tokens[i : i + m] == phrase_tokens:
            return True
    return False
