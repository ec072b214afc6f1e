"""Descriptive corpus statistics: yearly series, quadratic growth fits and
faceted distributions."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .countries import UNKNOWN
from .graph import NODE_AUTHOR, NODE_PAPER, KnowledgeGraph


@dataclass
class YearSeries:
    years: list[int]
    values: list[float]

    def __post_init__(self):
        if len(self.years) != len(self.values):
            raise ValueError("years and values must have equal length")
        if any(b <= a for a, b in zip(self.years, self.years[1:])):
            raise ValueError("years must be strictly increasing")

    def cumulative(self) -> "YearSeries":
        total = 0.0
        out = []
        for v in self.values:
            total += v
            out.append(total)
        return YearSeries(list(self.years), out)

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.years, self.values))


@dataclass
class QuadFit:
    a: float
    b: float
    c: float
    r_squared: float


def publications_per_year(kg: KnowledgeGraph) -> YearSeries:
    """Paper counts per year, zero-filled across the corpus year range."""
    papers = kg.nodes_of_type(NODE_PAPER)
    if not papers:
        return YearSeries([], [])
    counts = Counter(kg.nodes[ref]["year"] for ref in papers)
    lo, hi = kg.corpus_year_range
    years = list(range(lo, hi + 1))
    return YearSeries(years, [float(counts.get(y, 0)) for y in years])


def authors_per_year(kg: KnowledgeGraph) -> tuple[YearSeries, YearSeries]:
    """(distinct authors publishing each year, cumulative distinct authors).

    Cumulative counts the union of authors seen so far, not the running sum:
    an author active in several years is counted once.
    """
    authors = kg.nodes_of_type(NODE_AUTHOR)
    if not authors:
        return YearSeries([], []), YearSeries([], [])
    by_year: dict[int, set[str]] = {}
    for ref in authors:
        for year, _pid, _country in kg.nodes[ref]["incidences"]:
            by_year.setdefault(year, set()).add(ref.key)
    lo, hi = kg.corpus_year_range
    years = list(range(lo, hi + 1))
    per_year = [float(len(by_year.get(y, ()))) for y in years]
    seen: set[str] = set()
    cumulative = []
    for y in years:
        seen |= by_year.get(y, set())
        cumulative.append(float(len(seen)))
    return YearSeries(years, per_year), YearSeries(years, cumulative)


def fit_quadratic(series: YearSeries) -> QuadFit:
    """OLS quadratic fit y = a*t^2 + b*t + c on years centered at the first
    year (raw calendar years square to ~4e6 and lose conditioning)."""
    if len(series.years) < 4:
        raise ValueError("quadratic fit requires at least 4 points")
    t = np.asarray(series.years, dtype=float)
    t -= t[0]
    y = np.asarray(series.values, dtype=float)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise ValueError("degenerate variance: series is constant")
    coeffs = np.polyfit(t, y, 2)
    resid = y - np.polyval(coeffs, t)
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot
    a, b, c = (float(v) for v in coeffs)
    return QuadFit(a=a, b=b, c=c, r_squared=r2)


FACETS = ("venue", "pub_type", "subject_category", "intent", "country")


def _facet_values(attrs: dict, facet: str) -> list[str]:
    if facet == "venue":
        return [attrs["venue"]] if attrs["venue"] else []
    if facet == "pub_type":
        return [attrs["pub_type"]]
    if facet == "subject_category":
        return sorted(set(attrs["subject_categories"]))
    if facet == "intent":
        return list(attrs["intents"])  # one count per labeled statement
    if facet == "country":
        return sorted(set(attrs["countries"]))
    raise ValueError(f"unknown facet {facet!r}")


def distribution(kg: KnowledgeGraph, facet: str, top_k: int | None = None
                 ) -> list[tuple[str, int, float]]:
    """(label, count, share) rows, count-descending then label-ascending.

    Shares are computed over the full distribution before any top-k
    truncation; multi-valued facets contribute one count per distinct
    (paper, value) pair, intents one count per labeled citation statement.
    """
    counts: Counter[str] = Counter()
    for ref in kg.nodes_of_type(NODE_PAPER):
        counts.update(_facet_values(kg.nodes[ref], facet))
    total = sum(counts.values())
    if total == 0:
        return []
    rows = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    out = [(label, n, n / total) for label, n in rows]
    return out[:top_k] if top_k is not None else out


def author_country_tally(kg: KnowledgeGraph) -> list[tuple[str, int, float]]:
    """Researchers per country, each author assigned their modal country."""
    counts: Counter[str] = Counter()
    for ref in kg.nodes_of_type(NODE_AUTHOR):
        counts[modal_country(kg.nodes[ref]["incidences"])] += 1
    total = sum(counts.values())
    if total == 0:
        return []
    rows = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(label, n, n / total) for label, n in rows]


def modal_country(incidences) -> str:
    """Most frequent known country across incidences; lexicographic ties;
    UNKNOWN when nothing resolved."""
    known = Counter(c for _y, _p, c in incidences if c != UNKNOWN)
    if not known:
        return UNKNOWN
    return min(known, key=lambda c: (-known[c], c))
