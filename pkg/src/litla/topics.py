"""Topic pipeline: density clustering over embeddings, class-based TF-IDF
labels, hierarchical topic tree, boolean-query multi-labeling, temporal
trends, emerging-topic ranking and the thresholded theme-linkage matrix.
"""

from __future__ import annotations

import math
import re
import warnings
from collections import Counter, deque
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .stats import YearSeries
from .textutil import contains_phrase, tokenize

NOISE = -1


@dataclass
class TopicAssignment:
    labels: dict[str, int]             # paper id -> topic id, -1 = outlier
    topic_sizes: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.topic_sizes:
            sizes = Counter(l for l in self.labels.values() if l != NOISE)
            self.topic_sizes = dict(sorted(sizes.items()))

    def n_topics(self) -> int:
        return len(self.topic_sizes)

    def members(self, topic: int) -> list[str]:
        return sorted(pid for pid, l in self.labels.items() if l == topic)


@dataclass
class TopicSummary:
    topic: int
    top_terms: list[tuple[str, float]]
    size: int


@dataclass
class LinkageMatrix:
    themes: list[str]
    weights: list[list[float]]
    epsilon: float

    def row_shares(self) -> list[list[float]]:
        shares = []
        for row in self.weights:
            total = sum(row)
            shares.append([w / total if total else 0.0 for w in row])
        return shares


# --- density clustering --------------------------------------------------------


def dbscan_labels(points: np.ndarray, eps: float, min_pts: int) -> list[int]:
    """Classical DBSCAN with Euclidean distance.

    A point's eps-neighborhood includes the point itself; core points have
    at least ``min_pts`` neighbors. Cluster ids are assigned 0..k-1 in
    order of descending cluster size (size ties broken by the smallest
    member index), noise is -1. Deterministic for a fixed input.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if min_pts < 2:
        raise ValueError("min_pts must be at least 2")
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if n == 0:
        return []
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    within = d2 <= eps * eps
    neighbor_lists = [np.flatnonzero(within[i]) for i in range(n)]
    is_core = np.array([len(nb) >= min_pts for nb in neighbor_lists])

    labels: list[int | None] = [None] * n
    cluster = 0
    for seed in range(n):
        if labels[seed] is not None or not is_core[seed]:
            continue
        labels[seed] = cluster
        queue = deque([seed])
        while queue:
            i = queue.popleft()
            if not is_core[i]:
                continue  # border points join but never expand
            for j in neighbor_lists[i]:
                if labels[j] is None:
                    labels[j] = cluster
                    queue.append(j)
        cluster += 1
    for i in range(n):
        if labels[i] is None:
            labels[i] = NOISE

    sizes = Counter(l for l in labels if l != NOISE)
    first_member = {}
    for i, l in enumerate(labels):
        if l != NOISE and l not in first_member:
            first_member[l] = i
    order = sorted(sizes, key=lambda l: (-sizes[l], first_member[l]))
    remap = {old: new for new, old in enumerate(order)}
    return [remap[l] if l != NOISE else NOISE for l in labels]


def cluster_embeddings(embeddings, eps: float, min_pts: int,
                       ids: list[str] | None = None) -> TopicAssignment:
    """Density clustering of paper embeddings into size-ranked topics."""
    emb = np.asarray(embeddings, dtype=float)
    if emb.size == 0:
        return TopicAssignment(labels={}, topic_sizes={})
    if emb.ndim != 2:
        raise ValueError("embeddings must be a 2-D matrix")
    labels = dbscan_labels(emb, eps, min_pts)
    if ids is None:
        ids = [str(i) for i in range(len(labels))]
    if len(ids) != len(labels):
        raise ValueError("ids and embeddings length mismatch")
    return TopicAssignment(labels=dict(zip(ids, labels)))


# --- class-based TF-IDF ---------------------------------------------------------


def ctfidf(docs_by_topic: dict[int, list[str]], top_n: int = 10) -> list[TopicSummary]:
    """Class-based TF-IDF summaries.

    score(t, c) = tf(t, c) * log(1 + A / f(t)) with tf the within-class
    frequency normalized by the class token total, f(t) the term's total
    frequency across classes and A the average tokens per class.
    """
    if not docs_by_topic:
        raise ValueError("at least one topic required")
    class_counts = {c: Counter(toks) for c, toks in docs_by_topic.items()}
    class_totals = {c: sum(cnt.values()) for c, cnt in class_counts.items()}
    global_counts: Counter[str] = Counter()
    for cnt in class_counts.values():
        global_counts.update(cnt)
    avg_tokens = sum(class_totals.values()) / len(docs_by_topic)

    summaries = []
    for c in sorted(docs_by_topic):
        total = class_totals[c]
        if total == 0:
            summaries.append(TopicSummary(topic=c, top_terms=[], size=0))
            continue
        scored = []
        for term, count in class_counts[c].items():
            tf = count / total
            score = tf * math.log(1.0 + avg_tokens / global_counts[term])
            scored.append((term, score))
        scored.sort(key=lambda ts: (-ts[1], ts[0]))
        summaries.append(TopicSummary(topic=c, top_terms=scored[:top_n], size=total))
    return summaries


def topic_token_pools(assignment: TopicAssignment,
                      texts: dict[str, str]) -> dict[int, list[str]]:
    """Concatenated stopword-filtered tokens per topic (outliers dropped)."""
    pools: dict[int, list[str]] = {t: [] for t in assignment.topic_sizes}
    for pid, label in sorted(assignment.labels.items()):
        if label == NOISE:
            continue
        pools[label].extend(tokenize(texts[pid]))
    return pools


# --- hierarchical topic tree ----------------------------------------------------


def hierarchical_topics(centroids) -> list[tuple[int, int, float, int]]:
    """Agglomerative average-linkage merge list over topic centroids.

    Returns scipy-style rows (left, right, height, size): leaves are
    0..n-1, merge i creates cluster n+i. Distances are Euclidean and the
    average-linkage update follows Lance-Williams, so merge heights are
    non-decreasing. A single centroid yields an empty merge list.
    """
    pts = np.asarray(centroids, dtype=float)
    n = len(pts)
    if n == 0:
        raise ValueError("at least one centroid required")
    if n == 1:
        return []
    dist = {}
    for i in range(n):
        for j in range(i + 1, n):
            dist[(i, j)] = float(np.linalg.norm(pts[i] - pts[j]))
    sizes = {i: 1 for i in range(n)}
    active = set(range(n))
    merges = []
    next_id = n
    while len(active) > 1:
        (i, j) = min(((a, b) for a in active for b in active if a < b),
                     key=lambda p: (dist[p], p))
        h = dist[(i, j)]
        size = sizes[i] + sizes[j]
        merges.append((i, j, h, size))
        active -= {i, j}
        for k in sorted(active):
            # average linkage: d(k, i+j) = (n_i d(k,i) + n_j d(k,j)) / (n_i + n_j)
            dki = dist[tuple(sorted((k, i)))]
            dkj = dist[tuple(sorted((k, j)))]
            dist[(k, next_id)] = (sizes[i] * dki + sizes[j] * dkj) / size
        sizes[next_id] = size
        active.add(next_id)
        next_id += 1
    return merges


def dendrogram_json(merges: list[tuple[int, int, float, int]],
                    leaf_names: list[str]) -> dict:
    """Nested {name|children, height} tree from a merge list."""
    n = len(leaf_names)
    nodes: dict[int, dict] = {
        i: {"name": leaf_names[i], "height": 0.0} for i in range(n)
    }
    for idx, (a, b, h, _size) in enumerate(merges):
        nodes[n + idx] = {"height": h, "children": [nodes[a], nodes[b]]}
    return nodes[n + len(merges) - 1] if merges else nodes[0]


# --- boolean keyword queries ----------------------------------------------------


class QueryError(ValueError):
    pass


_QUERY_TOKEN_RE = re.compile(r'\s*(?:(\()|(\))|"([^"]*)"|(AND\b|OR\b|NOT\b)|([^\s()"]+))')


def _lex_query(expr: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(expr):
        m = _QUERY_TOKEN_RE.match(expr, pos)
        if not m or m.end() == pos:
            if expr[pos:].strip():
                raise QueryError(f"cannot tokenize query at {expr[pos:]!r}")
            break
        lparen, rparen, phrase, op, word = m.groups()
        if lparen:
            tokens.append(("LPAREN", "("))
        elif rparen:
            tokens.append(("RPAREN", ")"))
        elif phrase is not None:
            tokens.append(("PHRASE", phrase))
        elif op:
            tokens.append((op, op))
        else:
            tokens.append(("WORD", word))
        pos = m.end()
    return tokens


class _QueryParser:
    """Recursive descent over: or := and (OR and)*; and := unary (AND unary)*;
    unary := NOT unary | '(' or ')' | phrase | word."""

    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def take(self, kind):
        if self.peek() != kind:
            raise QueryError(f"expected {kind}, found {self.peek()}")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self):
        node = self.parse_or()
        if self.pos != len(self.tokens):
            raise QueryError(f"trailing tokens after expression: {self.tokens[self.pos:]}")
        return node

    def parse_or(self):
        node = self.parse_and()
        while self.peek() == "OR":
            self.take("OR")
            node = ("or", node, self.parse_and())
        return node

    def parse_and(self):
        node = self.parse_unary()
        while self.peek() == "AND":
            self.take("AND")
            node = ("and", node, self.parse_unary())
        return node

    def parse_unary(self):
        kind = self.peek()
        if kind == "NOT":
            self.take("NOT")
            return ("not", self.parse_unary())
        if kind == "LPAREN":
            self.take("LPAREN")
            node = self.parse_or()
            self.take("RPAREN")
            return node
        if kind == "PHRASE":
            return ("phrase", tokenize(self.take("PHRASE")[1], drop_stopwords=False))
        if kind == "WORD":
            return ("phrase", tokenize(self.take("WORD")[1], drop_stopwords=False))
        raise QueryError(f"unexpected token {kind}")


def parse_query(expr: str):
    tokens = _lex_query(expr)
    if not tokens:
        raise QueryError("empty query")
    return _QueryParser(tokens).parse()


def _eval_query(node, tokens: list[str], token_set: set[str]) -> bool:
    op = node[0]
    if op == "phrase":
        phrase = node[1]
        if not phrase:
            return False
        if len(phrase) == 1:
            return phrase[0] in token_set
        return contains_phrase(tokens, phrase)
    if op == "and":
        return _eval_query(node[1], tokens, token_set) and _eval_query(node[2], tokens, token_set)
    if op == "or":
        return _eval_query(node[1], tokens, token_set) or _eval_query(node[2], tokens, token_set)
    if op == "not":
        return not _eval_query(node[1], tokens, token_set)
    raise QueryError(f"unknown node {op}")


def assign_by_query(queries: dict[str, str], docs: dict[str, str]) -> dict[str, set[str]]:
    """Multi-label assignment: paper -> set of topic names whose boolean
    expression matches the lowercased title+abstract token sequence."""
    compiled = {}
    for name, expr in queries.items():
        try:
            compiled[name] = parse_query(expr)
        except QueryError as exc:
            raise QueryError(f"query {name!r}: {exc}") from exc
    result: dict[str, set[str]] = {}
    for pid, text in docs.items():
        tokens = tokenize(text, drop_stopwords=False)
        token_set = set(tokens)
        result[pid] = {name for name, node in compiled.items()
                       if _eval_query(node, tokens, token_set)}
    return result


def load_queries(path) -> dict[str, str]:
    """Read one `topic_name: expression` per line; # starts a comment line."""
    queries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if ":" not in line:
                raise QueryError(f"{path}:{lineno}: expected 'name: expression'")
            name, expr = line.split(":", 1)
            name = name.strip()
            if not name or name in queries:
                raise QueryError(f"{path}:{lineno}: missing or duplicate topic name")
            queries[name] = expr.strip()
    return queries


# --- temporal trends ------------------------------------------------------------


def _as_label_sets(labels) -> dict[str, set]:
    out = {}
    for pid, val in labels.items():
        if isinstance(val, (set, frozenset)):
            out[pid] = set(val)
        else:
            out[pid] = set() if val == NOISE else {val}
    return out


def topic_trend(labels: dict, years: dict[str, int], mode: str = "count"
                ) -> dict[object, YearSeries]:
    """Per-topic yearly series from single-label or multi-label assignments.

    count: papers per topic per year (a paper in several topics counts once
    in each). share: topic count divided by the number of labeled papers
    that year. Outliers (-1 / empty label sets) never count as labeled.
    """
    if mode not in ("count", "share"):
        raise ValueError("mode must be 'count' or 'share'")
    label_sets = _as_label_sets(labels)
    if not years:
        return {}
    lo, hi = min(years.values()), max(years.values())
    span = list(range(lo, hi + 1))
    topics = sorted({t for s in label_sets.values() for t in s}, key=str)
    per_topic = {t: Counter() for t in topics}
    labeled_per_year: Counter[int] = Counter()
    for pid, topic_set in label_sets.items():
        if not topic_set or pid not in years:
            continue
        y = years[pid]
        labeled_per_year[y] += 1
        for t in topic_set:
            per_topic[t][y] += 1
    out = {}
    for t in topics:
        if mode == "count":
            vals = [float(per_topic[t].get(y, 0)) for y in span]
        else:
            vals = [per_topic[t].get(y, 0) / labeled_per_year[y]
                    if labeled_per_year.get(y) else 0.0 for y in span]
        out[t] = YearSeries(span, vals)
    return out


def emerging_topics(trends: dict[object, YearSeries], since_year: int, k: int
                    ) -> list[tuple[object, float]]:
    """Topics ranked by normalized growth: least-squares slope of yearly
    counts over [since_year, latest] divided by the window mean. Ties are
    broken by the larger latest-year count; all-zero topics are excluded."""
    latest = max((s.years[-1] for s in trends.values() if s.years), default=None)
    if latest is None or latest < since_year:
        return []
    ranked = []
    for topic in sorted(trends, key=str):
        series = trends[topic]
        window = [(y, v) for y, v in zip(series.years, series.values)
                  if since_year <= y <= latest]
        if not window or all(v == 0 for _y, v in window):
            continue
        ys = np.array([y for y, _ in window], dtype=float)
        vs = np.array([v for _, v in window], dtype=float)
        if len(window) > 1:
            # closed-form OLS slope; exact 0 for constant series
            yc = ys - ys.mean()
            slope = float(np.dot(yc, vs - vs.mean()) / np.dot(yc, yc))
        else:
            slope = 0.0
        rate = slope / float(vs.mean())
        ranked.append((topic, rate, window[-1][1]))
    ranked.sort(key=lambda r: (-r[1], -r[2], str(r[0])))
    return [(topic, rate) for topic, rate, _latest in ranked[:k]]


# --- theme linkage ---------------------------------------------------------------


def topic_linkage(theme_keywords: dict[str, list[str]], abstracts: dict[str, str],
                  epsilon: float) -> LinkageMatrix:
    """Theme co-mention matrix over paper abstracts with two-sided epsilon
    thresholding.

    weight(i, j) counts papers matching at least one keyword of theme i and
    one of theme j; an entry is zeroed only when its share falls below
    epsilon in both row normalizations. The result stays symmetric with a
    zero diagonal.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    themes = []
    phrase_sets = []
    for name, kws in theme_keywords.items():
        phrases = [tokenize(k, drop_stopwords=False) for k in kws if k.strip()]
        phrases = [p for p in phrases if p]
        if not phrases:
            warnings.warn(f"theme {name!r} has no usable keywords; dropped")
            continue
        themes.append(name)
        phrase_sets.append(phrases)
    k = len(themes)
    weights = np.zeros((k, k))
    for pid in sorted(abstracts):
        tokens = tokenize(abstracts[pid], drop_stopwords=False)
        hits = [i for i, phrases in enumerate(phrase_sets)
                if any(contains_phrase(tokens, p) for p in phrases)]
        for a, b in combinations(hits, 2):
            weights[a, b] += 1
            weights[b, a] += 1
    row_sums = weights.sum(axis=1)
    keep = np.zeros_like(weights, dtype=bool)
    for i in range(k):
        for j in range(k):
            if i == j or weights[i, j] == 0:
                continue
            share_i = weights[i, j] / row_sums[i] if row_sums[i] else 0.0
            share_j = weights[i, j] / row_sums[j] if row_sums[j] else 0.0
            keep[i, j] = share_i >= epsilon or share_j >= epsilon
    out = np.where(keep, weights, 0.0)
    return LinkageMatrix(themes=themes, weights=out.tolist(), epsilon=epsilon)
