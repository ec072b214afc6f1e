import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from litla.stats import YearSeries
from litla.textutil import contains_phrase, tokenize
from litla.topics import (
    NOISE,
    QueryError,
    assign_by_query,
    cluster_embeddings,
    ctfidf,
    dbscan_labels,
    dendrogram_json,
    emerging_topics,
    hierarchical_topics,
    parse_query,
    topic_linkage,
    topic_trend,
)


def blob(rng, center, n, sigma=0.3):
    return [[rng.gauss(c, sigma) for c in center] for _ in range(n)]


class TestDbscan:
    def test_two_separated_blobs(self):
        import random
        rng = random.Random(1)
        pts = blob(rng, [0.0, 0.0], 20, 0.2) + blob(rng, [10.0, 0.0], 15, 0.2)
        labels = dbscan_labels(np.array(pts), eps=1.0, min_pts=3)
        assert NOISE not in labels
        assert set(labels[:20]) == {0} and set(labels[20:]) == {1}

    def test_identical_points_single_cluster(self):
        pts = np.zeros((6, 3))
        assert dbscan_labels(pts, eps=0.5, min_pts=2) == [0] * 6

    def test_isolated_point_is_noise(self):
        pts = np.array([[0.0, 0.0]])
        assert dbscan_labels(pts, eps=0.5, min_pts=2) == [NOISE]

    def test_labels_ranked_by_size(self):
        import random
        rng = random.Random(2)
        pts = blob(rng, [0, 0], 5, 0.1) + blob(rng, [50, 0], 12, 0.1)
        labels = dbscan_labels(np.array(pts), eps=1.0, min_pts=3)
        assert set(labels[5:]) == {0}  # larger blob gets id 0
        assert set(labels[:5]) == {1}

    def test_assignment_maps_ids(self):
        assignment = cluster_embeddings([[0.0], [0.1], [9.9]], eps=0.5, min_pts=2,
                                        ids=["a", "b", "c"])
        assert assignment.labels == {"a": 0, "b": 0, "c": NOISE}
        assert assignment.topic_sizes == {0: 2}

    def test_empty_input(self):
        assignment = cluster_embeddings([], eps=0.5, min_pts=2)
        assert assignment.labels == {} and assignment.topic_sizes == {}

    @given(st.integers(0, 10**6))
    def test_order_invariant_up_to_relabeling(self, seed):
        import random
        rng = random.Random(seed)
        pts = blob(rng, [0.0, 0.0], 10, 0.15) + blob(rng, [8.0, 8.0], 7, 0.15) \
            + [[100.0, -100.0]]
        perm = list(range(len(pts)))
        rng.shuffle(perm)
        base = dbscan_labels(np.array(pts), eps=1.0, min_pts=3)
        shuffled = dbscan_labels(np.array([pts[i] for i in perm]), eps=1.0, min_pts=3)
        def clusters(labels, index):
            out = {}
            for pos, lab in enumerate(labels):
                if lab != NOISE:
                    out.setdefault(lab, set()).add(index[pos])
            return {frozenset(v) for v in out.values()}
        assert clusters(base, list(range(len(pts)))) == clusters(shuffled, perm)


class TestCtfidf:
    corpus = {
        0: ["apple", "apple", "banana", "cherry", "apple", "banana"],
        1: ["banana", "banana", "dates", "dates", "cherry", "apple", "fig"],
        2: ["fig", "fig", "grape", "grape", "grape", "cherry", "dates"],
    }

    def test_hand_computed_scores(self):
        # 20 tokens over 3 classes: A = 20/3; f(apple)=4, f(grape)=3, ...
        summaries = {s.topic: dict(s.top_terms) for s in ctfidf(self.corpus)}
        A = 20.0 / 3.0
        assert summaries[0]["apple"] == pytest.approx(
            (3 / 6) * math.log(1 + A / 4), abs=1e-12)
        assert summaries[1]["dates"] == pytest.approx(
            (2 / 7) * math.log(1 + A / 3), abs=1e-12)
        assert summaries[2]["grape"] == pytest.approx(
            (3 / 7) * math.log(1 + A / 3), abs=1e-12)

    def test_class_unique_term_outranks_shared(self):
        docs = {
            0: ["unique", "shared"],
            1: ["shared", "other"],
            2: ["shared", "misc"],
        }
        top = {s.topic: [t for t, _ in s.top_terms] for s in ctfidf(docs)}
        assert top[0].index("unique") < top[0].index("shared")

    def test_identical_classes_identical_scores(self):
        docs = {0: ["a", "b", "b"], 1: ["a", "b", "b"]}
        s0, s1 = ctfidf(docs)
        assert s0.top_terms == [(t, v) for t, v in s1.top_terms]

    def test_duplication_invariance(self):
        base = {c: dict(ctfidf(self.corpus)[i].top_terms)
                for i, c in enumerate(sorted(self.corpus))}
        doubled = {c: toks + toks for c, toks in self.corpus.items()}
        dup = {c: dict(ctfidf(doubled)[i].top_terms)
               for i, c in enumerate(sorted(doubled))}
        for c in base:
            for term, score in base[c].items():
                assert dup[c][term] == pytest.approx(score, abs=1e-12)

    def test_empty_class_empty_terms(self):
        summaries = ctfidf({0: [], 1: ["x"]})
        assert summaries[0].top_terms == []


class TestHierarchy:
    def test_collinear_first_merge_is_nearest_pair(self):
        merges = hierarchical_topics([[0.0], [1.0], [10.0]])
        assert merges[0][:2] == (0, 1)
        assert merges[0][2] == pytest.approx(1.0)

    def test_duplicates_merge_at_zero(self):
        merges = hierarchical_topics([[2.0, 2.0], [2.0, 2.0], [9.0, 9.0]])
        assert merges[0][2] == 0.0

    def test_single_centroid_empty_tree(self):
        assert hierarchical_topics([[1.0, 2.0]]) == []

    def test_heights_non_decreasing(self):
        rng = np.random.default_rng(3)
        pts = rng.standard_normal((12, 4))
        merges = hierarchical_topics(pts)
        heights = [h for _a, _b, h, _s in merges]
        assert all(h2 >= h1 - 1e-12 for h1, h2 in zip(heights, heights[1:]))

    def test_matches_naive_average_linkage_oracle(self):
        rng = np.random.default_rng(11)
        pts = rng.standard_normal((6, 3))
        merges = hierarchical_topics(pts)

        # oracle: recompute mean pairwise distance between member sets each step
        clusters = {i: [i] for i in range(len(pts))}
        next_id = len(pts)
        oracle = []
        while len(clusters) > 1:
            best = None
            for a, b in combinations(sorted(clusters), 2):
                d = float(np.mean([np.linalg.norm(pts[i] - pts[j])
                                   for i in clusters[a] for j in clusters[b]]))
                if best is None or d < best[0] - 1e-12:
                    best = (d, a, b)
            d, a, b = best
            members = clusters.pop(a) + clusters.pop(b)
            clusters[next_id] = members
            oracle.append((a, b, d, len(members)))
            next_id += 1
        for got, exp in zip(merges, oracle):
            assert got[0] == exp[0] and got[1] == exp[1]
            assert got[2] == pytest.approx(exp[2], abs=1e-9)
            assert got[3] == exp[3]

    def test_dendrogram_json_shape(self):
        merges = hierarchical_topics([[0.0], [1.0], [10.0]])
        tree = dendrogram_json(merges, ["T0", "T1", "T2"])
        assert set(tree) == {"height", "children"}
        assert tree["height"] >= tree["children"][0]["height"]


class TestQueries:
    def test_and_phrase_match(self):
        labels = assign_by_query(
            {"t": '"constrained" AND "multi-objective"'},
            {"p": "A constrained multi-objective benchmark"})
        assert labels == {"p": {"t"}}

    def test_not_clause_excludes(self):
        labels = assign_by_query(
            {"t": 'benchmark AND NOT constrained'},
            {"p": "A constrained benchmark"})
        assert labels == {"p": set()}

    def test_phrase_requires_contiguity(self):
        labels = assign_by_query(
            {"t": '"pareto front"'},
            {"a": "the pareto front moves", "b": "pareto approximation of the front"})
        assert labels == {"a": {"t"}, "b": set()}

    def test_parentheses_and_or(self):
        node = parse_query('(alpha OR beta) AND NOT gamma')
        assert node[0] == "and"

    def test_malformed_expression_names_query(self):
        with pytest.raises(QueryError, match="broken"):
            assign_by_query({"broken": '(alpha AND'}, {"p": "alpha"})

    def test_empty_query_rejected(self):
        with pytest.raises(QueryError):
            parse_query("   ")

    def test_matches_naive_predicate_oracle(self, fixture_records):
        docs = {r.id: r.title + " " + r.abstract for r in fixture_records[:50]}
        queries = {
            "q0": '"weight vectors"',
            "q1": 'makespan OR "flow shop"',
            "q2": '"surrogate model" AND NOT kriging',
            "q3": '"pareto front" AND convergence',
            "q4": 'NOT "evolutionary algorithm"',
            "q5": '("vehicle routing" OR "path planning") AND optimization',
            "q6": 'energy AND (storage OR dispatch)',
            "q7": '"feature selection" OR "neural architecture"',
            "q8": 'benchmark AND instances AND NOT industrial',
            "q9": '"constraint handling" OR "penalty functions"',
        }
        got = assign_by_query(queries, docs)

        def has(tokens, phrase):
            return contains_phrase(tokens, tokenize(phrase, drop_stopwords=False))

        oracle_fns = {
            "q0": lambda t: has(t, "weight vectors"),
            "q1": lambda t: has(t, "makespan") or has(t, "flow shop"),
            "q2": lambda t: has(t, "surrogate model") and not has(t, "kriging"),
            "q3": lambda t: has(t, "pareto front") and has(t, "convergence"),
            "q4": lambda t: not has(t, "evolutionary algorithm"),
            "q5": lambda t: (has(t, "vehicle routing") or has(t, "path planning"))
            and has(t, "optimization"),
            "q6": lambda t: has(t, "energy") and (has(t, "storage") or has(t, "dispatch")),
            "q7": lambda t: has(t, "feature selection") or has(t, "neural architecture"),
            "q8": lambda t: has(t, "benchmark") and has(t, "instances")
            and not has(t, "industrial"),
            "q9": lambda t: has(t, "constraint handling") or has(t, "penalty functions"),
        }
        for pid, text in docs.items():
            tokens = tokenize(text, drop_stopwords=False)
            expected = {q for q, fn in oracle_fns.items() if fn(tokens)}
            assert got[pid] == expected, pid


class TestTrends:
    def test_single_topic_share_is_one(self):
        labels = {"a": 0, "b": 0, "c": 0}
        years = {"a": 2010, "b": 2011, "c": 2011}
        trends = topic_trend(labels, years, mode="share")
        assert trends[0].values == [1.0, 1.0]

    def test_multilabel_counts_once_per_topic(self):
        labels = {"a": {"x", "y"}}
        years = {"a": 2015}
        trends = topic_trend(labels, years, mode="count")
        assert trends["x"].values == [1.0]
        assert trends["y"].values == [1.0]

    def test_fixture_matches_groupby_oracle(self, fixture_records):
        sample = fixture_records[:60]
        labels = {r.id: {r.extracted_keywords[0]} for r in sample}
        years = {r.id: r.year for r in sample}
        trends = topic_trend(labels, years, mode="count")
        for topic, series in trends.items():
            for y, v in zip(series.years, series.values):
                expected = sum(1 for r in sample
                               if r.year == y and r.extracted_keywords[0] == topic)
                assert v == float(expected)

    def test_count_sums_bound_labeled_papers(self):
        labels = {"a": {0, 1}, "b": {1}, "c": set()}
        years = {"a": 2010, "b": 2010, "c": 2010}
        trends = topic_trend(labels, years, mode="count")
        total = sum(series.values[0] for series in trends.values())
        assert total == 3.0  # >= 2 labeled papers, multi-label inflates

    def test_outliers_never_labeled(self):
        labels = {"a": NOISE, "b": 0}
        years = {"a": 2010, "b": 2010}
        trends = topic_trend(labels, years, mode="share")
        assert trends[0].values == [1.0]


class TestEmerging:
    def test_exponential_beats_flat(self):
        trends = {
            "exp": YearSeries([2018, 2019, 2020, 2021], [1.0, 2.0, 4.0, 8.0]),
            "flat": YearSeries([2018, 2019, 2020, 2021], [5.0, 5.0, 5.0, 5.0]),
        }
        ranked = emerging_topics(trends, 2018, k=2)
        assert ranked[0][0] == "exp" and ranked[0][1] > 0
        assert ranked[1][1] == pytest.approx(0.0)

    def test_flat_ties_ranked_by_latest_count(self):
        trends = {
            "small": YearSeries([2018, 2019], [2.0, 2.0]),
            "big": YearSeries([2018, 2019], [9.0, 9.0]),
        }
        ranked = emerging_topics(trends, 2018, k=2)
        assert [t for t, _ in ranked] == ["big", "small"]

    def test_absent_topic_excluded(self):
        trends = {
            "zero": YearSeries([2018, 2019], [0.0, 0.0]),
            "live": YearSeries([2018, 2019], [1.0, 2.0]),
        }
        assert [t for t, _ in emerging_topics(trends, 2018, k=5)] == ["live"]

    def test_hand_computed_slopes(self):
        counts = {
            "a": [1.0, 3.0, 5.0],   # slope 2, mean 3 -> 2/3
            "b": [4.0, 4.0, 7.0],   # slope 1.5, mean 5 -> 0.3
        }
        trends = {t: YearSeries([2019, 2020, 2021], v) for t, v in counts.items()}
        ranked = dict(emerging_topics(trends, 2019, k=2))
        assert ranked["a"] == pytest.approx(2.0 / 3.0, abs=1e-12)
        assert ranked["b"] == pytest.approx(1.5 / 5.0, abs=1e-12)


class TestLinkage:
    def test_never_comentioned_is_zero(self):
        matrix = topic_linkage(
            {"a": ["alpha"], "b": ["beta"]},
            {"p1": "alpha only here", "p2": "beta elsewhere"}, epsilon=0.1)
        assert matrix.weights == [[0.0, 0.0], [0.0, 0.0]]

    def test_all_papers_mention_all_themes(self):
        abstracts = {f"p{i}": "alpha beta gamma" for i in range(4)}
        matrix = topic_linkage(
            {"a": ["alpha"], "b": ["beta"], "c": ["gamma"]}, abstracts, epsilon=0.15)
        w = np.array(matrix.weights)
        assert np.all(w[~np.eye(3, dtype=bool)] == 4.0)
        assert np.all(np.diag(w) == 0.0)

    def test_symmetry_and_zero_diagonal(self, fixture_records):
        themes = {
            "sched": ["flow shop", "makespan"],
            "route": ["vehicle routing", "path planning"],
            "energy": ["power dispatch", "renewable energy"],
            "learn": ["feature selection", "reinforcement learning"],
        }
        abstracts = {r.id: r.abstract for r in fixture_records}
        matrix = topic_linkage(themes, abstracts, epsilon=0.15)
        w = np.array(matrix.weights)
        assert np.allclose(w, w.T)
        assert np.all(np.diag(w) == 0.0)

    def test_threshold_against_bruteforce_oracle(self, fixture_records):
        themes = {
            "sched": ["flow shop", "makespan"],
            "route": ["vehicle routing", "path planning"],
            "energy": ["power dispatch", "renewable energy"],
            "learn": ["feature selection", "reinforcement learning"],
        }
        abstracts = {r.id: r.abstract for r in fixture_records}
        eps = 0.15
        matrix = topic_linkage(themes, abstracts, eps)

        names = list(themes)
        hits = {}
        for pid, text in abstracts.items():
            tokens = tokenize(text, drop_stopwords=False)
            hits[pid] = {n for n in names
                         if any(contains_phrase(tokens, tokenize(k, drop_stopwords=False))
                                for k in themes[n])}
        raw = np.zeros((4, 4))
        for pid in abstracts:
            for i, a in enumerate(names):
                for j, b in enumerate(names):
                    if i != j and a in hits[pid] and b in hits[pid]:
                        raw[i, j] += 1
        rows = raw.sum(axis=1)
        expected = raw.copy()
        for i in range(4):
            for j in range(4):
                if i == j or raw[i, j] == 0:
                    continue
                si = raw[i, j] / rows[i] if rows[i] else 0.0
                sj = raw[i, j] / rows[j] if rows[j] else 0.0
                if si < eps and sj < eps:
                    expected[i, j] = 0.0
        assert matrix.themes == names
        assert np.array_equal(np.array(matrix.weights), expected)

    def test_empty_theme_dropped_with_warning(self):
        with pytest.warns(UserWarning, match="empty"):
            matrix = topic_linkage({"empty": [], "ok": ["alpha"]},
                                   {"p": "alpha"}, epsilon=0.1)
        assert matrix.themes == ["ok"]
