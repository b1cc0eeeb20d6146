import numpy as np
import pytest

from latfuse import (
    EPS,
    AlignmentResult,
    NoCompletePathError,
    SWParams,
    SymbolSequence,
    WordGraph,
    align_seq_to_lattice,
    dtw_align,
    edit_distance,
    edit_distance_many,
    normalized_char_ed,
    smith_waterman,
    subnetwork_distance,
)
from latfuse.align import edit_distance_matrix
from latgen import random_cn, random_wg
from oracles import dfs_paths, dtw_min_cost, simple_ed, sw_best_score

RNG_TOKENS = ("a", "b", "c", "d")


def rand_seq(rng, max_len=8):
    return tuple(rng.choice(RNG_TOKENS, size=rng.integers(0, max_len + 1)))


class TestEditDistance:
    @pytest.mark.parametrize(
        "a, b, want",
        [
            (("a", "b", "c"), ("a", "b", "c"), 0),
            (("a", "b", "c"), ("a", "x", "c"), 1),
            ((), ("a", "b"), 2),
            (("a", "b"), (), 2),
            ((), (), 0),
        ],
    )
    def test_cases(self, a, b, want):
        assert edit_distance(a, b) == want

    def test_symmetry_and_oracle(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            a, b = rand_seq(rng), rand_seq(rng)
            assert edit_distance(a, b) == edit_distance(b, a) == simple_ed(a, b)

    def test_triangle_and_identity(self):
        rng = np.random.default_rng(32)
        for _ in range(100):
            a, b, c = rand_seq(rng), rand_seq(rng), rand_seq(rng)
            assert edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c)
            assert (edit_distance(a, b) == 0) == (a == b)

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(33)
        for _ in range(50):
            cands = [rand_seq(rng) for _ in range(int(rng.integers(1, 5)))]
            refs = [rand_seq(rng) for _ in range(int(rng.integers(1, 5)))]
            mat = edit_distance_matrix(cands, refs)
            for i, c in enumerate(cands):
                for j, r in enumerate(refs):
                    assert mat[i, j] == edit_distance(c, r)

    def test_many_vector(self):
        refs = [("a",), ("a", "b"), ()]
        got = edit_distance_many(("a", "b"), refs)
        assert list(got) == [1, 0, 2]

    def test_accepts_symbol_sequences(self):
        a = SymbolSequence(("a", "b"))
        assert edit_distance(a, ("a", "c")) == 1


class TestNormalizedCharEd:
    def test_identical(self):
        assert normalized_char_ed("note-B4_eighth", "note-B4_eighth") == 0.0

    def test_eps_rules(self):
        assert normalized_char_ed(EPS, EPS) == 0.0
        assert normalized_char_ed(EPS, "clef-G2") == 1.0
        assert normalized_char_ed("clef-G2", EPS) == 1.0

    def test_duration_change(self):
        # suffixes differ by ED("quarter", "half") over the longer length 15
        a, b = "note-C4_quarter", "note-C4_half"
        char_oracle = simple_ed(a, b)
        assert char_oracle == 6
        assert normalized_char_ed(a, b) == char_oracle / 15
        assert max(len(a), len(b)) == 15

    def test_range_and_symmetry(self):
        rng = np.random.default_rng(34)
        toks = ["abc", "abd", "xyz", "a", "zzzz", "ab"]
        for _ in range(50):
            a, b = rng.choice(toks), rng.choice(toks)
            d = normalized_char_ed(a, b)
            assert 0.0 <= d <= 1.0
            assert d == normalized_char_ed(b, a)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            normalized_char_ed("", "a")


class TestSeqToLattice:
    def test_exact_path_costs_zero(self):
        rng = np.random.default_rng(35)
        for _ in range(20):
            wg = random_wg(rng)
            _, labels, _ = dfs_paths(wg)[0]
            path, cost = align_seq_to_lattice(SymbolSequence(labels), wg)
            assert cost == 0
            assert path.labels == labels

    def test_single_path_lattice(self):
        wg = WordGraph(
            4, 0, {3}, [(0, 1, "a", 0.9), (1, 2, "b", 0.8), (2, 3, "c", 0.7)]
        )
        seq = SymbolSequence(("a", "x", "c"))
        path, cost = align_seq_to_lattice(seq, wg)
        assert path.labels == ("a", "b", "c")
        assert path.scores == (0.9, 0.8, 0.7)
        assert cost == edit_distance(path, seq) == 1

    def test_matches_exhaustive_oracle(self):
        from oracles import nearest_path_by_enumeration

        rng = np.random.default_rng(36)
        for _ in range(50):
            wg = random_wg(rng)
            seq = rand_seq(rng, max_len=6)
            path, cost = align_seq_to_lattice(SymbolSequence(seq), wg)
            _, labels, _ = nearest_path_by_enumeration(wg, seq)
            assert path.labels == labels
            assert cost == simple_ed(labels, seq)

    def test_cost_bounded_by_best_path(self):
        from latfuse import best_path

        rng = np.random.default_rng(37)
        for _ in range(30):
            wg = random_wg(rng)
            seq = rand_seq(rng)
            _, cost = align_seq_to_lattice(SymbolSequence(seq), wg)
            bp, _ = best_path(wg)
            assert cost <= edit_distance(bp, seq)

    def test_no_path(self):
        wg = WordGraph(3, 0, {2}, [(0, 1, "a", 0.5)])
        with pytest.raises(NoCompletePathError):
            align_seq_to_lattice(SymbolSequence(("a",)), wg)


class TestDtw:
    def test_identical_cns_diagonal(self):
        rng = np.random.default_rng(38)
        for _ in range(10):
            cn = random_cn(rng, max_len=6)
            path, _cost = dtw_align(cn, cn)
            assert path == [(i, i) for i in range(len(cn))]

    def test_label_identical_single_label_cost_zero(self):
        from latfuse import ConfusionNetwork

        a = ConfusionNetwork([{"x": 1.0}, {"y": 1.0}])
        b = ConfusionNetwork([{"x": 1.0}, {"y": 1.0}])
        _, cost = dtw_align(a, b)
        assert cost == 0.0

    def test_length_one_vs_three(self):
        from latfuse import ConfusionNetwork

        a = ConfusionNetwork([{"x": 1.0}])
        b = ConfusionNetwork([{"x": 1.0}, {"y": 1.0}, {"z": 1.0}])
        path, _ = dtw_align(a, b)
        diag = sum(
            1
            for (i0, j0), (i1, j1) in zip(path, path[1:])
            if (i1 - i0, j1 - j0) == (1, 1)
        )
        assert len(path) - 1 - diag == 2
        assert path[0] == (0, 0) and path[-1] == (0, 2)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(39)
        for _ in range(30):
            a = random_cn(rng, max_len=8)
            b = random_cn(rng, max_len=8)
            local = [
                [subnetwork_distance(sa, sb) for sb in b.subnetworks]
                for sa in a.subnetworks
            ]
            _, cost = dtw_align(a, b)
            assert abs(cost - dtw_min_cost(local)) < 1e-9

    def test_monotone_continuous(self):
        rng = np.random.default_rng(40)
        for _ in range(20):
            a, b = random_cn(rng), random_cn(rng)
            path, _ = dtw_align(a, b)
            for (i0, j0), (i1, j1) in zip(path, path[1:]):
                assert (i1 - i0, j1 - j0) in ((1, 1), (1, 0), (0, 1))

    def test_empty_cn(self):
        from latfuse import ConfusionNetwork

        with pytest.raises(ValueError):
            dtw_align(ConfusionNetwork(()), ConfusionNetwork([{"a": 1.0}]))

    def test_custom_cost_fn(self):
        from latfuse import ConfusionNetwork

        a = ConfusionNetwork([{"x": 1.0}, {"y": 1.0}])
        b = ConfusionNetwork([{"p": 1.0}, {"q": 1.0}, {"r": 1.0}])
        calls = []

        def cost(sa, sb):
            calls.append((tuple(sa), tuple(sb)))
            return 1.0

        path, cost_total = dtw_align(a, b, cost)
        assert cost_total == 3.0
        assert calls


class TestSmithWaterman:
    def test_identical_full_alignment(self):
        seq = ("a", "b", "c", "d")
        res = smith_waterman(seq, seq)
        assert res.score == len(seq) * 2.0
        assert res.aligned_a == seq
        assert res.aligned_b == seq
        assert res.a_indices == (0, 1, 2, 3)

    def test_disjoint_vocabularies_empty(self):
        res = smith_waterman(("a", "b"), ("x", "y"))
        assert res.score == 0.0
        assert res.aligned_a == () and res.aligned_b == ()

    def test_hand_filled_matrix(self):
        # match 2 / mismatch -1 / gap -2: the shared "b c d" block scores 6
        res = smith_waterman(
            ("a", "b", "c", "d", "e"),
            ("x", "b", "c", "d", "y"),
            SWParams(2.0, -1.0, -2.0),
        )
        assert res.score == 6.0
        assert res.aligned_a == ("b", "c", "d")
        assert res.aligned_b == ("b", "c", "d")

    def test_score_matches_substring_oracle(self):
        rng = np.random.default_rng(41)
        params = SWParams(2.0, -1.0, -2.0)
        for _ in range(50):
            a = rand_seq(rng, max_len=7)
            b = rand_seq(rng, max_len=7)
            res = smith_waterman(a, b, params)
            want = sw_best_score(a, b, 2.0, -1.0, -2.0)
            assert abs(res.score - want) < 1e-9

    def test_invariants(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            a, b = rand_seq(rng), rand_seq(rng)
            res = smith_waterman(a, b)
            assert res.score >= 0.0
            assert len(res.aligned_a) == len(res.aligned_b)
            kept_a = [x for x in res.aligned_a if x is not None]
            kept_b = [x for x in res.aligned_b if x is not None]
            idx_a = [i for i in res.a_indices if i is not None]
            idx_b = [j for j in res.b_indices if j is not None]
            if idx_a:
                lo, hi = idx_a[0], idx_a[-1]
                assert tuple(kept_a) == tuple(a[lo:hi + 1])
                assert idx_a == list(range(lo, hi + 1))
            if idx_b:
                lo, hi = idx_b[0], idx_b[-1]
                assert tuple(kept_b) == tuple(b[lo:hi + 1])

    def test_gap_spanning_alignment_preferred_on_ties(self):
        # "a b" scores 4 and so does "a b - d" / "a b c d"; the later cell
        # wins, so the gap is part of the alignment
        res = smith_waterman(("a", "b", "d"), ("a", "b", "c", "d"))
        assert res.aligned_a == ("a", "b", None, "d")
        assert res.aligned_b == ("a", "b", "c", "d")

    def test_params_validation(self):
        with pytest.raises(ValueError):
            SWParams(match_score=0.0)
        with pytest.raises(ValueError):
            SWParams(mismatch_penalty=0.5)
        with pytest.raises(ValueError):
            SWParams(gap_penalty=1.0)

    def test_alignment_result_validation(self):
        with pytest.raises(ValueError):
            AlignmentResult(("a",), (), 1.0, (0,), ())
