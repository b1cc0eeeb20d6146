import math

import numpy as np
import pytest

from latfuse import (
    EPS,
    FusionConfig,
    SymbolSequence,
    WordGraph,
    best_path,
    cn_best_path,
    cn_from_wg,
    combine_cns,
    fuse_global,
    fuse_lightly,
    fuse_local,
    fuse_mbr,
    lattice_hypotheses,
    mbr_decode,
    merge_subnetworks,
    run_fusion,
    strip_eps,
)
from latgen import CLOSE_TOKENS, random_wg
from oracles import dfs_paths, mbr_by_enumeration, nearest_path_by_enumeration


def single_path_wg(labels, score=0.9):
    n = len(labels)
    return WordGraph(
        n + 1, 0, {n}, [(i, i + 1, lab, score) for i, lab in enumerate(labels)]
    )


def three_path_pair():
    wg_i = WordGraph(4, 0, {3}, [
        (0, 1, "a", 0.6), (0, 2, "b", 0.4), (1, 2, "c", 0.5),
        (1, 2, "d", 0.5), (2, 3, "e", 1.0),
    ])
    wg_a = WordGraph(4, 0, {3}, [
        (0, 1, "a", 0.5), (0, 3, "x", 0.5), (1, 2, "c", 1.0),
        (2, 3, "e", 0.8), (2, 3, "f", 0.2),
    ])
    return wg_i, wg_a


class TestFusionConfig:
    def test_alpha_open_interval(self):
        for bad in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                FusionConfig(alpha=bad)

    def test_other_validation(self):
        with pytest.raises(ValueError):
            FusionConfig(method="vote")
        with pytest.raises(ValueError):
            FusionConfig(laplace_lambda=0.0)
        with pytest.raises(ValueError):
            FusionConfig(max_paths=0)


class TestMbr:
    def test_identical_single_paths(self):
        wg = single_path_wg(("p", "q", "r"))
        for alpha in (0.1, 0.5, 0.9):
            assert fuse_mbr(wg, wg, FusionConfig(alpha=alpha)).labels == (
                "p", "q", "r",
            )

    def test_disjoint_single_paths_alpha_dominates(self):
        u = single_path_wg(("u1", "u2"))
        v = single_path_wg(("v1", "v2", "v3"))
        # risk(u) = (1-alpha) ED(u,v) < alpha ED(u,v) = risk(v) at alpha 0.9
        assert fuse_mbr(u, v, FusionConfig(alpha=0.9)).labels == ("u1", "u2")
        assert fuse_mbr(u, v, FusionConfig(alpha=0.1)).labels == ("v1", "v2", "v3")

    def test_three_path_fixture(self):
        wg_i, wg_a = three_path_pair()
        for alpha in (0.2, 0.5, 0.8):
            got = fuse_mbr(wg_i, wg_a, FusionConfig(alpha=alpha))
            assert got.labels == ("a", "c", "e")
            assert got.labels == mbr_by_enumeration(wg_i, wg_a, alpha)

    def test_matches_oracle_on_random_pairs(self):
        rng = np.random.default_rng(51)
        for _ in range(40):
            wg_i, wg_a = random_wg(rng), random_wg(rng)
            alpha = float(rng.uniform(0.05, 0.95))
            got = fuse_mbr(wg_i, wg_a, FusionConfig(alpha=alpha))
            assert got.labels == mbr_by_enumeration(wg_i, wg_a, alpha)

    def test_output_in_candidate_union(self):
        rng = np.random.default_rng(52)
        for _ in range(30):
            wg_i, wg_a = random_wg(rng), random_wg(rng)
            union = {l for _, l, _ in dfs_paths(wg_i)}
            union |= {l for _, l, _ in dfs_paths(wg_a)}
            assert fuse_mbr(wg_i, wg_a).labels in union

    def test_consensus_collapses_to_unimodal(self):
        rng = np.random.default_rng(53)
        for _ in range(20):
            wg = random_wg(rng)
            uni = mbr_decode(wg)
            for alpha in (0.1, 0.5, 0.9):
                assert fuse_mbr(wg, wg, FusionConfig(alpha=alpha)) == uni

    def test_swap_symmetry(self):
        rng = np.random.default_rng(54)
        for _ in range(20):
            wg_i, wg_a = random_wg(rng), random_wg(rng)
            alpha = float(rng.uniform(0.1, 0.9))
            fwd = fuse_mbr(wg_i, wg_a, FusionConfig(alpha=alpha))
            rev = fuse_mbr(wg_a, wg_i, FusionConfig(alpha=1.0 - alpha))
            assert fwd == rev

    def test_nbest_truncation_renormalizes(self):
        rng = np.random.default_rng(55)
        wg = random_wg(rng, max_paths=60)
        hyp = lattice_hypotheses(wg, max_paths=5)
        assert sum(hyp.values()) == pytest.approx(1.0, abs=1e-12)


class TestLightly:
    def test_transcript_in_corrector(self):
        wg = WordGraph(3, 0, {2}, [
            (0, 1, "a", 0.6), (0, 1, "b", 0.4), (1, 2, "c", 1.0),
        ])
        src = single_path_wg(("b", "c"))
        assert fuse_lightly(src, wg).labels == ("b", "c")

    def test_single_path_corrector_wins_regardless(self):
        corr = single_path_wg(("p", "q"))
        src = single_path_wg(("x", "y", "z"))
        assert fuse_lightly(src, corr).labels == ("p", "q")

    def test_matches_enumeration_oracle(self):
        rng = np.random.default_rng(56)
        for _ in range(30):
            src, corr = random_wg(rng), random_wg(rng)
            got = fuse_lightly(src, corr)
            transcript, _ = best_path(src)
            _, labels, _ = nearest_path_by_enumeration(corr, transcript.labels)
            assert got.labels == labels

    def test_output_is_corrector_path(self):
        rng = np.random.default_rng(57)
        for _ in range(20):
            src, corr = random_wg(rng), random_wg(rng)
            corr_paths = {l for _, l, _ in dfs_paths(corr)}
            assert fuse_lightly(src, corr).labels in corr_paths


class TestGlobal:
    def test_identical_inputs_reproduce_unimodal(self):
        rng = np.random.default_rng(58)
        for _ in range(10):
            wg = random_wg(rng)
            want = strip_eps(cn_best_path(cn_from_wg(wg))).labels
            for alpha in (0.1, 0.5, 0.9):
                for lam in (0.5, 1.0, 2.0):
                    cfg = FusionConfig(alpha=alpha, laplace_lambda=lam)
                    assert fuse_global(wg, wg, cfg).labels == want

    def test_completely_different_hand_computed(self):
        # both single paths; every cross distance is 1, so each matched pair
        # expands to (image x eps)(eps x audio); smoothed scores with lam=1
        # over a 2-label union are 2/3 (present) vs 1/3 (absent)
        wg_i = single_path_wg(("a", "b"), 1.0)
        wg_a = single_path_wg(("x", "y"), 1.0)
        merged = combine_cns(cn_from_wg(wg_i), cn_from_wg(wg_a), 0.7, 1.0)
        assert len(merged) == 4
        hi = (2 / 3) ** 0.7 * (1 / 3) ** 0.3
        lo = (1 / 3) ** 0.7 * (2 / 3) ** 0.3
        col = merged.subnetworks[0]
        assert col["a"] == pytest.approx(hi / (hi + lo), abs=1e-12)
        assert col[EPS] == pytest.approx(lo / (hi + lo), abs=1e-12)
        # image-side symbols win at alpha > 0.5, audio's at alpha < 0.5;
        # at exactly 0.5 every column ties and <eps> wins lexicographically
        cfg = lambda a: FusionConfig(alpha=a)
        assert fuse_global(wg_i, wg_a, cfg(0.7)).labels == ("a", "b")
        assert fuse_global(wg_i, wg_a, cfg(0.3)).labels == ("x", "y")
        assert fuse_global(wg_i, wg_a, cfg(0.5)).labels == ()

    def test_diamond_vs_linear_trace(self):
        # worked trace: c_i = [{a:.6, b:.4}, {c:1}], c_a = [{a:1}, {c:1}];
        # DTW matches diagonally (costs .4 and 0); lam=1 smoothing gives
        # s(a) = sqrt(1.6/3 * 2/3), s(b) = sqrt(1.4/3 * 1/3)
        wg_i = WordGraph(4, 0, {3}, [
            (0, 1, "a", 0.6), (0, 1, "b", 0.4), (1, 3, "c", 1.0),
        ])
        wg_a = single_path_wg(("a", "c"), 1.0)
        merged = combine_cns(cn_from_wg(wg_i), cn_from_wg(wg_a), 0.5, 1.0)
        assert len(merged) == 2
        sa = math.sqrt((1.6 / 3) * (2 / 3))
        sb = math.sqrt((1.4 / 3) * (1 / 3))
        col = merged.subnetworks[0]
        assert col["a"] == pytest.approx(sa / (sa + sb), abs=1e-12)
        assert col["b"] == pytest.approx(sb / (sa + sb), abs=1e-12)
        assert merged.subnetworks[1] == {"c": 1.0}
        assert fuse_global(wg_i, wg_a).labels == ("a", "c")

    def test_merge_subnetworks_normalizes(self):
        col = merge_subnetworks({"a": 0.6, "b": 0.4}, {"a": 1.0}, 0.5, 1.0)
        assert sum(col.values()) == pytest.approx(1.0, abs=1e-12)

    def test_swap_symmetry_on_close_vocab(self):
        # close tokens keep every pair distance < 1, so no column doubling
        # and no DTW tie ambiguity in practice
        rng = np.random.default_rng(59)
        for _ in range(15):
            wg_i = random_wg(rng, vocab=CLOSE_TOKENS)
            wg_a = random_wg(rng, vocab=CLOSE_TOKENS)
            alpha = float(rng.uniform(0.1, 0.9))
            fwd = fuse_global(wg_i, wg_a, FusionConfig(alpha=alpha))
            rev = fuse_global(wg_a, wg_i, FusionConfig(alpha=1.0 - alpha))
            assert fwd.labels == rev.labels

    def test_gap_step_merges_with_eps(self):
        wg_i = single_path_wg(("xa",), 1.0)
        wg_a = single_path_wg(("xa", "xb", "xc"), 1.0)
        merged = combine_cns(cn_from_wg(wg_i), cn_from_wg(wg_a), 0.5, 1.0)
        assert len(merged) == 3
        assert EPS in merged.subnetworks[1]
        assert EPS in merged.subnetworks[2]


class TestLocal:
    def test_identical_best_paths(self):
        wg = single_path_wg(("m", "n", "o"))
        assert fuse_local(wg, wg).labels == ("m", "n", "o")

    def test_gap_inside_alignment(self):
        wg_i = single_path_wg(("a", "b", "d", "e"), 0.9)
        wg_a = single_path_wg(("a", "b", "c", "d", "e"), 0.8)
        assert fuse_local(wg_i, wg_a).labels == ("a", "b", "c", "d", "e")

    def test_conflict_resolved_by_score(self):
        wg_i = WordGraph(4, 0, {3}, [
            (0, 1, "a", 1.0), (1, 2, "X", 0.9), (2, 3, "c", 1.0),
        ])
        wg_a = WordGraph(4, 0, {3}, [
            (0, 1, "a", 1.0), (1, 2, "Y", 0.4), (2, 3, "c", 1.0),
        ])
        assert fuse_local(wg_i, wg_a).labels == ("a", "X", "c")
        assert fuse_local(wg_a, wg_i).labels == ("a", "X", "c")

    def test_score_tie_prefers_image(self):
        wg_i = WordGraph(2, 0, {1}, [(0, 1, "L", 0.5)])
        wg_a = WordGraph(2, 0, {1}, [(0, 1, "R", 0.5)])
        # disjoint single tokens: empty alignment, both kept, image first
        assert fuse_local(wg_i, wg_a).labels == ("L", "R")

    def test_conflict_tie_image_side(self):
        wg_i = WordGraph(4, 0, {3}, [
            (0, 1, "a", 1.0), (1, 2, "X", 0.5), (2, 3, "c", 1.0),
        ])
        wg_a = WordGraph(4, 0, {3}, [
            (0, 1, "a", 1.0), (1, 2, "Y", 0.5), (2, 3, "c", 1.0),
        ])
        assert fuse_local(wg_i, wg_a).labels == ("a", "X", "c")
        assert fuse_local(wg_a, wg_i).labels == ("a", "Y", "c")

    def test_unaligned_edges_kept_in_order(self):
        wg_i = single_path_wg(("p", "a", "b", "c"), 0.9)
        wg_a = single_path_wg(("a", "b", "c", "q"), 0.9)
        assert fuse_local(wg_i, wg_a).labels == ("p", "a", "b", "c", "q")


class TestDispatchAndIdentity:
    def test_run_fusion_dispatch(self):
        wg_i, wg_a = three_path_pair()
        for method in ("mbr", "lightly_ia", "lightly_ai", "global", "local"):
            cfg = FusionConfig(method=method)
            out = run_fusion(wg_i, wg_a, cfg)
            assert isinstance(out, SymbolSequence)

    def test_lightly_direction(self):
        corr = single_path_wg(("p", "q"))
        src = single_path_wg(("x", "y"))
        ia = run_fusion(src, corr, FusionConfig(method="lightly_ia"))
        ai = run_fusion(src, corr, FusionConfig(method="lightly_ai"))
        assert ia.labels == ("p", "q")   # image corrected by audio lattice
        assert ai.labels == ("x", "y")   # audio corrected by image lattice

    def test_every_method_consensus_identity(self):
        rng = np.random.default_rng(60)
        for _ in range(15):
            wg = random_wg(rng)
            bp = best_path(wg)[0].labels
            uni_cn = strip_eps(cn_best_path(cn_from_wg(wg))).labels
            assert fuse_mbr(wg, wg) == mbr_decode(wg)
            assert fuse_lightly(wg, wg).labels == bp
            assert fuse_local(wg, wg).labels == bp
            assert fuse_global(wg, wg).labels == uni_cn
