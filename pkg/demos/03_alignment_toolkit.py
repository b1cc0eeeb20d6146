"""The alignment primitives: token/character edit distance, aligning a
transcript against a lattice, DTW over confusion networks, and
Smith-Waterman local alignment.

Run:  python demos/03_alignment_toolkit.py
"""

from latfuse import (
    ConfusionNetwork,
    SWParams,
    SymbolSequence,
    WordGraph,
    align_seq_to_lattice,
    dtw_align,
    edit_distance,
    normalized_char_ed,
    smith_waterman,
)

a = SymbolSequence(("clef-G2", "note-C4_quarter", "note-D4_quarter"))
b = SymbolSequence(("clef-G2", "note-C4_half", "note-D4_quarter"))
print("token edit distance:", edit_distance(a, b))
print("char-level distance of the differing tokens:",
      round(normalized_char_ed("note-C4_quarter", "note-C4_half"), 4))
print()

# Pull a noisy transcript onto the nearest lattice path.
wg = WordGraph(
    4, 0, {3},
    [(0, 1, "clef-G2", 0.9), (1, 2, "note-C4_quarter", 0.6),
     (1, 2, "note-C4_half", 0.4), (2, 3, "barline", 1.0)],
)
noisy = SymbolSequence(("clef-G2", "note-C4_halfx", "barline"))
path, cost = align_seq_to_lattice(noisy, wg)
print("nearest lattice path:", path.to_text(), "| edit cost", cost)
print()

# DTW warps two confusion networks of different lengths onto each other.
cn_a = ConfusionNetwork([{"xa": 1.0}, {"xb": 0.6, "xc": 0.4}, {"xd": 1.0}])
cn_b = ConfusionNetwork([{"xa": 1.0}, {"xd": 1.0}])
steps, cost = dtw_align(cn_a, cn_b)
print("DTW path:", steps, "| total cost", round(cost, 4))
print()

# Smith-Waterman finds the best-matching local region.
res = smith_waterman(
    ("a", "b", "c", "d", "e"), ("x", "b", "c", "d", "y"),
    SWParams(match_score=2.0, mismatch_penalty=-1.0, gap_penalty=-2.0),
)
print("SW score:", res.score)
print("aligned:", res.aligned_a, "<->", res.aligned_b)
