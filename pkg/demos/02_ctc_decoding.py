"""CTC-style greedy decoding of a posteriorgram and the top-k sausage
lattice that preserves per-step alternatives for later fusion.

Run:  python demos/02_ctc_decoding.py
"""

import numpy as np

from latfuse import (
    Posteriorgram,
    best_path,
    collapse_map,
    count_paths,
    greedy_decode,
    posteriorgram_to_wg,
)
from latfuse.lattice import SymbolSequence

labels = ("<blk>", "note-C4", "note-D4", "rest")
rows = np.array(
    [
        [0.05, 0.80, 0.10, 0.05],   # note-C4
        [0.10, 0.60, 0.25, 0.05],   # note-C4 again (merged by the mapping)
        [0.90, 0.02, 0.03, 0.05],   # blank separates the repeats
        [0.05, 0.70, 0.20, 0.05],   # note-C4
        [0.10, 0.05, 0.15, 0.70],   # rest
    ]
)
pg = Posteriorgram(labels, rows)

print("per-step argmax, then collapse repeats and blanks:")
frame_labels = tuple(labels[int(np.argmax(r))] for r in rows)
print("  frames :", " ".join(frame_labels))
print("  mapped :", collapse_map(SymbolSequence(frame_labels)).to_text())
print("  greedy :", greedy_decode(pg).to_text())
print()

# Greedy decoding throws the alternatives away.  The sausage builder keeps
# the top-k labels per step as a word graph instead.
wg = posteriorgram_to_wg(pg, k=2, prob_floor=0.01)
print(f"sausage lattice: {wg.num_vertices} vertices, {len(wg.edges)} edges, "
      f"{count_paths(wg)} paths")
seq, _ = best_path(wg)
print("lattice best path (frame level):", seq.to_text())
print("collapsed:", collapse_map(seq).to_text())
