"""Line-based UTF-8 text formats for word graphs, confusion networks and
posteriorgrams, plus plain transcription files.

Scores are printed with 12 significant digits and the parsers round-trip
bit-exactly at that precision: parse(write(x)) serializes back to identical
bytes.  ``#`` starts a comment; blank lines are ignored (except in
transcription files, where every line is one transcription).
"""

import numpy as np

from .ctc import Posteriorgram
from .errors import FormatError
from .lattice import ConfusionNetwork, Edge, SymbolSequence, WordGraph


def format_score(x: float) -> str:
    return format(float(x), ".12g")


def _content_lines(text: str):
    """Yield (line_no, stripped content) skipping blanks and comment lines.

    Only whole-line comments are recognized so that labels containing ``#``
    (sharps in music tokens) survive untouched.
    """
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield no, line


def _parse_score(tok: str, source, no) -> float:
    try:
        value = float(tok)
    except ValueError:
        raise FormatError(source, no, f"bad score {tok!r}") from None
    if not 0.0 <= value <= 1.0:
        raise FormatError(source, no, f"score {tok!r} outside [0, 1]")
    return value


def write_wg(wg: WordGraph, name: str = "wg") -> str:
    lines = [f"WG {name}", f"V {wg.num_vertices}", f"I {wg.initial}"]
    lines.append("F " + " ".join(str(f) for f in sorted(wg.finals)))
    for e in wg.edges:
        lines.append(f"E {e.src} {e.dst} {e.label} {format_score(e.score)}")
    lines.append("END")
    return "\n".join(lines) + "\n"


def parse_word_graphs(text: str, source: str = "<wg>") -> list:
    """Parse a stream of WG records; returns [(name, WordGraph), ...]."""
    records = []
    cur = None  # (name, line_no, {V, I, F, E})
    for no, line in _content_lines(text):
        parts = line.split()
        kw = parts[0]
        if kw == "WG":
            if cur is not None:
                raise FormatError(source, no, "WG record not closed with END")
            if len(parts) != 2:
                raise FormatError(source, no, "expected: WG <name>")
            cur = {"name": parts[1], "line": no, "V": None, "I": None,
                   "F": None, "E": []}
            continue
        if cur is None:
            raise FormatError(source, no, f"{kw!r} outside a WG record")
        if kw == "V" or kw == "I":
            if len(parts) != 2 or cur[kw] is not None:
                raise FormatError(source, no, f"expected one: {kw} <count>")
            try:
                cur[kw] = int(parts[1])
            except ValueError:
                raise FormatError(source, no, f"bad integer {parts[1]!r}") from None
        elif kw == "F":
            if len(parts) < 2 or cur["F"] is not None:
                raise FormatError(source, no, "expected one: F <id> [<id>...]")
            try:
                cur["F"] = frozenset(int(p) for p in parts[1:])
            except ValueError:
                raise FormatError(source, no, "bad final vertex id") from None
        elif kw == "E":
            if len(parts) != 5:
                raise FormatError(
                    source, no, "expected: E <from> <to> <label> <score>"
                )
            try:
                src, dst = int(parts[1]), int(parts[2])
            except ValueError:
                raise FormatError(source, no, "bad edge vertex id") from None
            cur["E"].append(
                Edge(src, dst, parts[3], _parse_score(parts[4], source, no))
            )
        elif kw == "END":
            for need in ("V", "I", "F"):
                if cur[need] is None:
                    raise FormatError(
                        source, no, f"record {cur['name']!r} missing {need} line"
                    )
            records.append(
                (
                    cur["name"],
                    WordGraph(cur["V"], cur["I"], cur["F"], tuple(cur["E"])),
                )
            )
            cur = None
        else:
            raise FormatError(source, no, f"unknown keyword {kw!r}")
    if cur is not None:
        raise FormatError(source, cur["line"], "WG record not closed with END")
    return records


def write_cn(cn: ConfusionNetwork, name: str = "cn") -> str:
    lines = [f"CN {name}"]
    for sub in cn.subnetworks:
        lines.append("S")
        for lab in sorted(sub, key=lambda l: (-sub[l], l)):
            lines.append(f"A {lab} {format_score(sub[lab])}")
    lines.append("END")
    return "\n".join(lines) + "\n"


def parse_cns(text: str, source: str = "<cn>") -> list:
    """Parse a stream of CN records; returns [(name, ConfusionNetwork), ...]."""
    records = []
    cur = None
    subs = None
    for no, line in _content_lines(text):
        parts = line.split()
        kw = parts[0]
        if kw == "CN":
            if cur is not None:
                raise FormatError(source, no, "CN record not closed with END")
            if len(parts) != 2:
                raise FormatError(source, no, "expected: CN <name>")
            cur = (parts[1], no)
            subs = []
        elif cur is None:
            raise FormatError(source, no, f"{kw!r} outside a CN record")
        elif kw == "S":
            if len(parts) != 1:
                raise FormatError(source, no, "expected bare S line")
            subs.append({})
        elif kw == "A":
            if len(parts) != 3:
                raise FormatError(source, no, "expected: A <label> <score>")
            if not subs:
                raise FormatError(source, no, "A line before any S line")
            if parts[1] in subs[-1]:
                raise FormatError(source, no, f"duplicate label {parts[1]!r}")
            subs[-1][parts[1]] = _parse_score(parts[2], source, no)
        elif kw == "END":
            if any(not s for s in subs):
                raise FormatError(source, no, "empty subnetwork")
            records.append((cur[0], ConfusionNetwork(tuple(subs))))
            cur, subs = None, None
        else:
            raise FormatError(source, no, f"unknown keyword {kw!r}")
    if cur is not None:
        raise FormatError(source, cur[1], "CN record not closed with END")
    return records


def write_pg(pg: Posteriorgram, name: str = "pg") -> str:
    lines = [f"PG {name}", "LABELS " + " ".join(pg.labels)]
    for row in pg.rows:
        lines.append("ROW " + " ".join(format_score(v) for v in row))
    lines.append("END")
    return "\n".join(lines) + "\n"


def parse_pgs(text: str, source: str = "<pg>") -> list:
    """Parse a stream of PG records; returns [(name, Posteriorgram), ...]."""
    records = []
    cur = None
    for no, line in _content_lines(text):
        parts = line.split()
        kw = parts[0]
        if kw == "PG":
            if cur is not None:
                raise FormatError(source, no, "PG record not closed with END")
            if len(parts) != 2:
                raise FormatError(source, no, "expected: PG <name>")
            cur = {"name": parts[1], "line": no, "labels": None, "rows": []}
        elif cur is None:
            raise FormatError(source, no, f"{kw!r} outside a PG record")
        elif kw == "LABELS":
            if len(parts) < 2 or cur["labels"] is not None:
                raise FormatError(source, no, "expected one: LABELS <tok> ...")
            cur["labels"] = tuple(parts[1:])
        elif kw == "ROW":
            if cur["labels"] is None:
                raise FormatError(source, no, "ROW before LABELS")
            if len(parts) != len(cur["labels"]) + 1:
                raise FormatError(
                    source, no,
                    f"expected {len(cur['labels'])} values, got {len(parts) - 1}",
                )
            try:
                cur["rows"].append([float(p) for p in parts[1:]])
            except ValueError:
                raise FormatError(source, no, "bad activation value") from None
        elif kw == "END":
            try:
                pg = Posteriorgram(
                    cur["labels"],
                    np.array(cur["rows"], dtype=float).reshape(
                        len(cur["rows"]), len(cur["labels"])
                    ),
                )
            except ValueError as exc:
                raise FormatError(source, cur["line"], str(exc)) from None
            records.append((cur["name"], pg))
            cur = None
        else:
            raise FormatError(source, no, f"unknown keyword {kw!r}")
    if cur is not None:
        raise FormatError(source, cur["line"], "PG record not closed with END")
    return records


def parse_single(records: list, kind: str, source: str):
    if len(records) != 1:
        raise FormatError(
            source, 1, f"expected exactly one {kind} record, found {len(records)}"
        )
    return records[0][1]


def read_transcriptions(text: str) -> list:
    """One transcription per line, tokens whitespace-separated.

    Every line counts, including empty ones (an empty transcription); a
    trailing newline does not add a final empty transcription.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [SymbolSequence.from_text(line) for line in lines]


def write_transcriptions(seqs) -> str:
    return "".join(seq.to_text() + "\n" for seq in seqs)
