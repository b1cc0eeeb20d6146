"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 malformed input file (the message
names the line), 3 domain error (e.g. a lattice with no complete path).
"""

import argparse
import sys

from .align import SWParams
from .ctc import greedy_decode
from .errors import FormatError, LatticeError
from .formats import (
    parse_pgs,
    parse_single,
    parse_word_graphs,
    read_transcriptions,
    write_cn,
)
from .fusion import FusionConfig, run_fusion
from .lattice import best_path, cn_from_wg
from .metrics import EvalPair, ser, wilcoxon_signed_rank
from .simulate import (
    alpha_grid_from_step,
    dump_scenario_corpus,
    grid_specs,
    run_scenario_grid,
    write_grid_reports,
)

_METHOD_FLAGS = {
    "mbr": "mbr",
    "lightly-ia": "lightly_ia",
    "lightly-ai": "lightly_ai",
    "global": "global",
    "local": "local",
}


class _Parser(argparse.ArgumentParser):
    """argparse variant that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _alpha(value):
    try:
        a = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad alpha {value!r}") from None
    if not 0.0 < a < 1.0:
        raise argparse.ArgumentTypeError("alpha must lie strictly inside (0, 1)")
    return a


def _positive(kind):
    def convert(value):
        try:
            x = kind(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad value {value!r}") from None
        if x <= 0:
            raise argparse.ArgumentTypeError("value must be > 0")
        return x

    return convert


def _non_positive_float(value):
    try:
        x = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad value {value!r}") from None
    if x > 0:
        raise argparse.ArgumentTypeError("penalty must be <= 0")
    return x


def _read(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError(path, 0, f"cannot read file: {exc.strerror}") from None


def _load_wg(path):
    return parse_single(parse_word_graphs(_read(path), source=path), "WG", path)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="latfuse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("decode-greedy",
                       help="greedy-decode a posteriorgram file")
    p.add_argument("--pg", required=True, metavar="FILE")

    p = sub.add_parser("wg-best-path",
                       help="best path of a word-graph file")
    p.add_argument("--wg", required=True, metavar="FILE")

    p = sub.add_parser("wg-to-cn",
                       help="convert a word graph to a confusion network")
    p.add_argument("--wg", required=True, metavar="FILE")
    p.add_argument("--max-paths", type=_positive(int), default=100)

    p = sub.add_parser("fuse",
                       help="fuse an image and an audio word graph")
    p.add_argument("--method", required=True, choices=sorted(_METHOD_FLAGS))
    p.add_argument("--image", required=True, metavar="FILE")
    p.add_argument("--audio", required=True, metavar="FILE")
    p.add_argument("--alpha", type=_alpha, default=0.5)
    p.add_argument("--lambda", dest="laplace_lambda",
                   type=_positive(float), default=1.0)
    p.add_argument("--sw-match", type=_positive(float), default=2.0)
    p.add_argument("--sw-mismatch", type=_non_positive_float, default=-1.0)
    p.add_argument("--sw-gap", type=_non_positive_float, default=-2.0)
    p.add_argument("--max-paths", type=_positive(int), default=100)

    p = sub.add_parser("eval-ser",
                       help="corpus symbol error rate of parallel files")
    p.add_argument("--hyp", required=True, metavar="FILE")
    p.add_argument("--ref", required=True, metavar="FILE")

    p = sub.add_parser("simulate",
                       help="run the nine-scenario evaluation grid")
    p.add_argument("--grid", action="store_true", required=True)
    p.add_argument("--trials", type=_positive(int), required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--alpha-step", type=_alpha, default=0.1)
    p.add_argument("--out", default="reports", metavar="DIR")
    p.add_argument("--dump-lattices", action="store_true",
                   help="also write the generated corpora in WG text format")

    p = sub.add_parser("wilcoxon",
                       help="paired signed-rank test of two value files")
    p.add_argument("--a", required=True, metavar="FILE")
    p.add_argument("--b", required=True, metavar="FILE")
    return parser


def _cmd_decode_greedy(args):
    pg = parse_single(parse_pgs(_read(args.pg), source=args.pg), "PG", args.pg)
    print(greedy_decode(pg).to_text())


def _cmd_wg_best_path(args):
    seq, logscore = best_path(_load_wg(args.wg))
    print(seq.to_text())
    print(f"LOGSCORE {format(logscore, '.12g')}")


def _cmd_wg_to_cn(args):
    cn = cn_from_wg(_load_wg(args.wg), args.max_paths)
    sys.stdout.write(write_cn(cn, name="cn"))


def _cmd_fuse(args):
    cfg = FusionConfig(
        alpha=args.alpha,
        method=_METHOD_FLAGS[args.method],
        laplace_lambda=args.laplace_lambda,
        sw=SWParams(args.sw_match, args.sw_mismatch, args.sw_gap),
        max_paths=args.max_paths,
    )
    fused = run_fusion(_load_wg(args.image), _load_wg(args.audio), cfg)
    print(fused.to_text())


def _cmd_eval_ser(args):
    hyps = read_transcriptions(_read(args.hyp))
    refs = read_transcriptions(_read(args.ref))
    if len(hyps) != len(refs):
        raise ValueError(
            f"hypothesis file has {len(hyps)} lines, reference file {len(refs)}"
        )
    value = ser([EvalPair(h, r) for h, r in zip(hyps, refs)])
    print(f"SER {value:.2f}")


def _cmd_simulate(args):
    specs = grid_specs(trials=args.trials, seed=args.seed)
    reports = run_scenario_grid(
        specs, alpha_grid=alpha_grid_from_step(args.alpha_step)
    )
    paths = write_grid_reports(reports, args.out)
    if args.dump_lattices:
        for report in reports:
            paths.extend(dump_scenario_corpus(report, args.out))
    print(f"wrote {len(paths)} files to {args.out}")


def _read_values(path):
    values = []
    for no, raw in enumerate(_read(path).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise FormatError(path, no, f"bad number {line!r}") from None
    return values


def _cmd_wilcoxon(args):
    va, vb = _read_values(args.a), _read_values(args.b)
    if len(va) != len(vb):
        raise ValueError(f"files hold {len(va)} and {len(vb)} values")
    res = wilcoxon_signed_rank(va, vb)
    print(
        f"W {format(res.statistic, 'g')} N {res.n_effective} "
        f"P {format(res.p_value, '.12g')} VERDICT {res.verdict}"
    )


_COMMANDS = {
    "decode-greedy": _cmd_decode_greedy,
    "wg-best-path": _cmd_wg_best_path,
    "wg-to-cn": _cmd_wg_to_cn,
    "fuse": _cmd_fuse,
    "eval-ser": _cmd_eval_ser,
    "simulate": _cmd_simulate,
    "wilcoxon": _cmd_wilcoxon,
}


def run(argv) -> int:
    """Parse and execute; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        _COMMANDS[args.command](args)
    except FormatError as exc:
        print(f"latfuse: {exc}", file=sys.stderr)
        return 2
    except (LatticeError, ValueError) as exc:
        print(f"latfuse: {exc}", file=sys.stderr)
        return 3
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
