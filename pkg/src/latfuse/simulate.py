"""Synthetic paired-lattice generation and the nine-scenario evaluation grid.

Ground-truth sequences are corrupted independently per modality (substitution,
deletion, insertion) into a 1-best "spine", and each spine position is wrapped
in a sausage of scored alternatives.  The spine always carries the largest
score, so the unimodal best path equals the spine and its error rate is
controlled by the corruption rate alone; a bisection calibrates that rate to
the High/Medium/Low targets.  Errors keep the true label among their
alternatives most of the time and get flatter score distributions than
correct positions, which is the in-lattice recoverability the fusion
strategies exploit.

Per-trial RNG streams are derived by counter from the master seed, so runs
are bit-reproducible regardless of how trials would be scheduled.
"""

import os
from dataclasses import dataclass, replace

import numpy as np

from .align import dtw_align, edit_distance, subnetwork_distance
from .fusion import (
    METHODS,
    FusionConfig,
    MbrTables,
    combine_cns,
    fuse_lightly,
    merge_aligned_best_paths,
)
from .lattice import (
    Edge,
    SymbolSequence,
    Vocabulary,
    WordGraph,
    best_path,
    cn_best_path,
    cn_from_wg,
    strip_eps,
)
from .metrics import result_line, wilcoxon_signed_rank

LEVELS = ("High", "Medium", "Low")

#: Target unimodal symbol error rates per difficulty level, in percent.
LEVEL_TARGET_SER = {"High": 27.0, "Medium": 17.0, "Low": 7.0}

CALIBRATION_CORPUS_SIZE = 500
CALIBRATION_TOLERANCE = 0.5
CALIBRATION_MAX_ITERS = 30

DEFAULT_ALPHA_STEP = 0.1

# Error split among corruption event kinds.
_P_SUB, _P_DEL = 0.5, 0.25  # remainder: insertion

# Dirichlet-style concentration (spine slot, other slots): correct positions
# get a confident spine, corrupted ones a flatter, less confident column.
_CORRECT_CONC = (8.0, 1.0)
_ERROR_CONC = (2.0, 1.2)

# Stream tags so calibration and trial RNG streams never collide.
_CAL_STREAM = 0xCA11B
_TRIAL_STREAM = 0x7121A1


@dataclass(frozen=True)
class ScenarioSpec:
    """One cell of the difficulty grid plus the generator knobs.

    ``confusion_width`` bounds the systematic-confusion neighborhood: a
    substitution error replaces a token with one at most this many vocabulary
    positions away, and sausage alternatives come from the same neighborhood
    of the emitted label.  Shared neighborhoods across modalities are what
    let one modality's errors surface in the other's lattice, as real
    recognizer confusions do.
    """

    image_level: str
    audio_level: str
    trials: int = 50
    sequence_length_range: tuple = (10, 30)
    vocab_size: int = 100
    branching: int = 3
    seed: int = 0
    truth_in_lattice_prob: float = 0.9
    confusion_width: int = 2

    def __post_init__(self):
        if self.image_level not in LEVELS or self.audio_level not in LEVELS:
            raise ValueError(f"levels must be one of {LEVELS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        lo, hi = self.sequence_length_range
        if not 1 <= lo <= hi:
            raise ValueError("bad sequence_length_range")
        if self.branching < 1:
            raise ValueError("branching must be >= 1")
        if self.vocab_size < self.branching + 1:
            raise ValueError("vocab_size must exceed branching")
        if not 0.0 <= self.truth_in_lattice_prob <= 1.0:
            raise ValueError("truth_in_lattice_prob must be in [0, 1]")
        if not 1 <= self.confusion_width:
            raise ValueError("confusion_width must be >= 1")
        if 2 * self.confusion_width >= self.vocab_size:
            raise ValueError("confusion_width too large for the vocabulary")
        if self.branching - 1 > 2 * self.confusion_width:
            raise ValueError("branching exceeds the confusion neighborhood")


def default_vocabulary(size: int) -> Vocabulary:
    width = max(3, len(str(size - 1)))
    return Vocabulary(tuple(f"sym{i:0{width}d}" for i in range(size)))


def _draw_corruption(n: int, rng) -> dict:
    """Pre-draw all per-position randomness one corruption pass can need.

    Fixing these draws makes the corrupted output a deterministic, monotone
    function of the noise rate, which is what the calibration bisection
    relies on.
    """
    return {
        "u_err": rng.random(n),
        "u_type": rng.random(n),
        "u_truth": rng.random(n),
        "sub_pick": rng.integers(0, np.iinfo(np.int64).max, n),
        "ins_pick": rng.integers(0, np.iinfo(np.int64).max, n),
    }


def _neighborhood(index: int, size: int, width: int) -> list:
    """Confusable vocabulary indices around ``index`` (itself excluded)."""
    return [
        (index + off) % size
        for off in range(-width, width + 1)
        if off != 0
    ]


def _corrupt(truth: tuple, rate: float, draws: dict, vocab: Vocabulary,
             width: int) -> list:
    """Corrupt a label tuple into spine items (label, truth_hint, is_error).

    ``truth_hint`` is the ground-truth label underlying the position (None
    for pure insertions); deleted truth labels simply vanish.  Substitutions
    pick a confusable neighbor of the true token.  The spine is never left
    empty: a deletion that would empty it is skipped.
    """
    tokens = vocab.tokens
    index = {t: i for i, t in enumerate(tokens)}
    spine = []
    for i, lab in enumerate(truth):
        if draws["u_err"][i] < rate:
            kind = draws["u_type"][i]
            if kind < _P_SUB:
                neigh = _neighborhood(index[lab], len(tokens), width)
                j = neigh[draws["sub_pick"][i] % len(neigh)]
                spine.append((tokens[j], lab, True))
            elif kind < _P_SUB + _P_DEL:
                if i == len(truth) - 1 and not spine:
                    spine.append((lab, lab, False))
                continue
            else:
                j = draws["ins_pick"][i] % len(tokens)
                spine.append((tokens[j], None, True))
                spine.append((lab, lab, False))
        else:
            spine.append((lab, lab, False))
    return spine


def _wrap_sausage(spine: list, spec: ScenarioSpec, rng, vocab: Vocabulary) -> WordGraph:
    """Wrap spine positions in scored alternative sets, one sausage segment each.

    Alternatives beyond the spine label (and the optionally injected true
    label) come from the spine label's confusion neighborhood.
    """
    tokens = vocab.tokens
    index = {t: i for i, t in enumerate(tokens)}
    edges = []
    for t, (lab, hint, is_err) in enumerate(spine):
        alts = [lab]
        if (
            hint is not None
            and hint != lab
            and rng.random() < spec.truth_in_lattice_prob
        ):
            alts.append(hint)
        neigh = _neighborhood(index[lab], len(tokens), spec.confusion_width)
        while len(alts) < spec.branching:
            cand = tokens[neigh[rng.integers(0, len(neigh))]]
            if cand not in alts:
                alts.append(cand)
        c0, c1 = _ERROR_CONC if is_err else _CORRECT_CONC
        conc = np.full(len(alts), c1)
        conc[0] = c0
        weights = rng.dirichlet(conc)
        weights = np.clip(weights, 1e-12, None)
        weights /= weights.sum()
        # the spine label must carry the largest score so the best path
        # reproduces the spine; ranks keep truth second when present
        weights = np.sort(weights)[::-1]
        for a, w in zip(alts, weights):
            edges.append(Edge(t, t + 1, a, float(min(w, 1.0))))
    return WordGraph(len(spine) + 1, 0, frozenset({len(spine)}), tuple(edges))


def generate_wg_pair(
    truth: SymbolSequence,
    noise_i: float,
    noise_a: float,
    spec: ScenarioSpec,
    rng,
) -> tuple[WordGraph, WordGraph]:
    """Independently corrupted image/audio sausage lattices for one truth."""
    if len(truth.labels) == 0:
        raise ValueError("empty truth sequence")
    if not (0.0 <= noise_i < 1.0 and 0.0 <= noise_a < 1.0):
        raise ValueError("noise rates must be in [0, 1)")
    vocab = default_vocabulary(spec.vocab_size)
    out = []
    for rate in (noise_i, noise_a):
        draws = _draw_corruption(len(truth.labels), rng)
        spine = _corrupt(truth.labels, rate, draws, vocab, spec.confusion_width)
        out.append(_wrap_sausage(spine, spec, rng, vocab))
    return out[0], out[1]


def _calibration_corpus(spec: ScenarioSpec, rng) -> list:
    """Fixed truths plus frozen corruption draws for rate bisection."""
    vocab = default_vocabulary(spec.vocab_size)
    lo, hi = spec.sequence_length_range
    corpus = []
    for _ in range(CALIBRATION_CORPUS_SIZE):
        n = int(rng.integers(lo, hi + 1))
        truth = tuple(vocab.tokens[i] for i in rng.integers(0, len(vocab), n))
        corpus.append((truth, _draw_corruption(n, rng)))
    return corpus


def _corpus_spine_ser(
    corpus: list, rate: float, vocab: Vocabulary, width: int
) -> float:
    num = 0
    den = 0
    for truth, draws in corpus:
        spine = [lab for lab, _, _ in _corrupt(truth, rate, draws, vocab, width)]
        num += edit_distance(spine, truth)
        den += len(truth)
    return 100.0 * num / den


def calibrate_noise(target: float, spec: ScenarioSpec, rng) -> float:
    """Bisect the corruption rate until the unimodal SER hits ``target``.

    Measured on a fixed 500-sequence corpus whose spine equals the best path
    by construction.  Stops within +/- 0.5 SER points of the target or after
    30 iterations, returning the best rate found.  Deterministic given the
    RNG stream.
    """
    if not 0.0 <= target < 100.0:
        raise ValueError("target SER must be in [0, 100)")
    if target == 0.0:
        return 0.0
    vocab = default_vocabulary(spec.vocab_size)
    corpus = _calibration_corpus(spec, rng)
    lo, hi = 0.0, 0.95
    best_rate, best_err = 0.0, abs(target)
    for _ in range(CALIBRATION_MAX_ITERS):
        mid = (lo + hi) / 2.0
        measured = _corpus_spine_ser(corpus, mid, vocab, spec.confusion_width)
        err = abs(measured - target)
        if err < best_err:
            best_rate, best_err = mid, err
        if err <= CALIBRATION_TOLERANCE:
            break
        if measured < target:
            lo = mid
        else:
            hi = mid
    return best_rate


def alpha_grid_from_step(step: float) -> tuple:
    """Interior alpha grid {step, 2*step, ...} strictly inside (0, 1)."""
    if not 0.0 < step < 1.0:
        raise ValueError("alpha step must be in (0, 1)")
    n = int(round(1.0 / step))
    grid = tuple(round(k * step, 10) for k in range(1, n))
    if not grid or not all(0.0 < a < 1.0 for a in grid):
        raise ValueError("alpha step leaves no interior grid points")
    return grid


DEFAULT_ALPHA_GRID = alpha_grid_from_step(DEFAULT_ALPHA_STEP)


def grid_specs(trials: int, seed: int, **overrides) -> list:
    """The standard nine scenarios: image level major, audio level minor."""
    return [
        ScenarioSpec(
            image_level=li, audio_level=la, trials=trials, seed=seed, **overrides
        )
        for li in LEVELS
        for la in LEVELS
    ]


@dataclass
class ScenarioReport:
    """SER results and paired significance statistics for one scenario."""

    scenario_id: int
    spec: ScenarioSpec
    noise_image: float
    noise_audio: float
    alpha_grid: tuple
    baseline_ser: dict
    baseline_trials: dict
    cells: dict
    cell_trials: dict
    best_alpha: dict
    wilcoxon: dict

    def __post_init__(self):
        assert all(v >= 0 for v in self.baseline_ser.values())
        assert all(v >= 0 for v in self.cells.values())


def _trial_rng(seed: int, scenario_id: int, trial: int):
    return np.random.default_rng(
        np.random.SeedSequence([_TRIAL_STREAM, seed, scenario_id, trial])
    )


def _trial_sample(
    spec: ScenarioSpec, scenario_id: int, trial: int, noise_i: float, noise_a: float
):
    """Deterministic (truth, image WG, audio WG) for one trial counter."""
    rng = _trial_rng(spec.seed, scenario_id, trial)
    vocab = default_vocabulary(spec.vocab_size)
    lo, hi = spec.sequence_length_range
    n = int(rng.integers(lo, hi + 1))
    truth = SymbolSequence(
        tuple(vocab.tokens[i] for i in rng.integers(0, len(vocab), n))
    )
    wg_i, wg_a = generate_wg_pair(truth, noise_i, noise_a, spec, rng)
    return truth, wg_i, wg_a


def _pooled(trials: list) -> float:
    num = sum(e for e, _ in trials)
    den = sum(n for _, n in trials)
    return 100.0 * num / den


def _per_trial(trials: list) -> list:
    return [100.0 * e / n for e, n in trials]


def run_scenario(
    spec: ScenarioSpec,
    scenario_id: int,
    methods=METHODS,
    alpha_grid=DEFAULT_ALPHA_GRID,
    noise_rates: tuple | None = None,
) -> ScenarioReport:
    """Generate one scenario's corpus and evaluate baselines and methods.

    ``noise_rates`` can inject pre-calibrated (image, audio) rates; otherwise
    each level is calibrated here from its own deterministic stream.
    """
    for a in alpha_grid:
        if not 0.0 < a < 1.0:
            raise ValueError("alpha grid values must lie in (0, 1)")
    if noise_rates is None:
        noise_rates = (
            calibrated_rate(spec, spec.image_level),
            calibrated_rate(spec, spec.audio_level),
        )
    noise_i, noise_a = noise_rates

    cfg = FusionConfig()
    baseline_trials = {"image": [], "audio": []}
    cell_trials = {
        (m, a): [] for m in methods for a in alpha_grid
    }
    for t in range(spec.trials):
        truth, wg_i, wg_a = _trial_sample(spec, scenario_id, t, noise_i, noise_a)
        n = len(truth.labels)

        def record(bucket, hyp):
            bucket.append((edit_distance(hyp, truth), n))

        seq_i, _ = best_path(wg_i)
        seq_a, _ = best_path(wg_a)
        record(baseline_trials["image"], seq_i)
        record(baseline_trials["audio"], seq_a)

        if "mbr" in methods:
            tables = MbrTables(wg_i, wg_a, cfg.max_paths)
            for a in alpha_grid:
                record(cell_trials[("mbr", a)], tables.decode(a))
        if "lightly_ia" in methods:
            hyp = fuse_lightly(wg_i, wg_a)
            for a in alpha_grid:
                record(cell_trials[("lightly_ia", a)], hyp)
        if "lightly_ai" in methods:
            hyp = fuse_lightly(wg_a, wg_i)
            for a in alpha_grid:
                record(cell_trials[("lightly_ai", a)], hyp)
        if "global" in methods:
            cn_i = cn_from_wg(wg_i, cfg.max_paths)
            cn_a = cn_from_wg(wg_a, cfg.max_paths)
            path, _ = dtw_align(cn_i, cn_a, subnetwork_distance)
            for a in alpha_grid:
                merged = combine_cns(cn_i, cn_a, a, cfg.laplace_lambda, path)
                record(cell_trials[("global", a)], strip_eps(cn_best_path(merged)))
        if "local" in methods:
            hyp = merge_aligned_best_paths(seq_i, seq_a, cfg.sw)
            for a in alpha_grid:
                record(cell_trials[("local", a)], hyp)

    baseline_ser = {k: _pooled(v) for k, v in baseline_trials.items()}
    cells = {key: _pooled(v) for key, v in cell_trials.items()}
    best_alpha = {
        m: min(alpha_grid, key=lambda a: (cells[(m, a)], a)) for m in methods
    }
    wilcoxon = {}
    for m in methods:
        vec = _per_trial(cell_trials[(m, best_alpha[m])])
        for base in ("image", "audio"):
            base_vec = _per_trial(baseline_trials[base])
            try:
                wilcoxon[(m, base)] = wilcoxon_signed_rank(vec, base_vec)
            except ValueError:
                wilcoxon[(m, base)] = None

    return ScenarioReport(
        scenario_id=scenario_id,
        spec=spec,
        noise_image=noise_i,
        noise_audio=noise_a,
        alpha_grid=tuple(alpha_grid),
        baseline_ser=baseline_ser,
        baseline_trials={k: _per_trial(v) for k, v in baseline_trials.items()},
        cells=cells,
        cell_trials={k: _per_trial(v) for k, v in cell_trials.items()},
        best_alpha=best_alpha,
        wilcoxon=wilcoxon,
    )


def calibrated_rate(spec: ScenarioSpec, level: str) -> float:
    """Noise rate for a difficulty level, from its own deterministic stream."""
    target = LEVEL_TARGET_SER[level]
    rng = np.random.default_rng(
        np.random.SeedSequence([_CAL_STREAM, spec.seed, LEVELS.index(level)])
    )
    return calibrate_noise(target, spec, rng)


def measure_calibrated_level(spec: ScenarioSpec, level: str) -> tuple:
    """Calibrate a level, then decode its 500-sequence corpus end to end.

    Rebuilds the exact corpus the calibration bisected over, wraps every
    corrupted spine in a full sausage lattice, best-path decodes it, and
    pools the SER.  Returns (rate, measured SER); deterministic per seed.
    """
    rate = calibrated_rate(spec, level)
    rng = np.random.default_rng(
        np.random.SeedSequence([_CAL_STREAM, spec.seed, LEVELS.index(level)])
    )
    corpus = _calibration_corpus(spec, rng)
    wrap_rng = np.random.default_rng(
        np.random.SeedSequence([_CAL_STREAM, spec.seed, LEVELS.index(level), 1])
    )
    vocab = default_vocabulary(spec.vocab_size)
    num = 0
    den = 0
    for truth, draws in corpus:
        spine = _corrupt(truth, rate, draws, vocab, spec.confusion_width)
        wg = _wrap_sausage(spine, spec, wrap_rng, vocab)
        hyp, _ = best_path(wg)
        num += edit_distance(hyp.labels, truth)
        den += len(truth)
    return rate, 100.0 * num / den


def run_scenario_grid(
    specs,
    methods=METHODS,
    alpha_grid=DEFAULT_ALPHA_GRID,
    seed: int | None = None,
) -> list:
    """Run every scenario spec (numbered from 1) and collect the reports.

    Noise rates are calibrated once per distinct (level, geometry) pair and
    shared across scenarios.  ``seed`` overrides every spec's seed when
    given.
    """
    specs = list(specs)
    if seed is not None:
        specs = [replace(s, seed=seed) for s in specs]
    rate_cache = {}

    def rate_for(spec, level):
        key = (
            level,
            spec.seed,
            spec.vocab_size,
            spec.sequence_length_range,
            spec.branching,
        )
        if key not in rate_cache:
            rate_cache[key] = calibrated_rate(spec, level)
        return rate_cache[key]

    reports = []
    for sid, spec in enumerate(specs, start=1):
        reports.append(
            run_scenario(
                spec,
                sid,
                methods=methods,
                alpha_grid=alpha_grid,
                noise_rates=(
                    rate_for(spec, spec.image_level),
                    rate_for(spec, spec.audio_level),
                ),
            )
        )
    return reports


def _g(x) -> str:
    return format(x, ".12g")


def format_report(report: ScenarioReport) -> str:
    """Deterministic per-scenario report text (machine-readable lines)."""
    spec = report.spec
    sid = report.scenario_id
    lines = [
        f"# scenario {sid}: image {spec.image_level} / audio {spec.audio_level}, "
        f"trials {spec.trials}, seed {spec.seed}",
        f"SCENARIO {sid} IMAGE {spec.image_level} AUDIO {spec.audio_level} "
        f"TRIALS {spec.trials} SEED {spec.seed}",
        f"NOISE image {_g(report.noise_image)} audio {_g(report.noise_audio)}",
        result_line("image", sid, 1, report.baseline_ser["image"]),
        result_line("audio", sid, 0, report.baseline_ser["audio"]),
    ]
    methods = sorted({m for m, _ in report.cells})
    for m in methods:
        for a in report.alpha_grid:
            lines.append(result_line(m, sid, a, report.cells[(m, a)]))
    for m in methods:
        a = report.best_alpha[m]
        lines.append(
            f"BEST {m} SCENARIO {sid} ALPHA {format(a, 'g')} "
            f"SER {_g(report.cells[(m, a)])}"
        )
    for m in methods:
        a = report.best_alpha[m]
        for base in ("image", "audio"):
            res = report.wilcoxon.get((m, base))
            head = f"WILCOXON {m} VS {base} SCENARIO {sid} ALPHA {format(a, 'g')}"
            if res is None:
                lines.append(f"{head} SKIPPED fewer-than-2-nonzero-differences")
            else:
                lines.append(
                    f"{head} W {_g(res.statistic)} N {res.n_effective} "
                    f"P {_g(res.p_value)} VERDICT {res.verdict}"
                )
    return "\n".join(lines) + "\n"


def format_summary(reports: list) -> str:
    """Aligned-column grid table of best corpus SERs across scenarios."""
    headers = ["method"] + [
        f"{r.scenario_id}_({r.spec.image_level[0]}-{r.spec.audio_level[0]})"
        for r in reports
    ]
    methods = sorted({m for r in reports for m, _ in r.cells})
    rows = []
    for base in ("image", "audio"):
        rows.append([base] + [f"{r.baseline_ser[base]:.2f}" for r in reports])
    for m in methods:
        rows.append(
            [m]
            + [f"{r.cells[(m, r.best_alpha[m])]:.2f}" for r in reports]
        )
    widths = [
        max(len(headers[c]), max(len(row[c]) for row in rows))
        for c in range(len(headers))
    ]
    out = ["# best corpus SER per scenario (methods at their best alpha)"]
    out.append("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
    for row in rows:
        out.append("  ".join(v.ljust(w) for v, w in zip(row, widths)))
    return "\n".join(out) + "\n"


def write_grid_reports(reports: list, out_dir: str) -> list:
    """Write scenario_<id>.txt per report plus summary.txt; returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for report in reports:
        path = os.path.join(out_dir, f"scenario_{report.scenario_id}.txt")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_report(report))
        paths.append(path)
    summary = os.path.join(out_dir, "summary.txt")
    with open(summary, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_summary(reports))
    paths.append(summary)
    return paths


def dump_scenario_corpus(report: ScenarioReport, out_dir: str) -> list:
    """Replay a report's lattice corpus into WG text files plus references.

    Regenerates the exact per-trial lattices from the report's seed and
    noise rates (the RNG streams are counter-derived, so this is bit-faithful)
    and writes scenario_<id>_image.wg, _audio.wg and _refs.txt.
    """
    from .formats import write_transcriptions, write_wg

    os.makedirs(out_dir, exist_ok=True)
    spec = report.spec
    sid = report.scenario_id
    image_parts, audio_parts, refs = [], [], []
    for t in range(spec.trials):
        truth, wg_i, wg_a = _trial_sample(
            spec, sid, t, report.noise_image, report.noise_audio
        )
        image_parts.append(write_wg(wg_i, name=f"trial{t}"))
        audio_parts.append(write_wg(wg_a, name=f"trial{t}"))
        refs.append(truth)
    paths = []
    for suffix, content in (
        ("image.wg", "".join(image_parts)),
        ("audio.wg", "".join(audio_parts)),
        ("refs.txt", write_transcriptions(refs)),
    ):
        path = os.path.join(out_dir, f"scenario_{sid}_{suffix}")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(content)
        paths.append(path)
    return paths
