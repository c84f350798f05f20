"""Monte Carlo experiments: perfect-alignment probability, rate curves, decode demo.

Trials are independent. Each trial derives its own generators from
``SeedSequence(seed, spawn_key=(trial,))``, so results do not depend on the
number of worker processes or on scheduling.
"""

from __future__ import annotations

import csv
import functools
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np

from risbeam.analysis import overhead, predict_success, required_rounds
from risbeam.channel import (
    BeamTuple,
    ChannelRealization,
    Codebooks,
    cascaded_gain,
    draw_channel,
    los_channel,
    oracle_tuple,
)
from risbeam.config import ExperimentSpec
from risbeam.errors import ConfigurationError
from risbeam.sounding import SoundingConfig
from risbeam.system import SystemConfig
from risbeam.training import (
    BinningPlan,
    HierarchicalCodebooks,
    combinatorial_trial,
    exhaustive_search,
    hierarchical_search,
    intersect_decode,
    make_binning_plan,
    multidirectional_search,
    scan_round,
    survivors,
)

CSV_HEADER = (
    "method", "n_t", "n_r", "m", "r_bs", "r_ue", "q", "rounds",
    "snr_db", "slots_used", "metric", "value", "stderr", "trials",
)
PREDICT_HEADER = ("lambda", "p_union", "p_poisson", "required_L_for_target")
# the full-CSI curve comes from a local coordinate ascent, not a proven optimum
SURROGATE_METRIC = "avg_rate_bps_hz_upper_bound_surrogate"


# --------------------------------------------------------------------------
# rates and the full-CSI reference


def achievable_rate(channel: ChannelRealization, f, v, w, snr_db: float) -> float:
    """``log2(1 + |w^H H2 diag(v) H1 f|**2 * snr)`` in bits/s/Hz."""
    g = cascaded_gain(channel, f, v, w)
    return float(np.log2(1.0 + abs(g) ** 2 * 10.0 ** (snr_db / 10.0)))


def tuple_beams(codebooks: Codebooks, chosen: BeamTuple):
    return (
        codebooks.bs.column(chosen.bs_index),
        codebooks.ris.column(chosen.ris_index),
        codebooks.ue.column(chosen.ue_index),
    )


@dataclass(frozen=True, eq=False)
class BaselineResult:
    f: np.ndarray
    v: np.ndarray
    w: np.ndarray
    rate: float
    objective_history: tuple[float, ...] = field(repr=False)


def full_csi_baseline(
    channel: ChannelRealization,
    snr_db: float,
    iterations: int = 100,
    tol: float = 1e-9,
) -> BaselineResult:
    """Joint beamforming with perfect CSI by alternating maximization.

    Starts from the best single-beam DFT triple. Given ``(f, w)`` the RIS
    phases co-phase every reflected component; given ``v`` the pair
    ``(f, w)`` is the dominant singular pair of ``H2 diag(v) H1``. Each step
    cannot decrease ``|w^H H2 diag(v) H1 f|``. This is an upper-bound
    surrogate, not a reproduction of any particular joint design.
    """
    codebooks = channel.codebooks
    start, best = oracle_tuple(channel, codebooks)
    f, v, w = tuple_beams(codebooks, start)
    history = [best]
    for _ in range(iterations):
        a = (channel.h2.conj().T @ w).conj() * (channel.h1 @ f)
        v = np.exp(-1j * np.angle(a))
        u, s, vh = np.linalg.svd(channel.h2 @ (v[:, None] * channel.h1))
        w, f = u[:, 0], vh[0].conj()
        obj = float(s[0])
        history.append(obj)
        if obj - history[-2] <= tol * history[-2]:
            break
    return BaselineResult(
        f=f,
        v=v,
        w=w,
        rate=achievable_rate(channel, f, v, w, snr_db),
        objective_history=tuple(history),
    )


# --------------------------------------------------------------------------
# result rows


@dataclass(frozen=True)
class ResultRow:
    method: str
    system: SystemConfig
    snr_db: float
    slots_used: int
    metric: str
    value: float
    stderr: float
    trials: int

    def as_csv(self) -> list[str]:
        s = self.system
        return [
            self.method, str(s.n_t), str(s.n_r), str(s.m), str(s.r_bs), str(s.r_ue), str(s.q),
            str(s.rounds), _fmt(self.snr_db), str(self.slots_used), self.metric,
            _fmt(self.value), _fmt(self.stderr), str(self.trials),
        ]


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def write_csv(rows: Iterable[ResultRow], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_csv())


def rows_to_csv(rows: Iterable[ResultRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


# --------------------------------------------------------------------------
# trial plumbing


def trial_seeds(seed: int, trial: int, count: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed, spawn_key=(trial,)).spawn(count)


@functools.lru_cache(maxsize=8)
def _codebooks(system: SystemConfig) -> tuple[Codebooks, HierarchicalCodebooks]:
    return Codebooks.dft(system.n_t, system.n_r, system.ris_shape), HierarchicalCodebooks.build(system)


def _run_chunk(fn: Callable, spec: ExperimentSpec, trials: Sequence[int]) -> list:
    return [fn(spec, t) for t in trials]


def map_trials(fn: Callable, spec: ExperimentSpec) -> list:
    """``[fn(spec, t) for t in range(spec.trials)]``, optionally over a process pool."""
    if spec.workers == 1:
        return _run_chunk(fn, spec, range(spec.trials))
    size = math.ceil(spec.trials / (4 * spec.workers))
    chunks = [range(i, min(i + size, spec.trials)) for i in range(0, spec.trials, size)]
    with ProcessPoolExecutor(max_workers=spec.workers) as pool:
        parts = pool.map(_run_chunk, [fn] * len(chunks), [spec] * len(chunks), chunks)
        return [r for part in parts for r in part]


def run_method(
    method: str,
    channel: ChannelRealization,
    system: SystemConfig,
    cfg: SoundingConfig,
    rng: np.random.Generator,
):
    flat, hier = _codebooks(system)
    if method == "exhaustive":
        return exhaustive_search(channel, flat, cfg, rng)
    if method == "hierarchical":
        return hierarchical_search(channel, hier, cfg, rng)
    if method == "multidirectional":
        return multidirectional_search(channel, flat, system, cfg, rng)
    raise ConfigurationError(f"{method!r} is not a beam training method")


def _snr_points(spec: ExperimentSpec) -> tuple[float, ...]:
    return (math.inf,) if spec.noiseless else tuple(spec.snr_db_list)


# --------------------------------------------------------------------------
# perfect beam alignment probability


def _ba_methods(spec: ExperimentSpec) -> list[str]:
    return [m for m in spec.methods if m != "full-csi"]


def _ba_trial(spec: ExperimentSpec, trial: int) -> list[bool]:
    methods = _ba_methods(spec)
    snrs = _snr_points(spec)
    seeds = trial_seeds(spec.seed, trial, 1 + len(snrs) * len(methods))
    if spec.combinatorial:
        return [combinatorial_trial(spec.system, spec.system.rounds, np.random.default_rng(seeds[0]))[0]]
    channel = draw_channel(spec.channel, np.random.default_rng(seeds[0]))
    truth = channel.truth
    out = []
    for a, snr in enumerate(snrs):
        cfg = spec.sounding(snr)
        for b, method in enumerate(methods):
            rng = np.random.default_rng(seeds[1 + a * len(methods) + b])
            out.append(run_method(method, channel, spec.system, cfg, rng).chosen == truth)
    return out


def run_ba_probability(spec: ExperimentSpec) -> list[ResultRow]:
    """Fraction of trials in which each method recovers the dominant tuple exactly.

    Channels must be on-grid so that exact index equality is meaningful.
    ``spec.combinatorial`` skips channels entirely: the dominant block is drawn
    uniformly and every round's winning bin is the one that holds it.
    """
    if spec.trials < 1:
        raise ValueError("trials must be >= 1")
    methods = _ba_methods(spec)
    if not methods:
        raise ConfigurationError("ba-prob needs at least one beam training method")
    if spec.combinatorial:
        # other methods need channels; only the binning decoder is simulated here
        if "multidirectional" not in methods or not spec.noiseless:
            raise ConfigurationError("combinatorial mode covers noiseless multidirectional only")
        keys = [(math.inf, "multidirectional")]
    else:
        if not spec.channel.on_grid:
            raise ConfigurationError("perfect-alignment experiments need on-grid channels")
        keys = [(snr, m) for snr in _snr_points(spec) for m in methods]
    hits = np.array(map_trials(_ba_trial, spec), dtype=float)  # (trials, len(keys))
    rows = []
    for col, (snr, method) in enumerate(keys):
        p = float(hits[:, col].mean())
        rows.append(
            ResultRow(
                method=method,
                system=spec.system,
                snr_db=snr,
                slots_used=overhead(method, spec.system).slots,
                metric="perfect_ba_rate",
                value=p,
                stderr=math.sqrt(p * (1.0 - p) / spec.trials),
                trials=spec.trials,
            )
        )
    return rows


# --------------------------------------------------------------------------
# achievable rate curves


def rate_variants(spec: ExperimentSpec) -> list[tuple[str, str, int]]:
    """``(label, method, repetitions)`` for every curve of a rate experiment.

    Hierarchical search gets a second, energy-accumulating curve when
    ``hier_budget_slots`` is set: each measurement is repeated
    ``hier_budget_slots // native_slots`` times.
    """
    out = []
    for method in spec.methods:
        out.append((method, method, 1))
        if method == "hierarchical" and spec.hier_budget_slots:
            native = overhead("hierarchical", spec.system).slots
            reps = max(1, spec.hier_budget_slots // native)
            out.append(("hierarchical-boosted", method, reps))
    return out


def _rate_trial(spec: ExperimentSpec, trial: int) -> np.ndarray:
    variants = rate_variants(spec)
    snrs = tuple(spec.snr_db_list)
    seeds = trial_seeds(spec.seed, trial, 1 + len(snrs) * len(variants))
    channel = draw_channel(spec.channel, np.random.default_rng(seeds[0]))
    flat, _ = _codebooks(spec.system)
    rates = np.zeros((len(snrs), len(variants)))
    baseline = None
    for a, snr in enumerate(snrs):
        for b, (label, method, reps) in enumerate(variants):
            if method == "full-csi":
                if baseline is None:
                    baseline = full_csi_baseline(channel, snr)
                rates[a, b] = achievable_rate(channel, baseline.f, baseline.v, baseline.w, snr)
                continue
            cfg = spec.sounding(snr)
            if reps > 1:
                cfg = SoundingConfig(snr_db=cfg.snr_db, repetitions=reps, noiseless=cfg.noiseless)
            rng = np.random.default_rng(seeds[1 + a * len(variants) + b])
            chosen = run_method(method, channel, spec.system, cfg, rng).chosen
            rates[a, b] = achievable_rate(channel, *tuple_beams(flat, chosen), snr)
    return rates


def rate_samples(spec: ExperimentSpec) -> np.ndarray:
    """Per-trial rates, shape ``(trials, n_snr, n_variants)``."""
    return np.stack(map_trials(_rate_trial, spec))


def run_rate_curve(spec: ExperimentSpec, samples: np.ndarray | None = None) -> list[ResultRow]:
    """Average achievable rate of every method at every SNR, evaluated at the training SNR."""
    if not spec.snr_db_list:
        raise ValueError("rate-curve needs a nonempty snr_db_list")
    if samples is None:
        samples = rate_samples(spec)
    n = samples.shape[0]
    rows = []
    for a, snr in enumerate(spec.snr_db_list):
        for b, (label, method, reps) in enumerate(rate_variants(spec)):
            x = samples[:, a, b]
            slots = 0 if method == "full-csi" else overhead(method, spec.system, repetitions=reps).slots
            rows.append(
                ResultRow(
                    method=label,
                    system=spec.system,
                    snr_db=snr,
                    slots_used=slots,
                    metric=SURROGATE_METRIC if method == "full-csi" else "avg_rate_bps_hz",
                    value=float(x.mean()),
                    stderr=float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
                    trials=n,
                )
            )
    return rows


# --------------------------------------------------------------------------
# predict and the decoding walk-through


def run_predict(spec: ExperimentSpec) -> str:
    pred = predict_success(spec.system)
    try:
        needed = str(required_rounds(spec.system, spec.target).rounds)
    except ConfigurationError:
        needed = "unreachable"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PREDICT_HEADER)
    writer.writerow([_fmt(pred.lam), _fmt(pred.p_union), _fmt(pred.p_poisson), needed])
    return buf.getvalue()


# dominant block of the toy example; printed in (BS, RIS, UE) cube order as (5, 4, 2)
TOY_TRUTH = BeamTuple(bs_index=5, ue_index=2, ris_index=4)


@dataclass(frozen=True)
class DecodeTrace:
    truth: BeamTuple
    winners: tuple[int, ...]
    winners_contain_truth: tuple[bool, ...]
    chosen: BeamTuple
    candidates_remaining: int
    text: str

    def __str__(self) -> str:
        return self.text


def _cube(t: BeamTuple) -> str:
    return f"({t.bs_index}, {t.ris_index}, {t.ue_index})"


def run_decode_demo(spec: ExperimentSpec, truth: BeamTuple = TOY_TRUTH) -> DecodeTrace:
    """Walk through binning, scanning and intersection decoding on one LOS channel."""
    system = spec.system
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    channel = los_channel(system.n_t, system.n_r, system.ris_shape, truth)
    flat, _ = _codebooks(system)
    cfg = spec.sounding(spec.snr_db_list[0] if spec.snr_db_list else 0.0)
    plan = make_binning_plan(system, system.rounds, rng)
    lines = [
        f"cube N_t x M x N_r = {system.n_t} x {system.m} x {system.n_r}, "
        f"groups R_BS={system.r_bs} Q={system.q} R_UE={system.r_ue}, "
        f"S = {plan.bins_per_round} bins per round, L = {plan.rounds} rounds",
        f"dominant block (BS, RIS, UE) = {_cube(truth)}",
    ]
    winners, contains = [], []
    for l in range(plan.rounds):
        out = scan_round(channel, flat, plan, l, cfg, rng, system.ris_beam_mode)
        winners.append(out.winning_bin)
        bs, ue, ris = plan.bin_members(l, out.winning_bin)
        hit = plan.bin_of(l, truth) == out.winning_bin
        contains.append(hit)
        lines.append(f"round {l + 1}:")
        for b in range(plan.bins_per_round):
            mb, mu, mr = plan.bin_members(l, b)
            mark = " <= strongest" if b == out.winning_bin else ""
            lines.append(
                f"  bin {b:3d}: BS {sorted(mb.tolist())} RIS {sorted(mr.tolist())} "
                f"UE {sorted(mu.tolist())} energy {out.energies[b]:.4g}{mark}"
            )
        alive = survivors_after(plan, winners)
        lines.append(
            f"  intersection so far: BS {alive[0].tolist()} RIS {alive[2].tolist()} "
            f"UE {alive[1].tolist()} ({math.prod(a.size for a in alive)} candidates)"
        )
        empty = _empty_axes(plan, winners)
        if empty:
            lines.append(f"  no common index on {', '.join(empty)}: majority fallback")
    chosen, remaining = intersect_decode(plan, winners, rng)
    lines.append(f"decoded block (BS, RIS, UE) = {_cube(chosen)}, candidates remaining = {remaining}")
    return DecodeTrace(
        truth=truth,
        winners=tuple(winners),
        winners_contain_truth=tuple(contains),
        chosen=chosen,
        candidates_remaining=remaining,
        text="\n".join(lines) + "\n",
    )


def _empty_axes(plan: BinningPlan, winners: Sequence[int]) -> list[str]:
    groups = np.unravel_index(np.asarray(winners, dtype=int), plan.groups_per_axis)
    names = ("BS", "UE", "RIS")
    return [
        names[a]
        for a in range(3)
        if not np.any(np.all(plan.group_of[a][: len(winners)] == groups[a][:, None], axis=0))
    ]


def survivors_after(plan: BinningPlan, winners: Sequence[int]):
    """Per-axis survivors using only the rounds scanned so far."""
    k = len(winners)
    partial = BinningPlan(
        sizes=plan.sizes,
        group_sizes=plan.group_sizes,
        permutations=tuple(p[:k] for p in plan.permutations),
    )
    return survivors(partial, winners)
