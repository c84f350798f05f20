"""Acceptance gate. Each test prints exactly one PASS/FAIL line for its criterion.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines appear even
when pytest captures output.
"""

import functools
import itertools
import math
import time

import numpy as np
import pytest

from risbeam.analysis import overhead, predict_success
from risbeam.channel import ChannelConfig, cascaded_gain, draw_channel, los_channel
from risbeam.config import build_spec
from risbeam.geometry import dft_codebook
from risbeam.harness import (
    TOY_TRUTH,
    full_csi_baseline,
    rate_samples,
    rate_variants,
    rows_to_csv,
    run_ba_probability,
    run_decode_demo,
)
from risbeam.system import SystemConfig
from risbeam.training import intersect_decode, make_binning_plan, noiseless_winners, survivors

from mc_support import SMALL_CUBES, decode_stats

TABLE = (
    # (r_bs, r_ue, q, rounds, published success)
    (8, 4, 16, 4, 0.9576),
    (4, 4, 32, 4, 0.9700),
    (4, 4, 32, 5, 0.9964),
)
BIG = dict(n_t=32, n_r=32, m_y=16, m_z=16)
TABLE_TRIALS = 100_000


def report(capsys, label: str, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    assert ok, detail


@functools.lru_cache(maxsize=None)
def table_rate(r_bs, r_ue, q, rounds):
    values = dict(BIG, r_bs=r_bs, r_ue=r_ue, q=q, rounds=rounds, methods=("multidirectional",))
    spec = build_spec("ba-prob", values, trials=TABLE_TRIALS, noiseless=True, combinatorial=True, seed=20_240)
    return run_ba_probability(spec)[0]


def test_c1_overhead_exactness(capsys):
    start = time.perf_counter()
    got = (
        overhead("exhaustive", SystemConfig(**BIG)).slots,
        overhead("hierarchical", SystemConfig(**BIG, branching=2)).slots,
        overhead("multidirectional", SystemConfig(**BIG, r_bs=4, r_ue=4, q=32, rounds=4)).slots,
        overhead("multidirectional", SystemConfig(**BIG, r_bs=4, r_ue=4, q=32, rounds=5)).slots,
    )
    elapsed = time.perf_counter() - start
    want = (262144, 46, 2048, 2560)
    report(capsys, "C1 overhead exactness", got == want and elapsed < 1.0, f"got {got}, want {want}, {elapsed * 1e3:.1f} ms")


def test_c2_table_replication(capsys):
    parts, ok = [], True
    for r_bs, r_ue, q, rounds, published in TABLE:
        row = table_rate(r_bs, r_ue, q, rounds)
        good = abs(row.value - published) <= 0.005
        ok &= good
        parts.append(f"R=({r_bs},{r_ue},{q}) L={rounds}: {row.value:.4f} vs {published:.4f}")
    report(capsys, "C2 perfect-alignment rates over 1e5 noiseless trials (tol 0.5 pp)", ok, "; ".join(parts))


def test_c3_analytic_vs_empirical(capsys):
    parts, ok = [], True
    for r_bs, r_ue, q, rounds, _ in TABLE:
        emp = table_rate(r_bs, r_ue, q, rounds).value
        pred = predict_success(SystemConfig(**BIG, r_bs=r_bs, r_ue=r_ue, q=q, rounds=rounds)).p_poisson
        ok &= abs(pred - emp) <= 0.003
        parts.append(f"{pred:.4f}/{emp:.4f}")
    worst = 0.0
    for cube in SMALL_CUBES:
        stats = decode_stats(cube, 100_000)
        pred = predict_success(SystemConfig(*cube)).p_poisson
        gap = abs(pred - stats.success)
        ok &= gap <= max(0.01, 3 * stats.stderr)
        worst = max(worst, gap)
    detail = f"table p_poisson/empirical {', '.join(parts)} (tol 0.3 pp); small-cube worst gap {100 * worst:.2f} pp over {len(SMALL_CUBES)} configs"
    report(capsys, "C3 analytic vs empirical", ok, detail)


def test_c4_quadratic_scaling(capsys):
    powers = {}
    for m in (16, 64, 256):
        shape = (int(math.isqrt(m)), int(math.isqrt(m)))
        truth = (3, 1, m // 2 + 1)
        ch = los_channel(8, 2, shape, truth)
        cb = ch.codebooks
        gain = cascaded_gain(ch, cb.bs.column(truth[0]), cb.ris.column(truth[2]), cb.ue.column(truth[1]))
        powers[m] = abs(gain) ** 2
    errs = [abs(powers[a] / powers[b] / (a / b) ** 2 - 1) for a, b in itertools.combinations(powers, 2)]
    report(capsys, "C4 received power scales as M^2 (tol 1e-6)", max(errs) <= 1e-6, f"max relative error {max(errs):.2e}")


FIG5 = dict(
    n_t=32, n_r=1, m_y=8, m_z=8, r_bs=8, r_ue=1, q=16, rounds=4,
    rician_br_db=13.2, rician_ru_db=13.2,
    snr_db_list=(-15.0, -10.0, -5.0, 0.0, 5.0),
    methods=("full-csi", "exhaustive", "multidirectional", "hierarchical"),
    hier_budget_slots=1024,
)


def _paired_ok(hi: np.ndarray, lo: np.ndarray) -> tuple[bool, float]:
    """``mean(hi) >= mean(lo)`` within two standard errors of the paired difference."""
    d = hi - lo
    se = d.std(ddof=1) / math.sqrt(d.size)
    return bool(d.mean() + 2 * se >= 0), float(d.mean())


def test_c5_rate_curve_ordering(capsys):
    spec = build_spec("rate-curve", FIG5, trials=2000, seed=5)
    samples = rate_samples(spec)  # (trials, snr, variant)
    col = {label: i for i, (label, _, _) in enumerate(rate_variants(spec))}
    chain = ("full-csi", "exhaustive", "multidirectional", "hierarchical")
    broken = []
    for a, snr in enumerate(spec.snr_db_list):
        for hi, lo in zip(chain, chain[1:]):
            ok, gap = _paired_ok(samples[:, a, col[hi]], samples[:, a, col[lo]])
            if not ok:
                broken.append(f"{hi}<{lo} at {snr:g} dB ({gap:+.2f})")
    flat = []
    for label, b in col.items():
        for a in range(len(spec.snr_db_list) - 1):
            ok, gap = _paired_ok(samples[:, a + 1, b], samples[:, a, b])
            if not ok:
                flat.append(f"{label} {spec.snr_db_list[a]:g}->{spec.snr_db_list[a + 1]:g}")
    boost = [
        f"{snr:g} dB"
        for a, snr in enumerate(spec.snr_db_list)
        if not _paired_ok(samples[:, a, col["hierarchical-boosted"]], samples[:, a, col["hierarchical"]])[0]
    ]
    means = samples.mean(axis=0)
    curve = " | ".join(
        f"{snr:g} dB " + " ".join(f"{label}={means[a, b]:.2f}" for label, b in col.items())
        for a, snr in enumerate(spec.snr_db_list)
    )
    detail = (
        f"ordering violations {broken or 'none'}; non-monotone {flat or 'none'}; "
        f"boost not dominating at {boost or 'none'}; means: {curve}"
    )
    report(capsys, "C5 reduced rate curves", not (broken or flat or boost), detail)


def test_c6_property_suites(capsys):
    failures = []
    for n in (1, 4, 32, 256):
        v = dft_codebook("bs", n).vectors
        if not np.allclose(v.conj().T @ v, np.eye(n), atol=1e-10):
            failures.append(f"bs {n} not unitary")
    for shape in ((4, 4), (16, 16), (8, 2)):
        v = dft_codebook("ris", shape).vectors
        m = v.shape[0]
        if not (np.allclose(np.abs(v), 1, atol=1e-10) and np.allclose(np.abs(v.conj().T @ v) / m, np.eye(m), atol=1e-8)):
            failures.append(f"ris {shape} not orthogonal/unit-modulus")

    rng = np.random.default_rng(6)
    cubes = [(4, 4, 4, 1, 2, 2, 2), (8, 4, 8, 1, 4, 2, 2), (16, 16, 16, 1, 4, 4, 8), (16, 2, 4, 4, 8, 1, 4)]
    for trial in range(200):
        system = SystemConfig(*cubes[trial % len(cubes)])
        rounds = int(rng.integers(1, 5))
        plan = make_binning_plan(system, rounds, rng)
        if trial < 20:
            for l in range(rounds):
                count = np.zeros(system.sizes, dtype=int)
                for b in range(plan.bins_per_round):
                    for blk in itertools.product(*plan.bin_members(l, b)):
                        count[blk] += 1
                if not np.all(count == 1):
                    failures.append("bins do not partition the cube")
        if trial % 2:
            winners = noiseless_winners(plan, tuple(int(rng.integers(n)) for n in system.sizes))
        else:
            winners = tuple(int(w) for w in rng.integers(plan.bins_per_round, size=rounds))
        brute = set.intersection(*(set(itertools.product(*plan.bin_members(l, w))) for l, w in enumerate(winners)))
        fast = set(itertools.product(*(a.tolist() for a in survivors(plan, winners))))
        if brute and brute != fast:
            failures.append("decoder disagrees with block-set intersection")
        if brute and intersect_decode(plan, winners, rng)[1] != len(brute):
            failures.append("candidate count mismatch")

    los = dict(n_t=8, n_r=4, m_y=4, m_z=2, rician_br_db=math.inf, rician_ru_db=math.inf, nlos_paths_br=0, nlos_paths_ru=0, methods=("exhaustive",))
    exh = run_ba_probability(build_spec("ba-prob", los, trials=10_000, noiseless=True, seed=1))[0].value
    if exh != 1.0:
        failures.append(f"noiseless exhaustive success {exh}")

    rate_cfg = dict(snr_db_list=(-5.0, 5.0), methods=("full-csi", "exhaustive", "hierarchical", "multidirectional"))
    spec = build_spec("rate-curve", rate_cfg, trials=60, seed=2)
    samples = rate_samples(spec)
    if not np.all(samples[:, :, :1] >= samples[:, :, 1:] - 1e-9):
        failures.append("full-CSI baseline beaten on some trial")
    crng = np.random.default_rng(3)
    for _ in range(30):
        h = np.array(full_csi_baseline(draw_channel(ChannelConfig(8, 4, 4, 2, 0.0, 0.0), crng), 0.0).objective_history)
        if np.any(np.diff(h) < -1e-12 * h[:-1]):
            failures.append("baseline objective decreased")

    one = rows_to_csv(run_ba_probability(build_spec("ba-prob", {}, trials=40, seed=9, workers=1)))
    two = rows_to_csv(run_ba_probability(build_spec("ba-prob", {}, trials=40, seed=9, workers=2)))
    if one != two:
        failures.append("CSV depends on worker count")
    report(capsys, "C6 property suites", not failures, "; ".join(failures) or "all properties hold")


def test_c7_decode_demo(capsys):
    # the walk-through is noiseless; noisy runs are only reported, since a
    # wrong bin can leave a single wrong candidate
    bad_traces = unique_traces = 0
    noisy_unique = noisy_wrong = 0
    for seed in range(40):
        trace = run_decode_demo(build_spec("decode-demo", {}, seed=seed, noiseless=True))
        if trace.candidates_remaining == 1:
            unique_traces += 1
            if trace.chosen != TOY_TRUTH or not trace.text.rstrip().endswith("(5, 4, 2), candidates remaining = 1"):
                bad_traces += 1
        noisy = run_decode_demo(build_spec("decode-demo", {}, seed=seed))
        if noisy.candidates_remaining == 1:
            noisy_unique += 1
            noisy_wrong += noisy.chosen != TOY_TRUTH
    toy = SystemConfig(8, 4, 8, 1, r_bs=4, r_ue=2, q=2, rounds=3)
    rng = np.random.default_rng(33)
    draws = 10_000
    unique = hits = 0
    for _ in range(draws):
        plan = make_binning_plan(toy, 3, rng)
        chosen, remaining = intersect_decode(plan, noiseless_winners(plan, TOY_TRUTH), rng)
        unique += remaining == 1
        hits += chosen == TOY_TRUTH
    pred = predict_success(toy)
    gap = abs(unique / draws - pred.p_unique)
    ok = bad_traces == 0 and unique_traces > 0 and gap <= 0.01
    detail = (
        f"{unique_traces} noiseless single-candidate traces, {bad_traces} not ending at (5,4,2) "
        f"(0 dB: {noisy_wrong} of {noisy_unique} wrong); "
        f"uniqueness {unique / draws:.4f} vs predicted {pred.p_unique:.4f}; "
        f"decoded correctly {hits / draws:.4f} vs p_poisson {pred.p_poisson:.4f}"
    )
    report(capsys, "C7 toy decoding walk-through", ok, detail)
