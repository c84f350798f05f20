"""Training overhead formulas and the noiseless success probability of random binning.

Success model: with error-free bin detection the dominant block survives
every round. Another block survives a round only if, on every axis where it
differs from the dominant block, it landed in the same group. For a single
differing index on axis ``a`` that happens with probability
``p_a = (R_a - 1)/(N_a - 1)`` per round, independently across rounds and
axes. The expected number of surviving impostors is therefore

    lam = sum over nonempty axis subsets D of prod_{a in D} (N_a - 1) * p_a**L

and with the uniform pick among survivors, treating the impostor count as
Poisson, the success probability is ``E[1/(1+X)] = (1 - exp(-lam))/lam``.

The exact value is also available: per axis, the number of other indices
still sharing the dominant index's group after each round is a Markov chain
with hypergeometric steps, and the axes are independent.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

from risbeam.errors import ConfigurationError
from risbeam.system import SystemConfig
from risbeam.training import hierarchical_stage_sizes


class Method(str, enum.Enum):
    EXHAUSTIVE = "exhaustive"
    HIERARCHICAL = "hierarchical"
    MULTIDIRECTIONAL = "multidirectional"


@dataclass(frozen=True)
class OverheadReport:
    method: Method
    slots: int
    formula: str


def overhead(
    method: Method | str,
    system: SystemConfig,
    rounds: int | None = None,
    repetitions: int = 1,
) -> OverheadReport:
    """Number of training time slots a method needs for ``system``.

    ``repetitions`` multiplies every measurement (energy accumulation).
    """
    method = Method(method)
    n_t, n_r, m = system.sizes
    if method is Method.EXHAUSTIVE:
        slots = n_t * n_r * m
        formula = f"N_t*N_r*M = {n_t}*{n_r}*{m}"
    elif method is Method.HIERARCHICAL:
        c = system.branching
        stages = hierarchical_stage_sizes(system.sizes, c)
        slots = sum(stages)
        approx = c**3 * math.log(max(system.sizes), c)
        formula = f"sum of per-stage products {stages} = {slots} (C^3*log_C max = {approx:g})"
    else:
        rounds = system.rounds if rounds is None else rounds
        s = system.bins_per_round
        slots = s * rounds
        formula = (
            f"S*L = N_t*N_r*M*L/(R_BS*R_UE*Q) = {n_t}*{n_r}*{m}*{rounds}/"
            f"({system.r_bs}*{system.r_ue}*{system.q})"
        )
    if repetitions != 1:
        slots *= repetitions
        formula += f" x {repetitions} repetitions"
    return OverheadReport(method=method, slots=slots, formula=formula)


@dataclass(frozen=True)
class SuccessPrediction:
    """``p_exact``/``p_unique``: exact success and exact single-candidate probabilities."""

    lam: float
    p_union: float
    p_poisson: float
    p_exact: float
    p_unique: float


def same_group_probability(n: int, r: int) -> float:
    """Chance that a given other index shares the dominant index's group in one round."""
    return 0.0 if n == 1 else (r - 1) / (n - 1)


def expected_impostors(system: SystemConfig, rounds: int) -> float:
    system.check_divisibility()
    terms = [
        (n - 1) * same_group_probability(n, r) ** rounds
        for n, r in zip(system.sizes, system.group_sizes)
    ]
    return sum(
        math.prod(terms[a] for a in subset)
        for k in (1, 2, 3)
        for subset in itertools.combinations(range(3), k)
    )


def predict_success(system: SystemConfig, rounds: int | None = None) -> SuccessPrediction:
    """Noiseless success probability of the multi-directional decoder."""
    rounds = system.rounds if rounds is None else rounds
    if rounds < 1:
        raise ConfigurationError("rounds must be >= 1")
    lam = expected_impostors(system, rounds)
    p_poisson = 1.0 if lam == 0 else -math.expm1(-lam) / lam
    p_exact = p_unique = 1.0
    for n, r in zip(system.sizes, system.group_sizes):
        pmf = survivor_distribution(n, r, rounds)
        p_exact *= sum(p / (1 + k) for k, p in enumerate(pmf))
        p_unique *= pmf[0]
    return SuccessPrediction(
        lam=lam,
        p_union=max(0.0, 1.0 - lam),
        p_poisson=p_poisson,
        p_exact=p_exact,
        p_unique=p_unique,
    )


def survivor_distribution(n: int, r: int, rounds: int) -> list[float]:
    """Distribution of how many of the other ``n-1`` indices share every winning group.

    Round one leaves the ``r-1`` group mates; in each later round the
    dominant index's ``r-1`` new mates are a uniform draw from the other
    ``n-1`` indices, so ``k`` survivors become ``Hypergeom(n-1, k, r-1)``.
    """
    if n == 1:
        return [1.0]
    pmf = [0.0] * r
    pmf[r - 1] = 1.0
    total = math.comb(n - 1, r - 1)
    for _ in range(rounds - 1):
        nxt = [0.0] * r
        for k, p in enumerate(pmf):
            if p == 0.0:
                continue
            for j in range(min(k, r - 1) + 1):
                nxt[j] += p * math.comb(k, j) * math.comb(n - 1 - k, r - 1 - j) / total
        pmf = nxt
    return pmf


@dataclass(frozen=True)
class RoundsRequirement:
    rounds: int
    p_poisson: float
    log_reference: float


def required_rounds(system: SystemConfig, target: float, max_rounds: int = 256) -> RoundsRequirement:
    """Smallest ``L`` whose predicted success reaches ``target``.

    Also reports ``log2 max(N_t, N_r, M)``, the order of growth of ``L``.
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target probability must lie in (0, 1), got {target}")
    ref = math.log2(max(system.sizes))
    for rounds in range(1, max_rounds + 1):
        p = predict_success(system, rounds).p_poisson
        if p >= target:
            return RoundsRequirement(rounds=rounds, p_poisson=p, log_reference=ref)
    raise ConfigurationError(f"target {target} not reached within {max_rounds} rounds")
