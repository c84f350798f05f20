"""Beam training: exhaustive, hierarchical and multi-directional search.

Every algorithm returns a :class:`TrainingResult` whose ``slots_used`` is the
number of time slots actually sounded, counted by a :class:`Probe`.

The multi-directional scheme groups each axis' beam indices into chunks of
``r_bs``, ``r_ue`` and ``q`` after a random permutation; a bin is the
Cartesian product of one chunk per axis and is sensed in a single slot with
multi-beam vectors. After ``L`` rounds with fresh permutations the dominant
block is recovered as the intersection of the winning bins, which for
product-set bins factorizes into per-axis intersections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from risbeam.channel import BeamTuple, ChannelRealization, Codebooks, product_gains
from risbeam.errors import ConfigurationError
from risbeam.geometry import (
    BeamMode,
    HierarchicalCodebook,
    hierarchical_codebook,
    multi_beam,
    tree_depth,
)
from risbeam.sounding import Probe, SoundingConfig
from risbeam.system import SystemConfig


@dataclass(frozen=True)
class TrainingResult:
    chosen: BeamTuple
    slots_used: int
    method: str
    candidates_remaining: int = 1
    winners: tuple[int, ...] = ()


def _first_argmax(x: np.ndarray) -> tuple[int, ...]:
    flat = int(np.argmax(x))
    return tuple(int(i) for i in np.unravel_index(flat, x.shape))


# --------------------------------------------------------------------------
# exhaustive search


def exhaustive_search(
    channel: ChannelRealization,
    codebooks: Codebooks,
    cfg: SoundingConfig,
    rng: np.random.Generator,
) -> TrainingResult:
    """Sound all ``N_t*N_r*M`` single-beam triples once and keep the strongest."""
    probe = Probe(channel, cfg, rng)
    gains = product_gains(channel, codebooks.bs.vectors, codebooks.ris.vectors, codebooks.ue.vectors)
    energy = probe.measure_gains(gains).reshape(gains.shape)
    return TrainingResult(
        chosen=BeamTuple(*_first_argmax(energy)),
        slots_used=probe.slots,
        method="exhaustive",
    )


# --------------------------------------------------------------------------
# hierarchical search


@dataclass(frozen=True, eq=False)
class HierarchicalCodebooks:
    bs: HierarchicalCodebook
    ue: HierarchicalCodebook
    ris: HierarchicalCodebook

    @classmethod
    def build(cls, system: SystemConfig) -> "HierarchicalCodebooks":
        c = system.branching
        return cls(
            bs=hierarchical_codebook("bs", system.n_t, c),
            ue=hierarchical_codebook("ue", system.n_r, c),
            ris=hierarchical_codebook("ris", system.ris_shape, c, ris_mode=system.ris_beam_mode),
        )

    def axes(self) -> tuple[HierarchicalCodebook, HierarchicalCodebook, HierarchicalCodebook]:
        return (self.bs, self.ue, self.ris)


def hierarchical_stage_sizes(sizes, branching: int) -> list[int]:
    """Beam tuples per stage: ``C`` per axis that still has layers left."""
    depths = [tree_depth(n, branching) for n in sizes]
    return [branching ** sum(d > s for d in depths) for s in range(max(depths, default=0))]


def hierarchical_search(
    channel: ChannelRealization,
    codebooks: HierarchicalCodebooks,
    cfg: SoundingConfig,
    rng: np.random.Generator,
) -> TrainingResult:
    """Descend the three trees together, one layer per stage.

    At each stage every axis with layers left offers its ``C`` children, the
    product of these candidate sets is sounded, and the strongest tuple picks
    one child per active axis. Axes whose tree is exhausted stay on their
    resolved leaf beam. User feedback between stages is free.
    """
    probe = Probe(channel, cfg, rng)
    trees = codebooks.axes()
    node = [0, 0, 0]
    depth = max(t.depth for t in trees)
    for stage in range(depth):
        options, beams = [], []
        for t, n in zip(trees, node):
            if stage < t.depth:
                kids = list(t.children(stage - 1, n))
                options.append(kids)
                beams.append(t.layers[stage][:, kids])
            else:
                options.append([n])
                beams.append(t.leaves.vectors[:, [n]])
        gains = product_gains(channel, beams[0], beams[2], beams[1])
        pick = _first_argmax(probe.measure_gains(gains).reshape(gains.shape))
        node = [opts[p] for opts, p in zip(options, pick)]
    return TrainingResult(chosen=BeamTuple(*node), slots_used=probe.slots, method="hierarchical")


# --------------------------------------------------------------------------
# multi-directional search


@dataclass(frozen=True, eq=False)
class BinningPlan:
    """Per-round, per-axis permutations and the resulting product-set bins.

    ``group_of[a][l, i]`` is the chunk holding index ``i`` of axis ``a`` in
    round ``l``; bins are numbered row-major over ``(bs, ue, ris)`` chunks.
    """

    sizes: tuple[int, int, int]
    group_sizes: tuple[int, int, int]
    permutations: tuple[np.ndarray, np.ndarray, np.ndarray]
    group_of: tuple[np.ndarray, np.ndarray, np.ndarray] = field(init=False)

    def __post_init__(self):
        groups = tuple(np.argsort(p, axis=1) // r for p, r in zip(self.permutations, self.group_sizes))
        for g in groups:
            g.setflags(write=False)
        object.__setattr__(self, "group_of", groups)

    @property
    def rounds(self) -> int:
        return self.permutations[0].shape[0]

    @property
    def groups_per_axis(self) -> tuple[int, int, int]:
        return tuple(n // r for n, r in zip(self.sizes, self.group_sizes))

    @property
    def bins_per_round(self) -> int:
        return int(np.prod(self.groups_per_axis))

    def group_members(self, round_index: int, axis: int, group: int) -> np.ndarray:
        r = self.group_sizes[axis]
        return self.permutations[axis][round_index, group * r : (group + 1) * r]

    def bin_groups(self, bin_index: int) -> tuple[int, int, int]:
        return tuple(int(g) for g in np.unravel_index(bin_index, self.groups_per_axis))

    def bin_members(self, round_index: int, bin_index: int) -> tuple[np.ndarray, ...]:
        """Per-axis index sets whose product is the bin."""
        return tuple(
            self.group_members(round_index, a, g) for a, g in enumerate(self.bin_groups(bin_index))
        )

    def bin_of(self, round_index: int, block: tuple[int, int, int]) -> int:
        groups = tuple(int(self.group_of[a][round_index, i]) for a, i in enumerate(block))
        return int(np.ravel_multi_index(groups, self.groups_per_axis))


def make_binning_plan(system: SystemConfig, rounds: int, rng: np.random.Generator) -> BinningPlan:
    """Independent uniform permutations of every axis for every round."""
    system.check_divisibility()
    if rounds < 1:
        raise ConfigurationError("rounds must be >= 1")
    perms = tuple(rng.permuted(np.tile(np.arange(n), (rounds, 1)), axis=1) for n in system.sizes)
    return BinningPlan(sizes=system.sizes, group_sizes=system.group_sizes, permutations=perms)


@dataclass(frozen=True)
class RoundOutcome:
    winning_bin: int
    energies: np.ndarray = field(repr=False)


def _scan(probe: Probe, codebooks: Codebooks, plan: BinningPlan, round_index: int, ris_mode) -> RoundOutcome:
    beams = []
    for axis, cb in enumerate((codebooks.bs, codebooks.ue, codebooks.ris)):
        mode = ris_mode if axis == 2 else BeamMode.AMPLITUDE
        beams.append(
            np.stack(
                [multi_beam(cb, plan.group_members(round_index, axis, g), mode) for g in range(plan.groups_per_axis[axis])],
                axis=1,
            )
        )
    gains = product_gains(probe.channel, beams[0], beams[2], beams[1])
    energies = probe.measure_gains(gains)
    return RoundOutcome(winning_bin=int(np.argmax(energies)), energies=energies)


def scan_round(
    channel: ChannelRealization,
    codebooks: Codebooks,
    plan: BinningPlan,
    round_index: int,
    cfg: SoundingConfig,
    rng: np.random.Generator,
    ris_mode: BeamMode | str = BeamMode.PHASE_ONLY,
) -> RoundOutcome:
    """One batch-mode round: sound all ``S`` bins once, report the strongest."""
    if not 0 <= round_index < plan.rounds:
        raise IndexError(f"round {round_index} outside plan with {plan.rounds} rounds")
    return _scan(Probe(channel, cfg, rng), codebooks, plan, round_index, BeamMode(ris_mode))


def survivors(plan: BinningPlan, winners) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-axis indices lying in the winning group of every round.

    An axis left empty (only possible with noisy winners) falls back to the
    single index that sits in the winning group most often, smallest first.
    """
    winners = np.asarray(winners, dtype=int)
    groups = np.stack(np.unravel_index(winners, plan.groups_per_axis))  # (3, L)
    out = []
    for axis in range(3):
        hits = plan.group_of[axis] == groups[axis][:, None]  # (L, N_a)
        alive = np.flatnonzero(hits.all(axis=0))
        if alive.size == 0:
            alive = np.array([int(np.argmax(hits.sum(axis=0)))])
        out.append(alive)
    return tuple(out)


def intersect_decode(plan: BinningPlan, winners, rng: np.random.Generator) -> tuple[BeamTuple, int]:
    """Common block of the winning bins; ambiguous survivors are broken uniformly at random."""
    if len(winners) != plan.rounds:
        raise ValueError(f"expected {plan.rounds} winners, got {len(winners)}")
    alive = survivors(plan, winners)
    remaining = int(np.prod([a.size for a in alive]))
    if remaining == 1:
        return BeamTuple(*(int(a[0]) for a in alive)), 1
    # independent per-axis picks are uniform over the product set
    return BeamTuple(*(int(a[rng.integers(a.size)]) for a in alive)), remaining


def multidirectional_search(
    channel: ChannelRealization,
    codebooks: Codebooks,
    system: SystemConfig,
    cfg: SoundingConfig,
    rng: np.random.Generator,
    rounds: int | None = None,
) -> TrainingResult:
    rounds = system.rounds if rounds is None else rounds
    plan = make_binning_plan(system, rounds, rng)
    probe = Probe(channel, cfg, rng)
    winners = tuple(
        _scan(probe, codebooks, plan, l, system.ris_beam_mode).winning_bin for l in range(rounds)
    )
    chosen, remaining = intersect_decode(plan, winners, rng)
    return TrainingResult(
        chosen=chosen,
        slots_used=probe.slots,
        method="multidirectional",
        candidates_remaining=remaining,
        winners=winners,
    )


def noiseless_winners(plan: BinningPlan, block) -> tuple[int, ...]:
    """Winning bins under error-free bin detection: the bins holding ``block``."""
    return tuple(plan.bin_of(l, block) for l in range(plan.rounds))


def combinatorial_trial(system: SystemConfig, rounds: int, rng: np.random.Generator) -> tuple[bool, int]:
    """One channel-free trial of binning + decoding with a uniformly drawn dominant block.

    Returns ``(decoded correctly, candidates remaining)``.
    """
    block = tuple(int(rng.integers(n)) for n in system.sizes)
    plan = make_binning_plan(system, rounds, rng)
    chosen, remaining = intersect_decode(plan, noiseless_winners(plan, block), rng)
    return tuple(chosen) == block, remaining
