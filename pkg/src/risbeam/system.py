"""System dimensions shared by the training algorithms and the analysis."""

from __future__ import annotations

from dataclasses import dataclass

from risbeam.errors import ConfigurationError
from risbeam.geometry import BeamMode


@dataclass(frozen=True)
class SystemConfig:
    """Array sizes, simultaneous-beam counts and scan parameters.

    ``r_bs``/``r_ue``/``q`` are the numbers of beams the BS, the user and the
    RIS form at once in a multi-directional slot; ``rounds`` is the number of
    batch-mode scanning rounds and ``branching`` the hierarchical tree arity.
    """

    n_t: int
    n_r: int
    m_y: int
    m_z: int
    r_bs: int = 1
    r_ue: int = 1
    q: int = 1
    rounds: int = 4
    branching: int = 2
    ris_beam_mode: BeamMode = BeamMode.PHASE_ONLY

    def __post_init__(self):
        for name in ("n_t", "n_r", "m_y", "m_z", "r_bs", "r_ue", "q", "rounds"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1, got {getattr(self, name)}")
        object.__setattr__(self, "ris_beam_mode", BeamMode(self.ris_beam_mode))

    @property
    def m(self) -> int:
        return self.m_y * self.m_z

    @property
    def ris_shape(self) -> tuple[int, int]:
        return (self.m_y, self.m_z)

    @property
    def sizes(self) -> tuple[int, int, int]:
        return (self.n_t, self.n_r, self.m)

    @property
    def group_sizes(self) -> tuple[int, int, int]:
        return (self.r_bs, self.r_ue, self.q)

    def check_divisibility(self) -> None:
        for axis, n, r in zip(("BS (n_t / r_bs)", "UE (n_r / r_ue)", "RIS (m / q)"), self.sizes, self.group_sizes):
            if r > n or n % r:
                raise ConfigurationError(f"{axis}: group size {r} does not divide {n}")

    @property
    def groups_per_axis(self) -> tuple[int, int, int]:
        self.check_divisibility()
        return tuple(n // r for n, r in zip(self.sizes, self.group_sizes))

    @property
    def bins_per_round(self) -> int:
        a, b, c = self.groups_per_axis
        return a * b * c

