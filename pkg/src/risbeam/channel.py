"""Sparse Rician channels for the BS-RIS and RIS-user links.

The B-R channel is ``H1 = sqrt(N_t*M) * sum_l a_l * a_ris(w_l) a_bs(p_l)^H``
(``M x N_t``) and the R-U channel ``H2 = sqrt(M*N_r) * sum_l b_l *
a_ue(t_l) a_ris(s_l)^H`` (``N_r x M``). With unit-norm steering vectors the
LOS entries have modulus 1, so an aligned LOS triple has cascade gain
``M*sqrt(N_t*N_r)`` and the received power grows as ``M**2``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from risbeam.errors import DegenerateChannelError, DimensionError
from risbeam.geometry import (
    TWO_PI,
    Codebook,
    dft_codebook,
    grid_index,
    ula_steering,
    upa_steering,
    wrap_frequency,
)

_NORM_TOL = 1e-8
_PASSIVE_TOL = 1e-9


class BeamTuple(NamedTuple):
    bs_index: int
    ue_index: int
    ris_index: int


@dataclass(frozen=True)
class ChannelConfig:
    n_t: int
    n_r: int
    m_y: int
    m_z: int
    rician_br_db: float = 13.2
    rician_ru_db: float = 13.2
    nlos_paths_br: int = 3
    nlos_paths_ru: int = 3
    on_grid: bool = True

    def __post_init__(self):
        for name in ("n_t", "n_r", "m_y", "m_z"):
            if getattr(self, name) < 1:
                raise DimensionError(f"{name} must be >= 1")
        if self.nlos_paths_br < 0 or self.nlos_paths_ru < 0:
            raise ValueError("NLOS path counts must be >= 0")
        for name in ("rician_br_db", "rician_ru_db"):
            if math.isnan(getattr(self, name)) or getattr(self, name) == -math.inf:
                raise ValueError(f"{name} must be a finite dB value or +inf")

    @property
    def m(self) -> int:
        return self.m_y * self.m_z

    @property
    def ris_shape(self) -> tuple[int, int]:
        return (self.m_y, self.m_z)


def rician_factor(db: float) -> float:
    return math.inf if db == math.inf else 10.0 ** (db / 10.0)


@dataclass(frozen=True, eq=False)
class Codebooks:
    bs: Codebook
    ue: Codebook
    ris: Codebook

    @classmethod
    def dft(cls, n_t: int, n_r: int, ris_shape: tuple[int, int]) -> "Codebooks":
        return cls(
            bs=dft_codebook("bs", n_t),
            ue=dft_codebook("ue", n_r),
            ris=dft_codebook("ris", ris_shape),
        )

    @property
    def sizes(self) -> tuple[int, int, int]:
        return (self.bs.n_beams, self.ue.n_beams, self.ris.n_beams)


@dataclass(frozen=True, eq=False)
class LinkPaths:
    """Paths of one link; index 0 is the LOS path.

    ``depart``/``arrive`` hold spatial frequencies, shape ``(paths,)`` for a
    ULA end and ``(paths, 2)`` for the RIS end.
    """

    gains: np.ndarray
    depart: np.ndarray
    arrive: np.ndarray

    @property
    def n_paths(self) -> int:
        return self.gains.size


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    h1: np.ndarray
    h2: np.ndarray
    paths_br: LinkPaths | None = None
    paths_ru: LinkPaths | None = None
    on_grid: bool = False
    ris_shape: tuple[int, int] = field(default=(1, 1))

    @property
    def n_t(self) -> int:
        return self.h1.shape[1]

    @property
    def n_r(self) -> int:
        return self.h2.shape[0]

    @property
    def m(self) -> int:
        return self.h1.shape[0]

    @functools.cached_property
    def codebooks(self) -> Codebooks:
        return Codebooks.dft(self.n_t, self.n_r, self.ris_shape)

    @functools.cached_property
    def truth(self) -> BeamTuple:
        return ground_truth_tuple(self, self.codebooks)

    def scaled(self, factor: float) -> "ChannelRealization":
        return ChannelRealization(
            h1=self.h1 * factor,
            h2=self.h2 * factor,
            ris_shape=self.ris_shape,
        )


def _ris_response(freqs: np.ndarray, ris_shape) -> np.ndarray:
    return np.stack([upa_steering(*ris_shape, fy, fz) for fy, fz in np.atleast_2d(freqs)], axis=1)


def _ula_response(freqs: np.ndarray, size: int) -> np.ndarray:
    return np.stack([ula_steering(size, f) for f in np.atleast_1d(freqs)], axis=1)


def assemble_channel(
    n_t: int,
    n_r: int,
    ris_shape: tuple[int, int],
    paths_br: LinkPaths,
    paths_ru: LinkPaths,
    on_grid: bool = False,
) -> ChannelRealization:
    m = ris_shape[0] * ris_shape[1]
    a_bs = _ula_response(paths_br.depart, n_t)
    a_ris_in = _ris_response(paths_br.arrive, ris_shape)
    h1 = math.sqrt(n_t * m) * (a_ris_in * paths_br.gains) @ a_bs.conj().T
    a_ris_out = _ris_response(paths_ru.depart, ris_shape)
    a_ue = _ula_response(paths_ru.arrive, n_r)
    h2 = math.sqrt(m * n_r) * (a_ue * paths_ru.gains) @ a_ris_out.conj().T
    return ChannelRealization(
        h1=h1,
        h2=h2,
        paths_br=paths_br,
        paths_ru=paths_ru,
        on_grid=on_grid,
        ris_shape=tuple(ris_shape),
    )


def path_gains(kappa: float, n_nlos: int, rng: np.random.Generator) -> np.ndarray:
    """LOS gain of power ``kappa/(kappa+1)`` with random phase, then NLOS gains."""
    if n_nlos == 0 or kappa == math.inf:
        los_power, n_nlos = 1.0, 0
    else:
        los_power = kappa / (kappa + 1.0)
    los = math.sqrt(los_power) * np.exp(1j * rng.uniform(0.0, TWO_PI))
    if n_nlos == 0:
        return np.array([los])
    var = 1.0 / ((kappa + 1.0) * n_nlos)
    nlos = np.sqrt(var / 2.0) * (rng.standard_normal(n_nlos) + 1j * rng.standard_normal(n_nlos))
    return np.concatenate([[los], nlos])


def _draw_freqs(size: int, count: int, on_grid: bool, rng) -> np.ndarray:
    if on_grid:
        return wrap_frequency(TWO_PI * rng.integers(0, size, count) / size)
    return rng.uniform(-np.pi, np.pi, count)


def draw_channel(config: ChannelConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw one B-R / R-U realization; deterministic given the generator state."""
    gains_br = path_gains(rician_factor(config.rician_br_db), config.nlos_paths_br, rng)
    gains_ru = path_gains(rician_factor(config.rician_ru_db), config.nlos_paths_ru, rng)
    n_br, n_ru = gains_br.size, gains_ru.size
    grid = config.on_grid
    br = LinkPaths(
        gains=gains_br,
        depart=_draw_freqs(config.n_t, n_br, grid, rng),
        arrive=np.stack(
            [_draw_freqs(config.m_y, n_br, grid, rng), _draw_freqs(config.m_z, n_br, grid, rng)],
            axis=1,
        ),
    )
    ru = LinkPaths(
        gains=gains_ru,
        depart=np.stack(
            [_draw_freqs(config.m_y, n_ru, grid, rng), _draw_freqs(config.m_z, n_ru, grid, rng)],
            axis=1,
        ),
        arrive=_draw_freqs(config.n_r, n_ru, grid, rng),
    )
    return assemble_channel(config.n_t, config.n_r, config.ris_shape, br, ru, on_grid=grid)


def los_channel(
    n_t: int,
    n_r: int,
    ris_shape: tuple[int, int],
    truth: BeamTuple | tuple[int, int, int],
) -> ChannelRealization:
    """Unit-gain LOS-only channel whose dominant tuple is ``truth``.

    The BS departure and user arrival sit on the given grid points; the RIS
    is illuminated broadside and re-radiates toward the RRA grid point.
    """
    i, j, k = truth
    ky, kz = np.unravel_index(k, ris_shape)
    one = np.array([1.0 + 0j])
    br = LinkPaths(
        gains=one,
        depart=np.array([TWO_PI * i / n_t]),
        arrive=np.zeros((1, 2)),
    )
    ru = LinkPaths(
        gains=one,
        depart=np.array([[TWO_PI * ky / ris_shape[0], TWO_PI * kz / ris_shape[1]]]),
        arrive=np.array([TWO_PI * j / n_r]),
    )
    return assemble_channel(n_t, n_r, ris_shape, br, ru, on_grid=True)


def _check_unit(vec: np.ndarray, size: int, name: str) -> None:
    if vec.shape[0] != size:
        raise DimensionError(f"{name} has length {vec.shape[0]}, expected {size}")
    norms = np.linalg.norm(vec, axis=0)
    if np.any(np.abs(norms - 1.0) > _NORM_TOL):
        raise ValueError(f"{name} must have unit norm, got {norms}")


def passive(v: np.ndarray) -> np.ndarray:
    """Scale reflection vectors (per column) so no entry exceeds modulus 1."""
    peak = np.abs(v).max(axis=0)
    return np.where(peak > 1.0 + _PASSIVE_TOL, v / np.where(peak > 0, peak, 1.0), v)


def cascaded_gain(channel: ChannelRealization, f, v, w) -> complex:
    """``w^H H2 diag(v) H1 f`` for one beam triple."""
    f, v, w = (np.asarray(x) for x in (f, v, w))
    return complex(paired_gains(channel, f[:, None], v[:, None], w[:, None])[0])


def paired_gains(channel: ChannelRealization, F, V, W) -> np.ndarray:
    """Cascade gains of column-aligned beam triples ``(F[:, s], V[:, s], W[:, s])``."""
    F, V, W = (np.asarray(x) for x in (F, V, W))
    _check_unit(F, channel.n_t, "BS beam")
    _check_unit(W, channel.n_r, "UE beam")
    if V.shape[0] != channel.m:
        raise DimensionError(f"RIS vector has length {V.shape[0]}, expected {channel.m}")
    if not (F.shape[1] == V.shape[1] == W.shape[1]):
        raise DimensionError("beam batches must have the same number of columns")
    V = passive(V)
    left = W.conj().T @ channel.h2  # (S, M)
    right = channel.h1 @ F  # (M, S)
    return np.einsum("sm,ms,ms->s", left, V, right)


def product_gains(channel: ChannelRealization, F, V, W) -> np.ndarray:
    """Gains of every combination of the given beams, shape ``(len F, len W, len V)``.

    ``F``, ``V`` and ``W`` hold BS beams, RIS vectors and UE beams as columns.
    """
    F, V, W = (np.asarray(x) for x in (F, V, W))
    _check_unit(F, channel.n_t, "BS beam")
    _check_unit(W, channel.n_r, "UE beam")
    if V.shape[0] != channel.m:
        raise DimensionError(f"RIS vector has length {V.shape[0]}, expected {channel.m}")
    left = W.conj().T @ channel.h2  # (n_w, M)
    right = channel.h1 @ F  # (M, n_f)
    prod = right.T[:, None, :] * left[None, :, :]  # (n_f, n_w, M)
    return prod @ passive(V)


def all_tuple_gains(channel: ChannelRealization, codebooks: Codebooks) -> np.ndarray:
    """Gains of every single-beam triple, shape ``(N_t, N_r, M)``."""
    if codebooks.sizes != (channel.n_t, channel.n_r, channel.m):
        raise DimensionError(f"codebooks {codebooks.sizes} do not match channel")
    return product_gains(channel, codebooks.bs.vectors, codebooks.ris.vectors, codebooks.ue.vectors)


def _require_energy(channel: ChannelRealization) -> None:
    if not (np.any(channel.h1) and np.any(channel.h2)):
        raise DegenerateChannelError("channel has no energy on one of its links")


def oracle_tuple(channel: ChannelRealization, codebooks: Codebooks) -> tuple[BeamTuple, float]:
    """Noiseless exhaustive argmax of ``|gain|``; ties go to the smallest row-major index."""
    _require_energy(channel)
    mag = np.abs(all_tuple_gains(channel, codebooks))
    flat = int(np.argmax(mag))  # first occurrence wins
    i, j, k = np.unravel_index(flat, mag.shape)
    return BeamTuple(int(i), int(j), int(k)), float(mag.flat[flat])


def ground_truth_tuple(channel: ChannelRealization, codebooks: Codebooks) -> BeamTuple:
    """Grid tuple of the dominant cascade path.

    Single-path on-grid channels are resolved in closed form; anything else
    goes through :func:`oracle_tuple`.
    """
    _require_energy(channel)
    br, ru = channel.paths_br, channel.paths_ru
    if channel.on_grid and br is not None and ru is not None and br.n_paths == ru.n_paths == 1:
        m_y, m_z = channel.ris_shape
        rra = ru.depart[0] - br.arrive[0]
        ris = int(grid_index(rra[0], m_y)) * m_z + int(grid_index(rra[1], m_z))
        return BeamTuple(
            int(grid_index(br.depart[0], channel.n_t)),
            int(grid_index(ru.arrive[0], channel.n_r)),
            ris,
        )
    return oracle_tuple(channel, codebooks)[0]
