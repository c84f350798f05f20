"""Steering vectors and beam codebooks for the BS, the user and the RIS.

All arrays are half-wavelength spaced. The BS and the user use ULAs; the RIS
is an ``m_y x m_z`` UPA whose response is the Kronecker product of the two
axis responses (y-major element ordering). A beam index on the RIS is the
row-major pair index ``iy * m_z + iz``.

Spatial frequencies live on the DFT grid ``2*pi*k/size`` wrapped into
``[-pi, pi)``; column ``k`` of every codebook points at grid frequency ``k``.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from risbeam.errors import DimensionError

TWO_PI = 2.0 * np.pi


class CodebookKind(str, enum.Enum):
    BS = "bs"
    UE = "ue"
    RIS = "ris"


class BeamMode(str, enum.Enum):
    """How a multi-directional vector is synthesized from codebook columns."""

    AMPLITUDE = "amplitude"
    PHASE_ONLY = "phase_only"


def wrap_frequency(omega):
    """Map spatial frequencies into ``[-pi, pi)``."""
    return np.mod(np.asarray(omega, dtype=float) + np.pi, TWO_PI) - np.pi


def grid_index(omega, size: int):
    """Nearest DFT grid index for a spatial frequency (modulo ``size``)."""
    return np.mod(np.rint(np.asarray(omega, dtype=float) * size / TWO_PI), size).astype(int)


def _check_size(*sizes: int) -> None:
    for s in sizes:
        if int(s) != s or s < 1:
            raise DimensionError(f"array dimension must be a positive integer, got {s!r}")


@dataclass(frozen=True, eq=False)
class SteeringGrid:
    """Quantized spatial frequencies of one array axis, in codebook column order."""

    size: int
    spatial_frequencies: np.ndarray

    @classmethod
    def dft(cls, size: int) -> "SteeringGrid":
        _check_size(size)
        freqs = wrap_frequency(TWO_PI * np.arange(size) / size)
        freqs.setflags(write=False)
        return cls(size=size, spatial_frequencies=freqs)

    def sorted_frequencies(self) -> np.ndarray:
        return np.sort(self.spatial_frequencies)


def ula_steering(size: int, spatial_frequency: float) -> np.ndarray:
    """Unit-norm ULA response ``exp(1j*n*omega)/sqrt(size)``."""
    _check_size(size)
    n = np.arange(size)
    return np.exp(1j * n * spatial_frequency) / np.sqrt(size)


def upa_steering(size_y: int, size_z: int, freq_y: float, freq_z: float) -> np.ndarray:
    """Unit-norm UPA response, y-major Kronecker of the two ULA responses."""
    _check_size(size_y, size_z)
    return np.kron(ula_steering(size_y, freq_y), ula_steering(size_z, freq_z))


@dataclass(frozen=True, eq=False)
class Codebook:
    """Indexed beam vectors stored column-wise (``elements x beams``).

    BS/UE codebooks hold unit-norm orthogonal columns. RIS codebooks hold
    unit-modulus reflection vectors (no ``1/sqrt(M)`` scaling), so that
    ``|c_i^H c_j| = M * delta_ij``.
    """

    kind: CodebookKind
    vectors: np.ndarray
    grids: tuple[SteeringGrid, ...]

    @property
    def n_elements(self) -> int:
        return self.vectors.shape[0]

    @property
    def n_beams(self) -> int:
        return self.vectors.shape[1]

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(g.size for g in self.grids)

    def column(self, k: int) -> np.ndarray:
        return self.vectors[:, k]

    def beam_frequencies(self, k: int) -> tuple[float, ...]:
        """Grid frequencies a beam points at (one per axis)."""
        idx = np.unravel_index(k, self.shape)
        return tuple(float(g.spatial_frequencies[i]) for g, i in zip(self.grids, idx))


def _unitary_dft(size: int) -> np.ndarray:
    n = np.arange(size)
    return np.exp(1j * TWO_PI * np.outer(n, n) / size) / np.sqrt(size)


def dft_codebook(kind: CodebookKind | str, size: int | Sequence[int]) -> Codebook:
    """DFT codebook; ``size`` is an int for BS/UE and ``(m_y, m_z)`` for the RIS."""
    kind = CodebookKind(kind)
    if kind is CodebookKind.RIS:
        if isinstance(size, (int, np.integer)):
            size = (int(size), 1)
        m_y, m_z = size
        _check_size(m_y, m_z)
        vectors = np.kron(_unitary_dft(m_y), _unitary_dft(m_z)) * np.sqrt(m_y * m_z)
        grids = (SteeringGrid.dft(m_y), SteeringGrid.dft(m_z))
    else:
        if not isinstance(size, (int, np.integer)):
            raise DimensionError(f"{kind.value} codebook takes a single size, got {size!r}")
        _check_size(size)
        vectors = _unitary_dft(int(size))
        grids = (SteeringGrid.dft(int(size)),)
    vectors.setflags(write=False)
    return Codebook(kind=kind, vectors=vectors, grids=grids)


def _validate_indices(codebook: Codebook, indices) -> np.ndarray:
    idx = np.asarray(list(indices), dtype=int).ravel()
    if idx.size == 0:
        raise ValueError("multi-beam needs at least one beam index")
    if np.unique(idx).size != idx.size:
        raise ValueError(f"duplicate beam indices in {idx.tolist()}")
    if idx.min() < 0 or idx.max() >= codebook.n_beams:
        raise ValueError(f"beam index out of range [0, {codebook.n_beams})")
    return idx


def phase_project(x: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Unit-modulus vector with the phases of ``x``; (near-)zero entries get phase 0."""
    mag = np.abs(x)
    out = np.exp(1j * np.angle(x))
    out[mag <= tol * max(mag.max(), 1.0)] = 1.0
    return out


def multi_beam(
    codebook: Codebook,
    indices,
    mode: BeamMode | str = BeamMode.AMPLITUDE,
) -> np.ndarray:
    """Synthesize one vector that points at several codebook beams at once.

    Amplitude mode returns ``sum(columns)/sqrt(len(indices))``; for BS/UE
    codebooks this has unit norm. Phase-only mode (RIS only) keeps just the
    per-element phase of a phase-offset column sum, so every entry has
    modulus 1 and a single index returns that column unchanged. Near-zero
    entries of the sum take phase 0.
    """
    mode = BeamMode(mode)
    idx = _validate_indices(codebook, indices)
    if mode is BeamMode.AMPLITUDE:
        return codebook.vectors[:, idx].sum(axis=1) / np.sqrt(idx.size)
    if codebook.kind is not CodebookKind.RIS:
        raise ValueError("phase-only multi-beams are defined for RIS codebooks only")
    sub = np.unravel_index(idx, codebook.shape)
    axes = [np.unique(s) for s in sub]
    if math.prod(a.size for a in axes) == idx.size:
        # rectangular set: project each axis on its own, so whole-axis
        # coverage becomes a flat chirp and a zero on one axis stays local
        parts = []
        for grid, a in zip(codebook.grids, axes):
            cols = np.exp(1j * np.outer(np.arange(grid.size), TWO_PI * a / grid.size))
            parts.append(phase_project(cols @ newman_phases(a.size)))
        return functools.reduce(np.kron, parts)
    weights = np.empty(idx.size, dtype=complex)
    weights[np.argsort(idx, kind="stable")] = newman_phases(idx.size)
    return phase_project(codebook.vectors[:, idx] @ weights)


def newman_phases(count: int) -> np.ndarray:
    """Quadratic phase offsets ``exp(1j*pi*j**2/count)``.

    Equal-phase sums of DFT columns cancel exactly on many elements (e.g.
    columns 0 and M/2 of an M-point grid); offsetting the j-th selected
    column by this phase flattens the sum before projection.
    """
    j = np.arange(count)
    return np.exp(1j * np.pi * j**2 / count)


@dataclass(frozen=True, eq=False)
class HierarchicalCodebook:
    """Multi-resolution codebook built as a C-ary tree over the DFT leaves.

    ``layers[l]`` has ``C**(l+1)`` beams; node ``n`` of layer ``l`` covers the
    contiguous leaves ``coverage[l][n]``. The deepest layer is the DFT codebook.
    """

    kind: CodebookKind
    branching: int
    layers: tuple[np.ndarray, ...]
    coverage: tuple[tuple[range, ...], ...]
    leaves: Codebook

    @property
    def depth(self) -> int:
        return len(self.layers)

    def children(self, layer: int, node: int) -> range:
        """Child node indices in ``layer + 1`` of a node (``layer=-1`` is the root)."""
        c = self.branching
        return range(node * c, node * c + c)

    def beam(self, layer: int, node: int) -> np.ndarray:
        return self.layers[layer][:, node]


def tree_depth(size: int, branching: int) -> int:
    """``log_C(size)``; raises if ``size`` is not a power of ``branching``."""
    if branching < 2:
        raise ValueError(f"branching must be >= 2, got {branching}")
    _check_size(size)
    depth, s = 0, size
    while s % branching == 0:
        s //= branching
        depth += 1
    if s != 1:
        raise ValueError(f"size {size} is not a power of branching factor {branching}")
    return depth


def hierarchical_codebook(
    kind: CodebookKind | str,
    size: int | Sequence[int],
    branching: int = 2,
    ris_mode: BeamMode | str = BeamMode.PHASE_ONLY,
) -> HierarchicalCodebook:
    """Build a hierarchical codebook whose node beams are multi-beams of their leaves.

    BS/UE nodes use amplitude synthesis; RIS nodes use ``ris_mode``.
    """
    kind = CodebookKind(kind)
    leaves = dft_codebook(kind, size)
    n = leaves.n_beams
    depth = tree_depth(n, branching)
    mode = BeamMode(ris_mode) if kind is CodebookKind.RIS else BeamMode.AMPLITUDE
    layers, coverage = [], []
    for level in range(1, depth + 1):
        width = n // branching**level
        cov = tuple(range(j * width, (j + 1) * width) for j in range(branching**level))
        if level == depth:
            beams = np.array(leaves.vectors)
        else:
            beams = np.stack([multi_beam(leaves, r, mode) for r in cov], axis=1)
        beams.setflags(write=False)
        layers.append(beams)
        coverage.append(cov)
    return HierarchicalCodebook(
        kind=kind,
        branching=branching,
        layers=tuple(layers),
        coverage=tuple(coverage),
        leaves=leaves,
    )


def is_power_of(size: int, base: int) -> bool:
    try:
        tree_depth(size, base)
    except ValueError:
        return False
    return True

