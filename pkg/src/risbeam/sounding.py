"""Magnitude-only pilot measurements through one beam triple per time slot.

A slot transmits the unit pilot through ``(f, v, w)`` and the user keeps
``|y|**2`` with ``y = sqrt(P)*gain + w^H n``. With ``repetitions > 1`` the
energies of repeated transmissions are averaged (noncoherent accumulation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from risbeam.channel import ChannelRealization, paired_gains


@dataclass(frozen=True)
class SoundingConfig:
    snr_db: float = 0.0
    repetitions: int = 1
    noiseless: bool = False
    pilot_power: float = 1.0

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.pilot_power <= 0:
            raise ValueError("pilot_power must be positive")
        if not self.noiseless and not math.isfinite(self.snr_db):
            raise ValueError("snr_db must be finite unless noiseless is set")

    @property
    def noise_var(self) -> float:
        if self.noiseless:
            return 0.0
        return self.pilot_power * 10.0 ** (-self.snr_db / 10.0)


@dataclass(frozen=True)
class Measurement:
    energy: float


def measure_gains(gains, cfg: SoundingConfig, rng: np.random.Generator) -> np.ndarray:
    """Energies for a batch of slots with known cascade gains."""
    gains = np.atleast_1d(np.asarray(gains, dtype=complex))
    signal = math.sqrt(cfg.pilot_power) * gains
    if cfg.noiseless:
        return np.abs(signal) ** 2
    shape = (gains.size, cfg.repetitions)
    noise = math.sqrt(cfg.noise_var / 2.0) * (
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    )
    return np.mean(np.abs(signal[:, None] + noise) ** 2, axis=1)


def sound(channel: ChannelRealization, f, v, w, cfg: SoundingConfig, rng) -> Measurement:
    gain = paired_gains(channel, np.asarray(f)[:, None], np.asarray(v)[:, None], np.asarray(w)[:, None])
    return Measurement(energy=float(measure_gains(gain, cfg, rng)[0]))


class Probe:
    """Sounds beam triples against one channel and counts the slots spent.

    A measurement with ``repetitions = r`` occupies ``r`` time slots.
    """

    def __init__(self, channel: ChannelRealization, cfg: SoundingConfig, rng: np.random.Generator):
        self.channel = channel
        self.cfg = cfg
        self.rng = rng
        self.slots = 0

    def measure(self, F, V, W) -> np.ndarray:
        return self.measure_gains(paired_gains(self.channel, F, V, W))

    def measure_gains(self, gains) -> np.ndarray:
        """Sound slots whose gains were computed in bulk by the caller."""
        gains = np.asarray(gains).ravel()
        self.slots += gains.size * self.cfg.repetitions
        return measure_gains(gains, self.cfg, self.rng)
