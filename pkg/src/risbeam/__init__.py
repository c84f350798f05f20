"""Beam training for RIS-assisted mmWave links.

Exhaustive, hierarchical and multi-directional (random binning) search over
BS/UE/RIS DFT codebooks, with the success analysis of the binning decoder
and a seeded Monte Carlo harness.
"""

from risbeam.analysis import OverheadReport, SuccessPrediction, overhead, predict_success, required_rounds
from risbeam.channel import (
    BeamTuple,
    ChannelConfig,
    ChannelRealization,
    Codebooks,
    cascaded_gain,
    draw_channel,
    ground_truth_tuple,
    los_channel,
    oracle_tuple,
)
from risbeam.errors import ConfigurationError, DegenerateChannelError, DimensionError
from risbeam.geometry import BeamMode, Codebook, CodebookKind, dft_codebook, hierarchical_codebook, multi_beam
from risbeam.sounding import Probe, SoundingConfig, sound
from risbeam.system import SystemConfig
from risbeam.training import (
    BinningPlan,
    HierarchicalCodebooks,
    TrainingResult,
    exhaustive_search,
    hierarchical_search,
    intersect_decode,
    make_binning_plan,
    multidirectional_search,
    scan_round,
)

__all__ = [
    "BeamMode", "BeamTuple", "BinningPlan", "ChannelConfig", "ChannelRealization", "Codebook",
    "CodebookKind", "Codebooks", "ConfigurationError", "DegenerateChannelError", "DimensionError",
    "HierarchicalCodebooks", "OverheadReport", "Probe", "SoundingConfig", "SuccessPrediction",
    "SystemConfig", "TrainingResult", "cascaded_gain", "dft_codebook", "draw_channel",
    "exhaustive_search", "ground_truth_tuple", "hierarchical_codebook", "hierarchical_search",
    "intersect_decode", "los_channel", "make_binning_plan", "multi_beam", "multidirectional_search",
    "oracle_tuple", "overhead", "predict_success", "required_rounds", "scan_round", "sound",
]
