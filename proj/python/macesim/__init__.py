"""Cell-free massive MIMO pilot-phase channel estimation simulator."""

from ._core import (
    ChannelMode,
    ExperimentSpec,
    LosMode,
    SimConfig,
    StatsSource,
    apply_preset,
    fronthaul,
    inversion_dim,
    make_pilot_book,
    psd_project,
    run,
    run_to_files,
    theoretical_nmse,
)

__all__ = [
    "ChannelMode",
    "ExperimentSpec",
    "LosMode",
    "SimConfig",
    "StatsSource",
    "apply_preset",
    "fronthaul",
    "inversion_dim",
    "make_pilot_book",
    "psd_project",
    "run",
    "run_to_files",
    "theoretical_nmse",
]
