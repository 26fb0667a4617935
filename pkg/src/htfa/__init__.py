"""Discrete time-frequency analysis toolkit on periodic grids."""

from .grid import (
    ExponentTuple,
    GridSpec,
    Signal1D,
    Signal2D,
    SignalFamily,
    dft,
    dft2,
    idft,
    idft2,
    lp_norm,
    lr_family_norm,
    mixed_norm,
    pure_frequency,
    pure_frequency_2d,
)

__all__ = [
    "ExponentTuple",
    "GridSpec",
    "Signal1D",
    "Signal2D",
    "SignalFamily",
    "dft",
    "dft2",
    "idft",
    "idft2",
    "lp_norm",
    "lr_family_norm",
    "mixed_norm",
    "pure_frequency",
    "pure_frequency_2d",
]
