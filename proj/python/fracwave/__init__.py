"""Fourier bases on self-affine measures and wavelet filters."""

from ._fracwave import (
    brolin_moments,
    cascade,
    find_cycles,
    hadamard_check,
    k2_split,
    lambda0,
    lawton,
    mu_hat,
)

__all__ = [
    "brolin_moments",
    "cascade",
    "find_cycles",
    "hadamard_check",
    "k2_split",
    "lambda0",
    "lawton",
    "mu_hat",
]
