"""
Per-subcarrier channel, noise and SNR bookkeeping.

Every generator is a pure function of its shape arguments and seed. Seeds
may be plain integers or :class:`numpy.random.SeedSequence` objects; the
latter is how the simulator hands out independent per-trial streams.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ParameterError, ShapeError

__all__ = [
    "ChannelInstance",
    "gen_channel",
    "gen_noise",
    "n0_from_ebn0",
    "transmit",
]


@dataclass(frozen=True)
class ChannelInstance:
    """One subcarrier of ``y = H s + n``."""

    H: np.ndarray
    s: np.ndarray
    n: np.ndarray
    y: np.ndarray
    N0: float

    def __post_init__(self):
        if not self.N0 > 0:
            raise ParameterError(f"N0 must be positive, got {self.N0}")

    @property
    def B(self):
        return self.H.shape[0]

    @property
    def U(self):
        return self.H.shape[1]

    def is_consistent(self):
        return np.array_equal(self.y, transmit(self.H, self.s, self.n))


def _rng(seed):
    return np.random.default_rng(seed)


def _cn(rng, shape, variance):
    # circularly-symmetric: variance/2 per real dimension
    sd = np.sqrt(variance / 2.0)
    return sd * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def gen_channel(B, U, seed):
    """
    I.i.d. Rayleigh channel matrix with unit-variance complex entries.

    Raises
    ------
    ConfigError
        If ``B < U`` or ``U < 1``.
    """
    if U < 1 or B < U:
        raise ConfigError(f"need B >= U >= 1, got B={B}, U={U}")
    return _cn(_rng(seed), (B, U), 1.0)


def gen_noise(B, N0, seed):
    """``B`` i.i.d. circularly-symmetric Gaussian samples of variance ``N0``."""
    if N0 < 0:
        raise ParameterError(f"noise variance must be non-negative, got {N0}")
    if N0 == 0:
        return np.zeros(B, dtype=complex)
    return _cn(_rng(seed), B, N0)


def n0_from_ebn0(ebn0_db, Q, U, B):
    """
    Noise variance for a given SNR per bit in dB.

    With ``E||s||^2 = U`` and ``E||n||^2 = B N0`` the SNR per bit is
    ``U / (Q B N0)``, hence ``N0 = U / (Q B 10^(ebn0_db/10))``.
    """
    if min(Q, U, B) < 1:
        raise ParameterError("Q, U and B must be at least 1")
    return U / (Q * B * 10.0 ** (ebn0_db / 10.0))


def transmit(H, s, n):
    """Received vector ``H s + n``."""
    H = np.asarray(H)
    s = np.asarray(s)
    n = np.asarray(n)
    if H.ndim != 2 or s.shape != (H.shape[1],) or n.shape != (H.shape[0],):
        raise ShapeError(
            f"shape mismatch: H {H.shape}, s {s.shape}, n {n.shape}"
        )
    return H @ s + n
