"""
Constellations, bit mapping, hard slicing, box projection and max-log
soft demapping.

Labeling convention
-------------------
Square QAM uses a reflected Gray code on each axis. The first ``Q/2`` bits
of a label select the real-axis level, the last ``Q/2`` the imaginary one.
Points are stored so that point ``k`` carries the label whose MSB-first
binary value is ``k``; mapping bits is therefore a plain index lookup.
For BPSK, bit 0 maps to -1 and bit 1 to +1.

A positive LLR favors bit 1.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateError, ParameterError, ShapeError

__all__ = [
    "Scheme",
    "Constellation",
    "build_constellation",
    "map_bits",
    "labels_of",
    "slice_hard",
    "slice_index",
    "project_box",
    "llr_maxlog",
    "hard_bits",
]


class Scheme(enum.Enum):
    BPSK = "bpsk"
    QPSK = "qpsk"
    QAM16 = "qam16"
    QAM64 = "qam64"

    @property
    def bits_per_symbol(self):
        return {"bpsk": 1, "qpsk": 2, "qam16": 4, "qam64": 6}[self.value]


def _gray(i):
    return i ^ (i >> 1)


def _gray_inverse(g):
    i = 0
    while g:
        i ^= g
        g >>= 1
    return i


@dataclass(frozen=True, eq=False)
class Constellation:
    """
    Finite symbol alphabet with Gray labels.

    Attributes
    ----------
    scheme : Scheme
    points : ndarray of complex, shape (2**Q,)
        Unit average power. ``points[k]`` carries label ``k``.
    labels : ndarray of uint8, shape (2**Q, Q)
        MSB-first bit labels.
    Q : int
        Bits per symbol.
    box_radius : float
        Largest real part over all points.
    """

    scheme: Scheme
    points: np.ndarray
    labels: np.ndarray
    Q: int
    box_radius: float
    # bit_sets[b] = (indices with bit b == 0, indices with bit b == 1)
    bit_sets: tuple = field(repr=False, default=())

    @property
    def size(self):
        return self.points.size

    @property
    def is_real(self):
        return self.scheme is Scheme.BPSK


def build_constellation(scheme):
    """
    Build one of the supported unit-power constellations.

    Parameters
    ----------
    scheme : Scheme or str
        ``"bpsk"``, ``"qpsk"``, ``"qam16"`` or ``"qam64"``.

    Returns
    -------
    Constellation
    """
    scheme = Scheme(scheme) if not isinstance(scheme, Scheme) else scheme
    Q = scheme.bits_per_symbol
    M = 1 << Q
    idx = np.arange(M)

    if scheme is Scheme.BPSK:
        points = (2.0 * idx - 1.0).astype(complex)
    else:
        m = Q // 2
        L = 1 << m
        # unit power: E|s|^2 = 2 (L^2 - 1) / 3 before scaling
        scale = np.sqrt(3.0 / (2.0 * (L * L - 1)))
        lvl_re = np.array([_gray_inverse(k >> m) for k in idx])
        lvl_im = np.array([_gray_inverse(k & (L - 1)) for k in idx])
        points = scale * ((2 * lvl_re - L + 1) + 1j * (2 * lvl_im - L + 1))

    labels = ((idx[:, None] >> np.arange(Q - 1, -1, -1)) & 1).astype(np.uint8)
    bit_sets = tuple(
        (np.flatnonzero(labels[:, b] == 0), np.flatnonzero(labels[:, b] == 1))
        for b in range(Q)
    )
    points.setflags(write=False)
    labels.setflags(write=False)
    return Constellation(
        scheme=scheme,
        points=points,
        labels=labels,
        Q=Q,
        box_radius=float(points.real.max()),
        bit_sets=bit_sets,
    )


def map_bits(bits, c):
    """Map a flat bit sequence of length ``U*Q`` onto ``U`` symbols."""
    bits = np.asarray(bits)
    if bits.ndim != 1 or bits.size % c.Q:
        raise ShapeError(
            f"bit sequence of length {bits.size} is not a multiple of Q={c.Q}"
        )
    weights = 1 << np.arange(c.Q - 1, -1, -1)
    index = bits.reshape(-1, c.Q).astype(np.int64) @ weights
    return c.points[index]


def labels_of(index, c):
    """Flat bit labels of the points at ``index``."""
    return c.labels[np.asarray(index)].reshape(-1)


def slice_index(z, c):
    """Index of the nearest constellation point, lowest index on ties."""
    z = np.asarray(z, dtype=complex)
    d = np.abs(z[..., None] - c.points) ** 2
    return np.argmin(d, axis=-1)


def slice_hard(z, c):
    """Element-wise nearest-point slicing."""
    return c.points[slice_index(z, c)]


def project_box(w, c):
    """
    Orthogonal projection onto the convex hull of the constellation.

    For square QAM this clips real and imaginary parts to
    ``[-box_radius, box_radius]``. For BPSK the imaginary part is dropped.
    """
    w = np.asarray(w, dtype=complex)
    a = c.box_radius
    re = np.clip(w.real, -a, a)
    if c.is_real:
        return re + 0j
    return re + 1j * np.clip(w.imag, -a, a)


def llr_maxlog(z, mu, rho, c):
    """
    Max-log LLRs for equalized symbols.

    Parameters
    ----------
    z : complex or array_like, shape (U,)
        Equalizer outputs.
    mu : float or array_like, shape (U,)
        Per-user channel gains; ``z / mu`` is the unbiased estimate.
    rho : float or array_like, shape (U,)
        Post-equalization SINRs.
    c : Constellation

    Returns
    -------
    ndarray, shape (U, Q)
        ``rho * (min_{a: bit=0} |z/mu - a|^2 - min_{a: bit=1} |z/mu - a|^2)``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    mu = np.broadcast_to(np.asarray(mu, dtype=float), z.shape)
    rho = np.broadcast_to(np.asarray(rho, dtype=float), z.shape)
    if np.any(mu == 0):
        raise DegenerateError("channel gain mu must be nonzero")
    if np.any(rho < 0):
        raise ParameterError("SINR rho must be non-negative")

    d = np.abs((z / mu)[:, None] - c.points) ** 2
    llr = np.empty((z.size, c.Q))
    for b, (zero, one) in enumerate(c.bit_sets):
        llr[:, b] = d[:, zero].min(axis=1) - d[:, one].min(axis=1)
    return rho[:, None] * llr


def hard_bits(llrs):
    """Bit decisions from LLR signs, flattened user-major."""
    return (np.asarray(llrs) > 0).astype(np.uint8).reshape(-1)
