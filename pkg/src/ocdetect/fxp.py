"""
Bit-exact model of a fixed-point OCD datapath.

All datapath arithmetic runs on ``int64`` raw words, so results are
reproducible bit for bit. A raw word ``v`` in a format with ``f``
fractional bits stands for ``v * 2**-f``. Complex signals are carried as
separate real and imaginary raw arrays.

Rounding is round-to-nearest with ties away from zero everywhere.

The datapath pieces:

* inner products accumulate full-precision products in a 36-bit adder
  tree and are right-shifted by ``ceil(log2 B)`` bits;
* reciprocals come from a 2048-entry, 18-bit LUT addressed by the 11 bits
  following the leading one of the input;
* every other signal is rounded and saturated to the working format
  (16 bits with 11 fractional bits by default).
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .detect import DetectorMode, regularizer
from .errors import DegenerateError, ParameterError, RangeError, ShapeError

__all__ = [
    "FixedPointFormat",
    "Q16_11",
    "ACC_BITS",
    "round_shift",
    "to_fixed",
    "from_fixed",
    "fit",
    "quantize",
    "ReciprocalLut",
    "default_lut",
    "recip_lut",
    "ceil_log2",
    "inner_product_raw",
    "inner_product_shifted",
    "ocd_fixed",
    "latency_cycles",
    "latency_seconds",
    "LUT_REL_ERROR_BOUND",
]

ACC_BITS = 36

LUT_INDEX_BITS = 11
LUT_SIZE = 1 << LUT_INDEX_BITS
LUT_WORD_BITS = 18
# words hold 1/m for m in [0.5, 1), i.e. values in (1, 2]: 2 integer bits
LUT_FRAC_BITS = LUT_WORD_BITS - 2
# half a bin (2**-12 relative) plus half a word step (2**-17 relative)
LUT_REL_ERROR_BOUND = 2.0**-12 + 2.0**-17


@dataclass(frozen=True)
class FixedPointFormat:
    """Two's-complement (or unsigned) fixed-point format."""

    total_bits: int
    frac_bits: int
    signed: bool = True
    saturate: bool = True

    def __post_init__(self):
        if not 0 <= self.frac_bits < self.total_bits <= 64:
            raise ParameterError(
                f"need 0 <= frac_bits < total_bits <= 64, got "
                f"{self.frac_bits}, {self.total_bits}"
            )

    @classmethod
    def parse(cls, text):
        """Parse ``"16:11"`` into a signed saturating format."""
        try:
            total, frac = (int(t) for t in text.split(":"))
        except ValueError:
            raise ParameterError(f"bad fixed-point format {text!r}") from None
        return cls(total, frac)

    @property
    def step(self):
        return 2.0**-self.frac_bits

    @property
    def min_raw(self):
        return -(1 << (self.total_bits - 1)) if self.signed else 0

    @property
    def max_raw(self):
        bits = self.total_bits - 1 if self.signed else self.total_bits
        return (1 << bits) - 1

    @property
    def min_value(self):
        return self.min_raw * self.step

    @property
    def max_value(self):
        return self.max_raw * self.step

    def __str__(self):
        return f"{self.total_bits}:{self.frac_bits}"


Q16_11 = FixedPointFormat(16, 11)


def round_shift(v, s):
    """
    Multiply raw integers by ``2**-s`` with rounding to nearest.

    Negative ``s`` shifts left exactly.
    """
    v = np.asarray(v, dtype=np.int64)
    if s <= 0:
        return v << -s
    half = np.int64(1) << (s - 1)
    mag = (np.abs(v) + half) >> s
    return np.where(v < 0, -mag, mag)


def fit(raw, fmt):
    """Saturate raw words to ``fmt``, or raise if saturation is off."""
    raw = np.asarray(raw, dtype=np.int64)
    lo, hi = fmt.min_raw, fmt.max_raw
    if fmt.saturate:
        return np.clip(raw, lo, hi)
    if np.any(raw < lo) or np.any(raw > hi):
        raise RangeError(f"value out of range for format {fmt}")
    return raw


def to_fixed(x, fmt):
    """Round real values to raw words of ``fmt``."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise RangeError("cannot quantize non-finite values")
    scaled = np.ldexp(x, fmt.frac_bits)
    raw = np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)
    lo, hi = fmt.min_raw, fmt.max_raw
    if not fmt.saturate and (np.any(raw < lo) or np.any(raw > hi)):
        raise RangeError(f"value out of range for format {fmt}")
    return np.clip(raw, lo, hi).astype(np.int64)


def from_fixed(raw, frac_bits):
    """Real value of raw words with ``frac_bits`` fractional bits."""
    if isinstance(frac_bits, FixedPointFormat):
        frac_bits = frac_bits.frac_bits
    return np.ldexp(np.asarray(raw, dtype=float), -frac_bits)


def quantize(x, fmt):
    """Nearest representable value of ``fmt`` (complex handled per part)."""
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return quantize(x.real, fmt) + 1j * quantize(x.imag, fmt)
    out = from_fixed(to_fixed(x, fmt), fmt)
    return out[()] if out.ndim == 0 else out


def _bit_length(raw):
    # exact for |raw| < 2**53
    return np.frexp(np.asarray(raw, dtype=float))[1].astype(np.int64)


class ReciprocalLut:
    """
    Normalized reciprocal table.

    Entry ``k`` holds ``1/m`` at the midpoint ``m = (2048 + k + 0.5) / 4096``
    of the ``k``-th bin of ``[0.5, 1)``, rounded to an unsigned 18-bit word
    with 16 fractional bits.
    """

    def __init__(self, entries=None):
        if entries is None:
            k = np.arange(LUT_SIZE, dtype=np.int64)
            # round(2**16 / m) = round(2**29 / (4097 + 2k))
            den = 4097 + 2 * k
            entries = ((1 << 30) + den) // (2 * den)
        entries = np.asarray(entries, dtype=np.int64)
        if entries.shape != (LUT_SIZE,):
            raise ShapeError(f"LUT needs {LUT_SIZE} entries, got {entries.shape}")
        if np.any(entries < 0) or np.any(entries >= 1 << LUT_WORD_BITS):
            raise RangeError("LUT entries must be 18-bit unsigned words")
        entries.setflags(write=False)
        self.entries = entries

    def __eq__(self, other):
        return isinstance(other, ReciprocalLut) and np.array_equal(
            self.entries, other.entries
        )

    def _address(self, raw):
        raw = np.asarray(raw, dtype=np.int64)
        if np.any(raw == 0):
            raise ZeroDivisionError("reciprocal of zero")
        if np.any(raw < 0):
            raise ParameterError("reciprocal unit takes positive inputs only")
        e = _bit_length(raw)
        # leading one plus the next 11 bits
        top = np.where(
            e >= LUT_INDEX_BITS + 1,
            raw >> np.maximum(e - LUT_INDEX_BITS - 1, 0),
            raw << np.maximum(LUT_INDEX_BITS + 1 - e, 0),
        )
        return top - LUT_SIZE, e

    def lookup(self, raw, frac_bits, out_fmt):
        """
        Reciprocal of raw positive words, as raw words of ``out_fmt``.

        The input ``x = raw * 2**-frac_bits`` is normalized to
        ``m = raw / 2**e`` in ``[0.5, 1)``; the LUT word for ``m`` is then
        shifted back by ``e - frac_bits`` positions.
        """
        idx, e = self._address(raw)
        word = self.entries[idx]
        s = LUT_FRAC_BITS + e - frac_bits - out_fmt.frac_bits
        out = np.empty_like(word)
        for shift in np.unique(s):
            sel = s == shift
            out[sel] = round_shift(word[sel], int(shift))
        return fit(out, out_fmt)

    def value(self, raw, frac_bits):
        """Unrounded real value of the denormalized LUT output."""
        idx, e = self._address(raw)
        return np.ldexp(self.entries[idx].astype(float), frac_bits - e - LUT_FRAC_BITS)

    def dump(self, path):
        """Write 2048 little-endian 32-bit words (low 18 bits significant)."""
        self.entries.astype("<u4").tofile(path)

    @classmethod
    def load(cls, path):
        words = np.fromfile(path, dtype="<u4")
        if words.size != LUT_SIZE:
            raise ShapeError(f"LUT file holds {words.size} words, expected {LUT_SIZE}")
        if np.any(words >> LUT_WORD_BITS):
            raise RangeError("LUT file has bits set above bit 17")
        return cls(words.astype(np.int64))


@lru_cache(maxsize=None)
def default_lut():
    return ReciprocalLut()


def recip_lut(x, fmt=Q16_11, lut=None):
    """
    Approximate ``1/x`` through the reciprocal unit.

    ``x`` is first quantized to ``fmt``; the returned float is the exact
    denormalized LUT output, with no further rounding.
    """
    lut = lut or default_lut()
    raw = to_fixed(x, fmt)
    out = lut.value(raw, fmt.frac_bits)
    return out[()] if out.ndim == 0 else out


def ceil_log2(n):
    if n < 1:
        raise ParameterError(f"need n >= 1, got {n}")
    return (n - 1).bit_length()


def _tree_sum(products, acc_bits):
    # balanced adder tree along the last axis, range-checked at every level
    lo, hi = -(1 << (acc_bits - 1)), (1 << (acc_bits - 1)) - 1
    v = np.asarray(products, dtype=np.int64)
    # every partial sum is bounded by the sum of magnitudes
    if np.abs(v).sum(axis=-1).max(initial=0) <= hi:
        return v.sum(axis=-1)
    while True:
        if np.any(v < lo) or np.any(v > hi):
            raise RangeError(f"{acc_bits}-bit accumulator overflow")
        n = v.shape[-1]
        if n == 1:
            return v[..., 0]
        if n % 2:
            v = np.concatenate([v, np.zeros(v.shape[:-1] + (1,), np.int64)], axis=-1)
        v = v[..., 0::2] + v[..., 1::2]


def inner_product_raw(ar, ai, br, bi, shift, acc_bits=ACC_BITS):
    """
    ``sum(conj(a) * b) * 2**-shift`` on raw words.

    Products keep full precision (fractional bits add up); the result
    stays in that accumulator precision and is rounded only by the shift.

    Returns
    -------
    re, im : int64
    """
    pr = ar * br + ai * bi
    pi = ar * bi - ai * br
    re = _tree_sum(pr, acc_bits)
    im = _tree_sum(pi, acc_bits)
    return round_shift(re, shift), round_shift(im, shift)


def inner_product_shifted(a, b, fmt=Q16_11):
    """
    Inner product ``a^H b`` divided by ``2**ceil(log2 B)``.

    Both vectors are quantized to ``fmt``; the returned complex value has
    ``2 * fmt.frac_bits`` fractional bits.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 1 or a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    shift = ceil_log2(a.size)
    re, im = inner_product_raw(
        to_fixed(a.real, fmt), to_fixed(a.imag, fmt),
        to_fixed(b.real, fmt), to_fixed(b.imag, fmt),
        shift,
    )
    f2 = 2 * fmt.frac_bits
    return complex(from_fixed(re, f2), from_fixed(im, f2))


def ocd_fixed(H, y, N0, mode, K, c, fmt=Q16_11, lut=None, return_count=False):
    """
    Fixed-point OCD.

    Inputs are quantized to ``fmt``. Column norms and ``h_u^H r`` leave the
    inner-product unit shifted right by ``b = ceil(log2 B)``; the
    reciprocal of the shifted norm is therefore ``2**b`` times too large,
    and the two shifts cancel in the product ``d_u^-1 h_u^H r``.

    Parameters
    ----------
    H : ndarray, shape (B, U)
    y : ndarray, shape (B,)
    N0 : float
        Regularizer in MMSE mode; unused in BOX mode.
    mode : DetectorMode
    K : int
    c : Constellation
    fmt : FixedPointFormat
        Working format of all non-accumulator signals.
    lut : ReciprocalLut, optional
    return_count : bool
        Also return the real multiplications spent in the sweeps.

    Returns
    -------
    ndarray of complex, shape (U,)
        Dequantized symbol estimates.
    """
    H = np.asarray(H, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if H.ndim != 2 or y.shape != (H.shape[0],):
        raise ShapeError(f"shape mismatch: H {H.shape}, y {y.shape}")
    if K < 1:
        raise ParameterError(f"K must be at least 1, got {K}")
    mode = DetectorMode(mode)
    lut = lut or default_lut()
    B, U = H.shape
    f = fmt.frac_bits
    f2 = 2 * f
    b = ceil_log2(B)
    acc = FixedPointFormat(ACC_BITS, f2, saturate=False)

    Hr, Hi = to_fixed(H.real, fmt), to_fixed(H.imag, fmt)
    rr, ri = to_fixed(y.real, fmt), to_fixed(y.imag, fmt)

    # preprocessing: shifted norms, reciprocals, gains
    norm_s, _ = inner_product_raw(Hr.T, Hi.T, Hr.T, Hi.T, b)
    alpha_s = to_fixed(regularizer(mode, N0) / 2.0**b, acc)
    den = norm_s + alpha_s
    if np.any(den <= 0):
        raise DegenerateError("zero regularized column norm in fixed point")
    d_s = lut.lookup(den, f2, fmt)
    if mode is DetectorMode.BOX:
        p = np.full(U, 1 << f, dtype=np.int64)
    else:
        p = fit(round_shift(d_s * norm_s, f2), fmt)

    box = mode is DetectorMode.BOX
    a_raw = int(to_fixed(c.box_radius, fmt))
    zr = np.zeros(U, dtype=np.int64)
    zi = np.zeros(U, dtype=np.int64)
    count = 0
    for _ in range(K):
        for u in range(U):
            hr, hi = Hr[:, u], Hi[:, u]
            ipr, ipi = inner_product_raw(hr, hi, rr, ri, b)
            count += 4 * B
            # d_s (f) * ip (2f) -> f ; p (f) * z (f) -> f
            wr = round_shift(d_s[u] * ipr, f2) + round_shift(p[u] * zr[u], f)
            wi = round_shift(d_s[u] * ipi, f2) + round_shift(p[u] * zi[u], f)
            count += 2 + 2
            wr, wi = fit(wr, fmt), fit(wi, fmt)
            if box:
                wr = min(max(wr, -a_raw), a_raw)
                wi = 0 if c.is_real else min(max(wi, -a_raw), a_raw)
            dzr = fit(wr - zr[u], fmt)
            dzi = fit(wi - zi[u], fmt)
            zr[u], zi[u] = wr, wi
            rr = fit(rr - round_shift(hr * dzr - hi * dzi, f), fmt)
            ri = fit(ri - round_shift(hr * dzi + hi * dzr, f), fmt)
            count += 4 * B

    z = from_fixed(zr, f) + 1j * from_fixed(zi, f)
    if return_count:
        return z, count
    return z


def latency_cycles(K, U, O):
    """Pipeline latency ``24 (K + 1) U + O`` in clock cycles."""
    if K < 1 or U < 1 or O < 0:
        raise ParameterError("need K >= 1, U >= 1, O >= 0")
    return 24 * (K + 1) * U + O


def latency_seconds(cycles, clock_hz):
    if clock_hz <= 0:
        raise ParameterError("clock frequency must be positive")
    return cycles / clock_hz
