"""
Monte-Carlo error-rate harness.

Each trial is one subcarrier: random bits, an i.i.d. Rayleigh channel and
AWGN at the requested SNR per bit. The random streams of a trial depend
only on ``(master_seed, point_index, trial_index)`` through
:class:`numpy.random.SeedSequence` spawn keys, never on the detector or
on ``K``. Different detectors therefore see identical trials, and results
do not depend on how trials are spread over workers.
"""

import csv
import enum
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .channel import gen_channel, gen_noise, n0_from_ebn0, transmit
from .detect import (
    DetectorMode,
    approx_gains,
    cd_reference,
    mmse_exact,
    ocd_detect,
)
from .errors import ConfigError, OcdError, TrialError
from .fxp import FixedPointFormat, Q16_11, ocd_fixed
from .modem import Scheme, build_constellation, hard_bits, llr_maxlog, map_bits, slice_index

__all__ = [
    "Detector",
    "SimConfig",
    "TrialResult",
    "PointResult",
    "SimReport",
    "CSV_HEADER",
    "trial_seed",
    "run_trial",
    "run_sweep",
    "emit_csv",
]

CSV_HEADER = (
    "detector",
    "ebn0_db",
    "K",
    "bits",
    "bit_errors",
    "ber",
    "symbols",
    "symbol_errors",
    "ser",
    "mean_dist_to_mmse",
    "mean_mult_count",
    "wall_seconds",
)


class Detector(enum.Enum):
    EXACT_MMSE = "exact_mmse"
    CD_MMSE = "cd_mmse"
    CD_BOX = "cd_box"
    OCD_MMSE = "ocd_mmse"
    OCD_BOX = "ocd_box"
    OCD_MMSE_FXP = "ocd_mmse_fxp"
    OCD_BOX_FXP = "ocd_box_fxp"

    @property
    def mode(self):
        if self is Detector.EXACT_MMSE:
            return None
        return DetectorMode.BOX if "box" in self.value else DetectorMode.MMSE

    @property
    def is_fixed_point(self):
        return self.value.endswith("_fxp")


@dataclass(frozen=True)
class SimConfig:
    """
    Sweep configuration.

    ``record_timing`` fills the ``wall_seconds`` column; leave it off when
    reports must be byte-reproducible.
    """

    B: int
    U: int
    scheme: Scheme
    detector: Detector
    K: int
    ebn0_grid: tuple
    trials_per_point: int
    master_seed: int
    fxp_format: FixedPointFormat = None
    workers: int = 1
    record_timing: bool = False

    def __post_init__(self):
        try:
            object.__setattr__(self, "scheme", Scheme(self.scheme))
            object.__setattr__(self, "detector", Detector(self.detector))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        object.__setattr__(self, "ebn0_grid", tuple(float(e) for e in self.ebn0_grid))
        if self.detector.is_fixed_point and self.fxp_format is None:
            object.__setattr__(self, "fxp_format", Q16_11)

        if not (isinstance(self.U, int) and isinstance(self.B, int)):
            raise ConfigError("B and U must be integers")
        if self.U < 1 or self.B < self.U:
            raise ConfigError(f"need B >= U >= 1, got B={self.B}, U={self.U}")
        if self.K < 1:
            raise ConfigError(f"K must be at least 1, got {self.K}")
        if self.trials_per_point < 1:
            raise ConfigError("trials_per_point must be at least 1")
        if not self.ebn0_grid:
            raise ConfigError("Eb/N0 grid is empty")
        if any(b <= a for a, b in zip(self.ebn0_grid, self.ebn0_grid[1:])):
            raise ConfigError("Eb/N0 grid must be strictly increasing")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")


@dataclass(frozen=True)
class TrialResult:
    bits: int
    bit_errors: int
    symbols: int
    symbol_errors: int
    dist_to_mmse: float
    mult_count: int
    seconds: float = 0.0


@dataclass(frozen=True)
class PointResult:
    detector: str
    ebn0_db: float
    K: int
    bits: int
    bit_errors: int
    ber: float
    symbols: int
    symbol_errors: int
    ser: float
    mean_dist_to_mmse: float
    mean_mult_count: float
    wall_seconds: float


@dataclass
class SimReport:
    config: SimConfig
    points: list = field(default_factory=list)

    def ber(self):
        return np.array([p.ber for p in self.points])

    def bits(self):
        return np.array([p.bits for p in self.points])


@lru_cache(maxsize=None)
def _constellation(scheme):
    return build_constellation(scheme)


def trial_seed(master_seed, point_index, trial_index):
    """Seed sequence of one trial; spawn keys keep streams independent."""
    return np.random.SeedSequence(master_seed, spawn_key=(point_index, trial_index))


def _detect(cfg, H, y, N0, c):
    det = cfg.detector
    if det is Detector.EXACT_MMSE:
        out = mmse_exact(H, y, N0, c)
        return out.z, out.mu, out.llrs, 0
    if det in (Detector.OCD_MMSE, Detector.OCD_BOX):
        out = ocd_detect(H, y, N0, det.mode, cfg.K, c)
        return out.z, out.mu, out.llrs, out.mult_count
    if det in (Detector.CD_MMSE, Detector.CD_BOX):
        z, count = cd_reference(H, y, N0, det.mode, cfg.K, c, return_count=True)
    else:
        z, count = ocd_fixed(
            H, y, N0, det.mode, cfg.K, c, fmt=cfg.fxp_format, return_count=True
        )
    # in MMSE mode d^-1 g is exactly g / (g + N0)
    mu, rho, _ = approx_gains(H, N0)
    return z, mu, llr_maxlog(z, mu, rho, c), count


def run_trial(cfg, ebn0, trial_index, point_index=None):
    """
    Simulate one subcarrier and count errors.

    Bit decisions come from LLR signs; symbol decisions from slicing
    ``z / mu``. ``point_index`` defaults to the position of ``ebn0`` in the
    configured grid and selects the random stream.
    """
    if point_index is None:
        try:
            point_index = cfg.ebn0_grid.index(float(ebn0))
        except ValueError:
            raise ConfigError(f"Eb/N0 {ebn0} dB is not on the grid") from None
    t0 = time.perf_counter()
    c = _constellation(cfg.scheme)
    B, U = cfg.B, cfg.U
    bit_ss, h_ss, n_ss = trial_seed(cfg.master_seed, point_index, trial_index).spawn(3)

    bits = np.random.default_rng(bit_ss).integers(0, 2, U * c.Q, dtype=np.uint8)
    s = map_bits(bits, c)
    H = gen_channel(B, U, h_ss)
    N0 = n0_from_ebn0(ebn0, c.Q, U, B)
    y = transmit(H, s, gen_noise(B, N0, n_ss))

    z, mu, llrs, count = _detect(cfg, H, y, N0, c)
    ref = z if cfg.detector is Detector.EXACT_MMSE else mmse_exact(H, y, N0, c).z
    dist = float(np.linalg.norm(z - ref) / np.linalg.norm(ref))

    sent = bits.reshape(U, c.Q) @ (1 << np.arange(c.Q - 1, -1, -1))
    return TrialResult(
        bits=bits.size,
        bit_errors=int(np.count_nonzero(hard_bits(llrs) != bits)),
        symbols=U,
        symbol_errors=int(np.count_nonzero(slice_index(z / mu, c) != sent)),
        dist_to_mmse=dist,
        mult_count=int(count),
        seconds=time.perf_counter() - t0 if cfg.record_timing else 0.0,
    )


def _run_point(args):
    cfg, point_index, trials = args
    ebn0 = cfg.ebn0_grid[point_index]
    out = []
    for t in trials:
        try:
            out.append(run_trial(cfg, ebn0, t, point_index))
        except OcdError as exc:
            raise TrialError(
                f"{cfg.detector.value} failed at Eb/N0={ebn0} dB, trial {t}: {exc}"
            ) from exc
    return point_index, out


def _aggregate(cfg, point_index, results):
    n = len(results)
    bits = sum(r.bits for r in results)
    bit_errors = sum(r.bit_errors for r in results)
    symbols = sum(r.symbols for r in results)
    symbol_errors = sum(r.symbol_errors for r in results)
    dist = 0.0
    for r in results:
        dist += r.dist_to_mmse
    return PointResult(
        detector=cfg.detector.value,
        ebn0_db=cfg.ebn0_grid[point_index],
        K=cfg.K,
        bits=bits,
        bit_errors=bit_errors,
        ber=bit_errors / bits,
        symbols=symbols,
        symbol_errors=symbol_errors,
        ser=symbol_errors / symbols,
        mean_dist_to_mmse=dist / n,
        mean_mult_count=sum(r.mult_count for r in results) / n,
        wall_seconds=sum(r.seconds for r in results),
    )


def _chunks(cfg, n_chunks):
    trials = np.array_split(np.arange(cfg.trials_per_point), n_chunks)
    return [
        (cfg, p, [int(t) for t in chunk])
        for p in range(len(cfg.ebn0_grid))
        for chunk in trials
        if chunk.size
    ]


def run_sweep(cfg):
    """
    Run every grid point and return a :class:`SimReport`.

    Trials are reduced in ``(point, trial)`` order whatever the worker
    count, so the report is identical for any ``cfg.workers``.
    """
    per_point = {p: [] for p in range(len(cfg.ebn0_grid))}
    if cfg.workers == 1:
        for task in _chunks(cfg, 1):
            p, res = _run_point(task)
            per_point[p].extend(res)
    else:
        tasks = _chunks(cfg, cfg.workers)
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            # map preserves submission order
            for p, res in pool.map(_run_point, tasks):
                per_point[p].extend(res)
    points = [_aggregate(cfg, p, per_point[p]) for p in sorted(per_point)]
    return SimReport(config=cfg, points=points)


def _fmt(x):
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.9g}"


def emit_csv(report, path):
    """
    Write one row per grid point.

    ``report`` may be a single :class:`SimReport` or a sequence of them;
    rows are written in the given order.
    """
    reports = [report] if isinstance(report, SimReport) else list(report)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rep in reports:
            for p in rep.points:
                writer.writerow([_fmt(getattr(p, name)) for name in CSV_HEADER])
