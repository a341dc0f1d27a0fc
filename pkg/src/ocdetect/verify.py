"""Quick self-checks run by ``ocdetect verify`` (a few seconds in total)."""

import numpy as np

from .channel import gen_channel, gen_noise, n0_from_ebn0, transmit
from .detect import (
    EQUIVALENCE_RTOL,
    cd_reference,
    mmse_exact,
    multiplication_count_cd,
    multiplication_count_ocd,
    ocd_equalize,
    ocd_preprocess,
)
from .fxp import LUT_REL_ERROR_BOUND, LUT_SIZE, default_lut, latency_cycles
from .modem import build_constellation, Scheme


def _instance(rng, B, U, c, ebn0=10.0):
    H = gen_channel(B, U, rng.integers(2**63))
    s = c.points[rng.integers(0, c.size, U)]
    N0 = n0_from_ebn0(ebn0, c.Q, U, B)
    return H, transmit(H, s, gen_noise(B, N0, rng.integers(2**63))), N0


def check_constellations():
    for scheme in Scheme:
        c = build_constellation(scheme)
        if abs(np.mean(np.abs(c.points) ** 2) - 1) > 1e-12:
            return False, f"{scheme.value} is not unit power"
    return True, "unit power for all schemes"


def check_ocd_equals_cd(n=20, seed=1):
    rng = np.random.default_rng(seed)
    c = build_constellation("qam16")
    worst = 0.0
    for i in range(n):
        B, U, K = (32, 4, 1 + i % 5) if i % 2 else (64, 8, 1 + i % 5)
        mode = "box" if i % 3 == 0 else "mmse"
        H, y, N0 = _instance(rng, B, U, c)
        z_cd = cd_reference(H, y, N0, mode, K, c)
        z_ocd, _ = ocd_equalize(H, y, ocd_preprocess(H, mode, N0), mode, K, c)
        worst = max(worst, np.max(np.abs(z_ocd - z_cd) / np.abs(z_cd)))
    return worst < EQUIVALENCE_RTOL, f"max relative deviation {worst:.2e}"


def check_residual(seed=2):
    rng = np.random.default_rng(seed)
    c = build_constellation("qam64")
    H, y, N0 = _instance(rng, 64, 8, c)
    worst = [0.0]

    def probe(k, u, z, r):
        exact = y - H @ z
        worst[0] = max(worst[0], np.linalg.norm(r - exact) / np.linalg.norm(exact))

    ocd_equalize(H, y, ocd_preprocess(H, "box", N0), "box", 5, c, callback=probe)
    return worst[0] < EQUIVALENCE_RTOL, f"max residual drift {worst[0]:.2e}"


def check_convergence(seed=3):
    rng = np.random.default_rng(seed)
    c = build_constellation("qam64")
    H, y, N0 = _instance(rng, 128, 8, c)
    z_ref = mmse_exact(H, y, N0, c).z
    z, _ = ocd_equalize(H, y, ocd_preprocess(H, "mmse", N0), "mmse", 50, c)
    err = np.linalg.norm(z - z_ref) / np.linalg.norm(z_ref)
    return err < 1e-6, f"relative error after 50 sweeps {err:.2e}"


def check_counts():
    c = build_constellation("qpsk")
    rng = np.random.default_rng(4)
    H, y, N0 = _instance(rng, 16, 4, c)
    _, n_ocd = ocd_equalize(H, y, ocd_preprocess(H, "mmse", N0), "mmse", 3, c)
    _, n_cd = cd_reference(H, y, N0, "mmse", 3, c, return_count=True)
    ok = (
        n_ocd == multiplication_count_ocd(16, 4, 3)
        and n_cd == multiplication_count_cd(16, 4, 3)
        and multiplication_count_ocd(128, 8, 1) == 8224
        and multiplication_count_cd(128, 8, 1) == 32784
    )
    return ok, f"OCD {n_ocd}, CD {n_cd} multiplications (16x4, K=3)"


def check_lut():
    lut = default_lut()
    k = np.arange(LUT_SIZE)
    words = lut.entries / 2.0**16
    lo = (2048 + k) / 4096
    hi = (2049 + k) / 4096
    err = np.maximum(np.abs(words * lo - 1), np.abs(words * hi - 1)).max()
    return err <= LUT_REL_ERROR_BOUND, f"max relative error {err:.3e}"


def check_latency():
    return latency_cycles(3, 8, 27) == 795, "24(K+1)U+O at K=3, U=8, O=27"


CHECKS = {
    "constellations": check_constellations,
    "ocd_equals_cd": check_ocd_equals_cd,
    "residual_identity": check_residual,
    "mmse_convergence": check_convergence,
    "multiplication_counts": check_counts,
    "reciprocal_lut": check_lut,
    "latency_model": check_latency,
}


def run_all():
    """Run every check; returns ``[(name, passed, detail), ...]``."""
    return [(name, *fn()) for name, fn in CHECKS.items()]
