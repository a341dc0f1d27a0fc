"""
Convergence to the closed-form MMSE estimate
============================================

Each sweep of MMSE-mode OCD is one Gauss-Seidel pass on the regularized
normal equations. Large arrays make the Gram matrix nearly diagonal, so a
handful of sweeps is enough.
"""

import numpy as np

from ocdetect import (
    build_constellation,
    gen_channel,
    gen_noise,
    map_bits,
    mmse_exact,
    n0_from_ebn0,
    ocd_equalize,
    ocd_preprocess,
    transmit,
)

rng = np.random.default_rng(3)
c = build_constellation("qam64")
U = 8

for B in (16, 32, 128):
    errs = np.zeros(10)
    for trial in range(50):
        H = gen_channel(B, U, rng.integers(2**63))
        s = map_bits(rng.integers(0, 2, U * c.Q), c)
        N0 = n0_from_ebn0(10.0, c.Q, U, B)
        y = transmit(H, s, gen_noise(B, N0, rng.integers(2**63)))
        z_ref = mmse_exact(H, y, N0, c).z
        prep = ocd_preprocess(H, "mmse", N0)
        for K in range(1, 11):
            z, _ = ocd_equalize(H, y, prep, "mmse", K, c)
            errs[K - 1] += np.linalg.norm(z - z_ref) / np.linalg.norm(z_ref) / 50
    print(f"B={B:3d}  " + " ".join(f"{e:.0e}" for e in errs))
