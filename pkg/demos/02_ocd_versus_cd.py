"""
Coordinate descent, plain and optimized
=======================================

Both solvers take the same steps. The optimized one keeps a running
residual, which cuts the work per sweep from O(B U^2) to O(B U).
"""

import numpy as np

from ocdetect import (
    build_constellation,
    cd_reference,
    gen_channel,
    gen_noise,
    map_bits,
    multiplication_count_cd,
    multiplication_count_ocd,
    n0_from_ebn0,
    ocd_equalize,
    ocd_preprocess,
    transmit,
)

rng = np.random.default_rng(1)
B, U = 128, 8
c = build_constellation("qam64")
s = map_bits(rng.integers(0, 2, U * c.Q), c)
H = gen_channel(B, U, 11)
N0 = n0_from_ebn0(-20.0, c.Q, U, B)
y = transmit(H, s, gen_noise(B, N0, 12))

for mode in ("mmse", "box"):
    for K in (1, 2, 3):
        z_cd = cd_reference(H, y, N0, mode, K, c)
        z_ocd, count = ocd_equalize(H, y, ocd_preprocess(H, mode, N0), mode, K, c)
        dev = np.max(np.abs(z_ocd - z_cd) / np.abs(z_cd))
        print(f"{mode:4s} K={K}  max rel deviation {dev:.1e}  multiplications {count}")

# the cost ratio approaches U/2 as B grows
print()
print(f"{'B':>6} {'CD':>10} {'OCD':>8} {'ratio':>6}")
for B in (16, 64, 128, 1024):
    cd, ocd = multiplication_count_cd(B, U, 1), multiplication_count_ocd(B, U, 1)
    print(f"{B:>6} {cd:>10} {ocd:>8} {cd / ocd:>6.3f}")
