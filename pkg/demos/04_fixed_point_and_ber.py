"""
Fixed-point datapath and a small BER sweep
==========================================

The fixed-point model uses 16-bit signals with 11 fractional bits, a
36-bit accumulator and an 18-bit reciprocal table. Here it is compared
with the floating-point detector, then both run through the Monte-Carlo
harness.
"""

import numpy as np

from ocdetect import (
    SimConfig,
    build_constellation,
    gen_channel,
    gen_noise,
    latency_cycles,
    latency_seconds,
    map_bits,
    n0_from_ebn0,
    ocd_equalize,
    ocd_fixed,
    ocd_preprocess,
    recip_lut,
    run_sweep,
    transmit,
)

# the reciprocal unit normalizes to [0.5, 1) and reads one of 2048 entries
for x in (0.5, 0.75, 1.0, 3.0):
    print(f"1/{x:<4} ~ {recip_lut(x):.6f}   exact {1 / x:.6f}")

rng = np.random.default_rng(4)
c = build_constellation("qam64")
B, U = 128, 8
H = gen_channel(B, U, 21)
s = map_bits(rng.integers(0, 2, U * c.Q), c)
N0 = n0_from_ebn0(16.0, c.Q, U, B)
y = transmit(H, s, gen_noise(B, N0, 22))
z_float, _ = ocd_equalize(H, y, ocd_preprocess(H, "mmse", N0), "mmse", 3, c)
z_fixed = ocd_fixed(H, y, N0, "mmse", 3, c)
print("\nfloat ", np.round(z_float[:3], 4))
print("fixed ", np.round(z_fixed[:3], 4))
print("MSE   ", np.mean(np.abs(z_float - z_fixed) ** 2))

# a short sweep; use the CLI or more trials for smooth curves
grid = (-24.0, -21.0, -18.0)
for det in ("exact_mmse", "ocd_mmse", "ocd_mmse_fxp", "ocd_box"):
    cfg = SimConfig(B=B, U=U, scheme="qam64", detector=det, K=3, ebn0_grid=grid,
                    trials_per_point=300, master_seed=7)
    rep = run_sweep(cfg)
    print(f"{det:13s}", "  ".join(f"{p.ebn0_db:g} dB: {p.ber:.2e}" for p in rep.points))

cycles = latency_cycles(3, U, 27)
print(f"\nlatency K=3: {cycles} cycles, {latency_seconds(cycles, 258e6) * 1e6:.2f} us at 258 MHz")
