"""
Constellations and soft bits
============================

Gray-labelled QAM, the box that encloses it, and max-log LLRs.
"""

import numpy as np

from ocdetect import build_constellation, llr_maxlog, map_bits, project_box, slice_hard

# every scheme is normalized to unit average power
for name in ("bpsk", "qpsk", "qam16", "qam64"):
    c = build_constellation(name)
    print(f"{name:6s} Q={c.Q} points={c.size:3d} "
          f"power={np.mean(np.abs(c.points) ** 2):.3f} box radius={c.box_radius:.4f}")

# 16-QAM labels: the first two bits pick the real level, the last two the imaginary
c = build_constellation("qam16")
for label, point in zip(c.labels[:4], c.points[:4]):
    print("".join(map(str, label)), np.round(point * np.sqrt(10), 3))

# map a few bits and pull them back out of LLR signs
bits = np.array([1, 0, 1, 1, 0, 0, 1, 0])
s = map_bits(bits, c)
noisy = s + 0.05 * (1 - 1j)
llr = llr_maxlog(noisy, mu=1.0, rho=20.0, c=c)
print("sent bits   ", bits)
print("LLR signs   ", (llr.ravel() > 0).astype(int))
print("LLRs        ", np.round(llr.ravel(), 1))

# slicing goes to the nearest point, projection only clips to the box
w = 2.0 - 0.1j
print("slice", np.round(slice_hard(w, c), 3), " project", np.round(project_box(w, c), 3))
