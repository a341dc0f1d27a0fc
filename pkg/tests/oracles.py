"""Independent reference computations used by the tests.

Nothing here calls into the code paths it is used to check.
"""

import numpy as np


def brute_gram_mf(H, y):
    B, U = H.shape
    G = np.zeros((U, U), dtype=complex)
    mf = np.zeros(U, dtype=complex)
    for i in range(U):
        for j in range(U):
            for b in range(B):
                G[i, j] += np.conj(H[b, i]) * H[b, j]
        for b in range(B):
            mf[i] += np.conj(H[b, i]) * y[b]
    return G, mf


def brute_transmit(H, s, n):
    B, U = H.shape
    y = np.array(n, dtype=complex)
    for b in range(B):
        for u in range(U):
            y[b] += H[b, u] * s[u]
    return y


def nearest_point(z, points):
    best, best_d = 0, np.inf
    for k, p in enumerate(points):
        d = abs(z - p) ** 2
        if d < best_d:
            best, best_d = k, d
    return best


def brute_llr(z, mu, rho, points, labels):
    Q = labels.shape[1]
    x = z / mu
    out = np.empty(Q)
    for b in range(Q):
        m0 = min(abs(x - p) ** 2 for p, l in zip(points, labels) if l[b] == 0)
        m1 = min(abs(x - p) ** 2 for p, l in zip(points, labels) if l[b] == 1)
        out[b] = rho * (m0 - m1)
    return out


def mmse_explicit(H, y, N0):
    """Closed form with an explicit inverse; gains from row i of A^-1 times column i of G."""
    G = H.conj().T @ H
    A_inv = np.linalg.inv(G + N0 * np.eye(H.shape[1]))
    z = A_inv @ (H.conj().T @ y)
    mu = np.array([A_inv[i, :] @ G[:, i] for i in range(H.shape[1])]).real
    return z, mu


def _real_form(H, y):
    Hr = np.block([[H.real, -H.imag], [H.imag, H.real]])
    return Hr, np.concatenate([y.real, y.imag])


def projected_gradient_box(H, y, radius, tol=1e-15, max_iter=200_000, real=False):
    """Box-constrained least squares by projected gradient with step 1/L."""
    Hr, yr = _real_form(H, y)
    U = H.shape[1]
    L = 2 * np.linalg.norm(Hr, 2) ** 2
    x = np.zeros(2 * U)
    lo = np.full(2 * U, -radius)
    hi = np.full(2 * U, radius)
    if real:
        lo[U:] = hi[U:] = 0.0
    for _ in range(max_iter):
        grad = 2 * Hr.T @ (Hr @ x - yr)
        x_new = np.clip(x - grad / L, lo, hi)
        if np.max(np.abs(x_new - x)) < tol:
            x = x_new
            break
        x = x_new
    return x[:U] + 1j * x[U:]


def box_kkt_violation(H, y, z, radius, tol_boundary=1e-12):
    """
    Largest violation of the box KKT conditions over the 2U real coordinates.

    Interior coordinates need a zero gradient; a coordinate at +radius needs
    a non-positive gradient and one at -radius a non-negative gradient.
    """
    Hr, yr = _real_form(H, y)
    x = np.concatenate([z.real, z.imag])
    grad = 2 * Hr.T @ (Hr @ x - yr)
    worst = 0.0
    for xi, gi in zip(x, grad):
        if xi >= radius - tol_boundary:
            v = max(gi, 0.0)
        elif xi <= -radius + tol_boundary:
            v = max(-gi, 0.0)
        else:
            v = abs(gi)
        worst = max(worst, v)
    return worst


def gd_mmse_objective(H, y, z, N0):
    r = y - H @ z
    return float(np.real(np.vdot(r, r)) + N0 * np.real(np.vdot(z, z)))
