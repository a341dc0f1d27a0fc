"""
MIMO equalizers: exact MMSE, plain coordinate descent, and optimized
coordinate descent (OCD) in MMSE and box-constrained (BOX) modes.

Real-valued multiplication counts follow one convention throughout:
a complex-by-complex product costs 4, complex-by-real 2, real-by-real 1.
"""

import enum
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DegenerateError, ParameterError, ShapeError, SolverError
from .modem import llr_maxlog, project_box

__all__ = [
    "DetectorMode",
    "OcdPreprocessed",
    "EqualizerOutput",
    "regularizer",
    "gram_and_mf",
    "mmse_exact",
    "cd_reference",
    "ocd_preprocess",
    "ocd_equalize",
    "ocd_detect",
    "approx_gains",
    "sinr_from_gain",
    "objective_value",
    "multiplication_count_cd",
    "multiplication_count_ocd",
    "EQUIVALENCE_RTOL",
    "CONVERGENCE_TOL",
    "RHO_CLAMP",
    "MU_CLAMP_MARGIN",
]

# numerical tolerances for double precision with B <= 128 accumulations
EQUIVALENCE_RTOL = 1e-9
CONVERGENCE_TOL = 1e-6
DESCENT_SLACK = 1e-12
RHO_CLAMP = 1e9
MU_CLAMP_MARGIN = 1e-9
# explicit inverse only for the exact-gain path at small U
EXPLICIT_INVERSE_MAX_U = 32


class DetectorMode(enum.Enum):
    MMSE = "mmse"
    BOX = "box"


def regularizer(mode, N0):
    """Column-norm regularizer: ``N0`` in MMSE mode, 0 in BOX mode."""
    return float(N0) if DetectorMode(mode) is DetectorMode.MMSE else 0.0


@dataclass(frozen=True)
class OcdPreprocessed:
    """Per-user quantities computed once before the OCD sweeps."""

    mode: DetectorMode
    alpha: float
    d_inv: np.ndarray
    p: np.ndarray
    col_norms_sq: np.ndarray


@dataclass(frozen=True)
class EqualizerOutput:
    """
    Equalizer result for one subcarrier.

    ``rho_clamped[u]`` is set when the gain came out too close to one and
    the SINR was capped at :data:`RHO_CLAMP`.
    """

    z: np.ndarray
    mu: np.ndarray
    rho: np.ndarray
    llrs: np.ndarray
    iterations_used: int
    mult_count: int
    rho_clamped: np.ndarray


def _check_shapes(H, y):
    H = np.asarray(H, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if H.ndim != 2 or y.shape != (H.shape[0],):
        raise ShapeError(f"shape mismatch: H {H.shape}, y {y.shape}")
    return H, y


def _col_norms_sq(H):
    return np.einsum("bu,bu->u", H.real, H.real) + np.einsum(
        "bu,bu->u", H.imag, H.imag
    )


def gram_and_mf(H, y):
    """Gram matrix ``H^H H`` and matched-filter output ``H^H y``."""
    H, y = _check_shapes(H, y)
    G = H.conj().T @ H
    # exact Hermitian symmetry and real diagonal
    G = 0.5 * (G + G.conj().T)
    return G, H.conj().T @ y


def sinr_from_gain(mu, clamp_margin=0.0):
    """
    ``rho = mu / (1 - mu)`` with a cap for gains at (or near) one.

    Returns
    -------
    rho : ndarray
    clamped : ndarray of bool
    """
    mu = np.asarray(mu, dtype=float)
    clamped = mu >= 1.0 - clamp_margin
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(clamped, RHO_CLAMP, mu / (1.0 - mu))
    return rho, clamped


def mmse_exact(H, y, N0, c):
    """
    Closed-form MMSE equalizer with exact gains and SINRs.

    Solves ``(G + N0 I) z = H^H y`` by Cholesky factorization. The gain of
    user ``i`` is row ``i`` of ``A^-1`` times column ``i`` of ``G``.
    """
    if not N0 > 0:
        raise ParameterError(f"exact MMSE needs N0 > 0, got {N0}")
    G, s_mf = gram_and_mf(H, y)
    U = G.shape[0]
    A = G + N0 * np.eye(U)
    try:
        cf = linalg.cho_factor(A, lower=True, check_finite=True)
    except linalg.LinAlgError as exc:
        raise SolverError(f"regularized Gram matrix is singular: {exc}") from exc

    z = linalg.cho_solve(cf, s_mf)
    if U <= EXPLICIT_INVERSE_MAX_U:
        A_inv = linalg.cho_solve(cf, np.eye(U))
        mu = np.einsum("ij,ji->i", A_inv, G).real
    else:
        # A^-1 G = I - N0 A^-1, and diag(A^-1) from the inverse factor
        L_inv = linalg.solve_triangular(cf[0], np.eye(U), lower=True)
        mu = 1.0 - N0 * np.sum(np.abs(L_inv) ** 2, axis=0)

    rho, clamped = sinr_from_gain(mu)
    return EqualizerOutput(
        z=z,
        mu=mu,
        rho=rho,
        llrs=llr_maxlog(z, mu, rho, c),
        iterations_used=0,
        mult_count=0,
        rho_clamped=clamped,
    )


def cd_reference(H, y, N0, mode, K, c, callback=None, return_count=False):
    """
    Textbook coordinate descent, recomputing the partial residual each step.

    Each update minimizes the objective exactly in one coordinate:
    ``z_u = h_u^H (y - sum_{j != u} h_j z_j) / (||h_u||^2 + alpha)``,
    followed by the box projection in BOX mode. Starts from zero and
    sweeps users in order ``0..U-1`` ``K`` times.

    Parameters
    ----------
    callback : callable, optional
        Called as ``callback(k, u, z)`` after every coordinate update.
        ``z`` is the live iterate and must not be modified.
    return_count : bool
        Also return the number of real multiplications performed.
    """
    H, y = _check_shapes(H, y)
    mode = DetectorMode(mode)
    if K < 1:
        raise ParameterError(f"K must be at least 1, got {K}")
    B, U = H.shape
    alpha = regularizer(mode, N0)
    norms = _col_norms_sq(H)
    if mode is DetectorMode.BOX and np.any(norms == 0):
        raise DegenerateError("zero channel column in BOX mode")

    z = np.zeros(U, dtype=complex)
    count = 0
    for k in range(K):
        for u in range(U):
            others = np.arange(U) != u
            partial = y - H[:, others] @ z[others]
            count += 4 * B * (U - 1)
            w = (H[:, u].conj() @ partial) / (norms[u] + alpha)
            count += 4 * B + 2
            z[u] = project_box(w, c) if mode is DetectorMode.BOX else w
            if callback is not None:
                callback(k, u, z)
    return (z, count) if return_count else z


def ocd_preprocess(H, mode, N0):
    """Regularized inverse squared column norms and gains."""
    H = np.asarray(H, dtype=complex)
    mode = DetectorMode(mode)
    alpha = regularizer(mode, N0)
    if alpha < 0:
        raise ParameterError(f"regularizer must be non-negative, got {alpha}")
    norms = _col_norms_sq(H)
    if np.any(norms + alpha == 0):
        raise DegenerateError("zero channel column with zero regularizer")
    d_inv = 1.0 / (norms + alpha)
    if mode is DetectorMode.BOX:
        p = np.ones_like(d_inv)
    else:
        p = d_inv * norms
    return OcdPreprocessed(mode=mode, alpha=alpha, d_inv=d_inv, p=p, col_norms_sq=norms)


def ocd_equalize(H, y, prep, mode, K, c, callback=None):
    """
    Optimized coordinate descent sweeps with a running residual.

    Maintains ``r = y - H z`` incrementally: each update costs one inner
    product ``h_u^H r`` and one column update ``r -= h_u * dz``.

    Parameters
    ----------
    H : ndarray, shape (B, U)
    y : ndarray, shape (B,)
    prep : OcdPreprocessed
    mode : DetectorMode
        Must match ``prep.mode``.
    K : int
        Number of sweeps over all users.
    c : Constellation
        Used for the projection in BOX mode.
    callback : callable, optional
        Called as ``callback(k, u, z, r)`` after every coordinate update.

    Returns
    -------
    z : ndarray, shape (U,)
    mult_count : int
        Real multiplications spent inside the sweeps.
    """
    H, y = _check_shapes(H, y)
    mode = DetectorMode(mode)
    if mode is not prep.mode:
        raise ParameterError(f"preprocessing was done for {prep.mode}, not {mode}")
    if K < 1:
        raise ParameterError(f"K must be at least 1, got {K}")
    B, U = H.shape
    if prep.d_inv.shape != (U,):
        raise ShapeError("preprocessing does not match H")
    box = mode is DetectorMode.BOX

    r = y.copy()
    z = np.zeros(U, dtype=complex)
    count = 0
    for k in range(K):
        for u in range(U):
            h = H[:, u]
            ip = h.conj() @ r
            count += 4 * B
            w = prep.d_inv[u] * ip + prep.p[u] * z[u]
            count += 2 + 2
            z_new = project_box(w, c)[()] if box else w
            dz = z_new - z[u]
            z[u] = z_new
            r -= h * dz
            count += 4 * B
            if callback is not None:
                callback(k, u, z, r)
    return z, count


def approx_gains(H, N0):
    """
    Channel gains and SINRs from regularized column norms.

    ``mu_i = g_i / (g_i + N0)`` with ``g_i`` the Gram diagonal. The
    N0-regularized norms are used regardless of equalization mode so the
    result stays below one in BOX mode too.

    Returns
    -------
    mu, rho : ndarray, shape (U,)
    clamped : ndarray of bool
    """
    g = _col_norms_sq(np.asarray(H, dtype=complex))
    if np.any(g + N0 == 0):
        raise DegenerateError("zero channel column with N0 = 0")
    mu = g / (g + N0)
    rho, clamped = sinr_from_gain(mu, MU_CLAMP_MARGIN)
    return mu, rho, clamped


def ocd_detect(H, y, N0, mode, K, c):
    """OCD equalization followed by approximate max-log LLRs."""
    prep = ocd_preprocess(H, mode, N0)
    z, count = ocd_equalize(H, y, prep, mode, K, c)
    if prep.mode is DetectorMode.MMSE:
        mu = prep.d_inv * prep.col_norms_sq
        rho, clamped = sinr_from_gain(mu, MU_CLAMP_MARGIN)
    else:
        mu, rho, clamped = approx_gains(H, N0)
    return EqualizerOutput(
        z=z,
        mu=mu,
        rho=rho,
        llrs=llr_maxlog(z, mu, rho, c),
        iterations_used=K,
        mult_count=count,
        rho_clamped=clamped,
    )


def objective_value(H, y, z, mode, N0, c=None):
    """
    ``||y - H z||^2`` plus the mode's regularizer.

    In BOX mode the regularizer is the indicator of the box, so any ``z``
    outside it returns ``inf``. ``c`` is required in BOX mode.
    """
    H, y = _check_shapes(H, y)
    z = np.asarray(z, dtype=complex)
    res = y - H @ z
    f = float(np.vdot(res, res).real)
    if DetectorMode(mode) is DetectorMode.MMSE:
        return f + N0 * float(np.vdot(z, z).real)
    if c is None:
        raise ParameterError("BOX objective needs the constellation")
    a = c.box_radius
    inside = np.all(np.abs(z.real) <= a) and (
        np.all(z.imag == 0) if c.is_real else np.all(np.abs(z.imag) <= a)
    )
    return f if inside else np.inf


def multiplication_count_cd(B, U, K):
    """Real multiplications of K plain CD sweeps: ``K (4 B U^2 + 2 U)``."""
    return K * (4 * B * U * U + 2 * U)


def multiplication_count_ocd(B, U, K):
    """Real multiplications of K OCD sweeps: ``K (8 B U + 4 U)``."""
    return K * (8 * B * U + 4 * U)
