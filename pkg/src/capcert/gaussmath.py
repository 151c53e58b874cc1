"""
Special functions and symplectic linear algebra for Gaussian states.

Conventions
-----------
Quadratures are ordered ``(q1, p1, q2, p2, ...)`` and the vacuum has
covariance matrix equal to the identity, so a thermal state with mean photon
number ``n`` has variance ``2n + 1`` in both quadratures. All entropies are in
bits.
"""

import math

import numpy as np
from scipy import special

SYMPLECTIC_TOL = 1e-9
_TAIL_FLOOR = 1e-300


def symplectic_form(n_modes):
    """Block-diagonal symplectic form with ``[[0, 1], [-1, 0]]`` per mode."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def g_entropy(x):
    """Von Neumann entropy (bits) of a thermal mode with symplectic eigenvalue ``x``.

    ``g(x) = (x+1)/2 log2((x+1)/2) - (x-1)/2 log2((x-1)/2)``, continuous at
    ``x = 1`` where it vanishes.

    Raises
    ------
    ValueError
        If ``x < 1 - 1e-9``. Values in ``[1 - 1e-9, 1)`` are clamped to 1.
    """
    x = float(x)
    if not x >= 1.0 - SYMPLECTIC_TOL:
        raise ValueError(f"symplectic eigenvalue {x!r} is below 1")
    v = max(x - 1.0, 0.0) / 2.0
    if v == 0.0:
        return 0.0
    # (1+v) ln(1+v) - v ln v, rearranged so neither end cancels
    nats = math.log1p(v) + v * math.log1p(1.0 / v)
    return nats / math.log(2.0)


def log2_gamma_fn(x):
    """``log2`` of :func:`gamma_fn`, finite for arguments where gamma_fn overflows."""
    x = float(x)
    if x < 0:
        raise ValueError(f"gamma_fn needs x >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    r = math.hypot(1.0, x)
    # x / (sqrt(1+x^2) - 1) == (sqrt(1+x^2) + 1) / x, without the cancellation
    return (math.asinh(x) + x * math.log((r + 1.0) / x)) / math.log(2.0)


def gamma_fn(x):
    """``(x + sqrt(1+x^2)) * (x / (sqrt(1+x^2) - 1))**x`` with limit 1 at ``x = 0``."""
    return 2.0 ** log2_gamma_fn(x)


def binary_entropy(p):
    """Shannon entropy (bits) of a Bernoulli(p) variable."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p!r} outside [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


def _check_window(alpha, variance):
    if not (alpha > 0 and variance > 0):
        raise ValueError(f"need alpha > 0 and variance > 0, got {alpha!r}, {variance!r}")


def erf_probability_in_window(alpha, variance):
    """Probability that a zero-mean Gaussian with ``variance`` lands in ``(-alpha, alpha)``."""
    _check_window(alpha, variance)
    return float(special.erf(alpha / math.sqrt(2.0 * variance)))


def erf_tail_outside_window(alpha, variance):
    """Complement of :func:`erf_probability_in_window`, accurate deep in the tail.

    Tails below 1e-300 are reported as exactly 0.
    """
    _check_window(alpha, variance)
    tail = float(special.erfc(alpha / math.sqrt(2.0 * variance)))
    return 0.0 if tail < _TAIL_FLOOR else tail


def _as_covariance(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise ValueError(f"covariance must be a square 2m x 2m matrix, got shape {M.shape}")
    if not np.allclose(M, M.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(M).max())):
        raise ValueError("covariance matrix is not symmetric")
    return M


def symplectic_eigenvalues(M):
    """Symplectic spectrum of a positive-definite covariance matrix, sorted descending.

    Computed from the Hermitian matrix ``M^{1/2} (i Omega) M^{1/2}``, whose
    eigenvalues are ``+-nu_j``.

    Raises
    ------
    ValueError
        If ``M`` is not symmetric or not positive definite.
    """
    M = _as_covariance(M)
    w, V = np.linalg.eigh(M)
    if w.min() <= 0:
        raise ValueError("covariance matrix is not positive definite")
    root = (V * np.sqrt(w)) @ V.T
    m = M.shape[0] // 2
    H = root @ (1j * symplectic_form(m)) @ root
    ev = np.linalg.eigvalsh((H + H.conj().T) / 2)
    return np.sort(ev[m:])[::-1]


def bona_fide_check(M, tol=SYMPLECTIC_TOL):
    """True iff ``M + i Omega >= 0``, i.e. every symplectic eigenvalue is at least 1."""
    M = _as_covariance(M)
    try:
        nu = symplectic_eigenvalues(M)
    except ValueError:
        return False
    return bool(nu.min() >= 1.0 - tol)


def gaussian_state_entropy(M):
    """Entropy in bits of the Gaussian state with covariance ``M``."""
    nu = symplectic_eigenvalues(M)
    if nu.min() < 1.0 - SYMPLECTIC_TOL:
        raise ValueError(f"unphysical covariance, min symplectic eigenvalue {nu.min():.6g}")
    return float(sum(g_entropy(v) for v in nu))
