"""
Capacity detection for i.i.d. phase-insensitive Gaussian channels.

Alice draws ``k`` coherent-state amplitudes ``x``, Bob heterodynes the
outputs into ``y``. One-sided chi-squared confidence bounds give the largest
plausible output variance (``sigma_max``) and the smallest plausible
cross-correlation (``gamma_min``). If they clear the thresholds ``a`` and
``c``, the conditional entropy of the Gaussian state with covariance
``xi(a, c, n_bar)`` bounds the capacity of the remaining ``n`` uses.

Random phase symmetrization is not simulated: phase-insensitive channels
leave the two-mode squeezed probe state invariant under it.
"""

from dataclasses import dataclass
import math

import numpy as np

from ._search import maximize_on_interval
from .channels import ChannelModel, apply_channel_cov, tmsv_cov
from .gaussmath import bona_fide_check, g_entropy, symplectic_eigenvalues


def xi_matrix(a, c, n_bar):
    """Threshold covariance ``[[(2 n_bar + 1) I, c Z], [c Z, a I]]``."""
    sz = np.diag([1.0, -1.0])
    return np.block([[(2.0 * n_bar + 1.0) * np.eye(2), c * sz], [c * sz, a * np.eye(2)]])


@dataclass(frozen=True)
class ProtocolTwoConfig:
    n: float
    k: float
    n_bar: float
    a: float
    c: float
    delta: float = 0.05
    epsilon: float = 0.02

    def __post_init__(self):
        if not (self.n >= 1 and self.k >= 1):
            raise ValueError("n and k must be positive")
        if self.n_bar < 0:
            raise ValueError("n_bar must be >= 0")
        if not 0 < self.delta < 1 or not 0 < self.epsilon < 1:
            raise ValueError("delta and epsilon must lie in (0, 1)")
        if self.c < 0:
            raise ValueError("c must be >= 0")
        if not bona_fide_check(xi_matrix(self.a, self.c, self.n_bar)):
            raise ValueError(f"thresholds a={self.a}, c={self.c} do not give a physical covariance")

    @property
    def xi(self):
        return xi_matrix(self.a, self.c, self.n_bar)


@dataclass
class HeterodyneRecord:
    x: np.ndarray
    y: np.ndarray
    channel: ChannelModel = None

    def __post_init__(self):
        if self.x.shape != self.y.shape:
            raise ValueError("x and y must have the same length")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise ValueError("heterodyne record contains non-finite values")

    @property
    def k(self):
        return self.x.size


@dataclass
class ProtocolTwoVerdict:
    sigma_max: float
    gamma_min: float
    passed: bool
    q_lower: float = None
    b_iid: float = None
    nu1: float = None
    nu2: float = None

    def to_dict(self):
        return {"sigma_max": self.sigma_max, "gamma_min": self.gamma_min,
                "passed": bool(self.passed), "q_lower": self.q_lower, "b_iid": self.b_iid,
                "nu1": self.nu1, "nu2": self.nu2}


def heterodyne_covariance(ch, n_bar):
    """Covariance of ``(Re x, Im x, Re y, Im y)`` for one probe.

    The state covariance after the channel plus half a vacuum unit on each
    diagonal entry: ``A = (2 n_bar + 3/2) I``, ``B = (Sigma_b + 1/2) I`` and
    cross block ``Sigma_c Z``.
    """
    return apply_channel_cov(ch, tmsv_cov(n_bar), 1) + 0.5 * np.eye(4)


def simulate_heterodyne_pairs(ch, n_bar, k, rng):
    """Draw ``k`` i.i.d. (Alice, Bob) complex amplitude pairs."""
    if not isinstance(ch, ChannelModel):
        raise TypeError("channel must be a phase-insensitive ChannelModel")
    cov = heterodyne_covariance(ch, n_bar)
    z = rng.multivariate_normal(np.zeros(4), cov, size=int(k), method="cholesky")
    return HeterodyneRecord(z[:, 0] + 1j * z[:, 1], z[:, 2] + 1j * z[:, 3], ch)


def cross_term(x, y):
    """Real bilinear form ``<x, y> = sum(Re x Re y - Im x Im y) = Re(sum x y)``.

    Chosen so that ``||conj(x) + y||^2 = ||x||^2 + ||y||^2 + 2 <x, y>``.
    For one sample ``x = 1 + 2j``, ``y = 3 + 4j`` it is ``3 - 8 = -5``.
    """
    return float(np.real(np.sum(np.asarray(x) * np.asarray(y))))


def _lower_deviation(k, delta):
    denom = k - math.sqrt(2.0 * k * math.log(1.0 / delta))
    if denom <= 0:
        raise ValueError(f"k={k} too small for delta={delta}")
    return denom


def sigma_max(y, k, delta):
    """Upper confidence bound on Bob's output variance."""
    norm2 = float(np.sum(np.abs(np.asarray(y)) ** 2))
    return norm2 / (2.0 * _lower_deviation(k, delta)) - 0.5


def gamma_min(x, y, k, delta, n_bar):
    """Lower confidence bound on the Alice-Bob cross-correlation."""
    x = np.asarray(x)
    y = np.asarray(y)
    nx = float(np.sum(np.abs(x) ** 2))
    ny = float(np.sum(np.abs(y) ** 2))
    l2 = math.log(2.0 / delta)
    upper = 4.0 * (k + math.sqrt(2.0 * k * l2) + l2)
    return (nx + ny + 2.0 * cross_term(x, y)) / upper - n_bar \
        - ny / (4.0 * _lower_deviation(k, delta)) - 0.75


def threshold_test(sigma_max_value, gamma_min_value, a, c):
    return bool(gamma_min_value >= c and sigma_max_value <= a)


def asymptotic_Biid(a, c, n_bar):
    """``max(0, g(a) - g(nu1) - g(nu2))`` for the threshold covariance."""
    nu = symplectic_eigenvalues(xi_matrix(a, c, n_bar))
    if nu.min() < 1.0 - 1e-9:
        raise ValueError(f"xi(a={a}, c={c}) is not a physical covariance")
    return max(0.0, g_entropy(a) - g_entropy(nu[0]) - g_entropy(nu[1]))


def finite_size_correction(k, n_bar, epsilon):
    """``inf_eta h(eta)`` over ``(0, sqrt(eps/2))``; returns ``(eta_star, h_min)``."""
    root_eps = math.sqrt(epsilon / 2.0)
    omega = 4.0 * math.sqrt(k) * math.log2(2.0 * math.sqrt(1.0 + n_bar) + 2.0 * math.sqrt(n_bar) + 1.0)

    def neg_h(eta):
        return -(omega * math.sqrt(math.log2(2.0 / (root_eps - eta) ** 2))
                 - 4.0 * math.log2(eta) + 2.0)

    eta, val = maximize_on_interval(neg_h, 0.0, root_eps)
    return eta, -val


def theorem2_bound(cfg):
    """Certified capacity lower bound (qubits, all ``n`` uses) given passed thresholds."""
    nu = symplectic_eigenvalues(cfg.xi)
    _, h_min = finite_size_correction(cfg.k, cfg.n_bar, cfg.epsilon)
    per_use = g_entropy(cfg.a) - g_entropy(nu[0]) - g_entropy(nu[1]) - h_min / cfg.k
    return cfg.n * max(0.0, per_use)


def optimal_thresholds_loss(tau, n_bar, n_th):
    """Thresholds ``(a, c)`` that a thermal-loss channel meets with probability -> 1 as ``k`` grows."""
    v = 2.0 * n_bar + 1.0
    a = tau * v + (1.0 - tau) * (2.0 * n_th + 1.0)
    c = math.sqrt(tau) * math.sqrt(4.0 * n_bar * (n_bar + 1.0))
    return a, c


def energy_constrained_capacity_pure_loss(tau, n_bar):
    """``max(0, g(2 tau n + 1) - g(2 (1 - tau) n + 1))``, the pure-loss capacity at mean energy ``n_bar``."""
    return max(0.0, g_entropy(2.0 * tau * n_bar + 1.0) - g_entropy(2.0 * (1.0 - tau) * n_bar + 1.0))


def run_protocol_two(cfg, channel, rng, record=None):
    """Estimate, test, and (if passed) certify; returns a :class:`ProtocolTwoVerdict`."""
    if record is None:
        record = simulate_heterodyne_pairs(channel, cfg.n_bar, cfg.k, rng)
    k = record.k
    smax = sigma_max(record.y, k, cfg.delta)
    gmin = gamma_min(record.x, record.y, k, cfg.delta, cfg.n_bar)
    nu = symplectic_eigenvalues(cfg.xi)
    passed = threshold_test(smax, gmin, cfg.a, cfg.c)
    verdict = ProtocolTwoVerdict(smax, gmin, passed, nu1=float(nu[0]), nu2=float(nu[1]))
    if passed:
        verdict.q_lower = theorem2_bound(cfg)
        verdict.b_iid = asymptotic_Biid(cfg.a, cfg.c, cfg.n_bar)
    return verdict


def channel_thresholds(ch, n_bar):
    """Thresholds ``(a, c)`` equal to the output variance and cross-correlation of ``ch`` on the probe.

    A channel meeting these exactly passes with probability -> 1 as ``k`` grows
    only in the limit; in practice use slightly looser values.
    """
    M = apply_channel_cov(ch, tmsv_cov(n_bar), 1)
    return float(M[2, 2]), float(M[0, 2])
