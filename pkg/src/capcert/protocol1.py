"""
Capacity detection for arbitrarily correlated multimode channels.

Alice sends ``k`` squeezed, randomly displaced probes (half position-, half
momentum-squeezed), Bob homodynes them, and both discretize their values into
``2 alpha / d`` bins. If the mean bin distance is at most ``t`` the remaining
``n`` modes carry at least :func:`theorem1_bound` qubits.

The statement of the capacity guarantee names the confidence parameter
``p_err``; the underlying argument phrases the same quantity as a lower limit
``p_pass`` on the probability of passing the test. Here the two are the same
number, ``ProtocolOneConfig.p_err``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from ._search import maximize_on_interval
from .channels import ChannelModel, sample_channel_quadrature, squeezing_db_to_nbar
from .gaussmath import erf_probability_in_window, erf_tail_outside_window, log2_gamma_fn

POSITION, MOMENTUM = 0, 1


@dataclass(frozen=True)
class ProtocolOneConfig:
    """All knobs of the correlated-noise protocol.

    ``t`` is measured in bins. Give the probe energy either as ``n_bar`` or
    as squeezing ``s_db``.
    """

    n: float
    k: float
    d: float
    t: float
    alpha: float
    n_bar: float = None
    epsilon: float = 0.02
    p_err: float = 0.1
    s_db: float = None

    def __post_init__(self):
        if (self.n_bar is None) == (self.s_db is None):
            raise ValueError("give exactly one of n_bar or s_db")
        if self.n_bar is None:
            object.__setattr__(self, "n_bar", squeezing_db_to_nbar(self.s_db))
        if not (self.n >= 1 and self.k >= 1):
            raise ValueError(f"n and k must be positive, got n={self.n}, k={self.k}")
        if self.d <= 0 or self.alpha <= 0:
            raise ValueError("d and alpha must be positive")
        ratio = 2.0 * self.alpha / self.d
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio) or round(ratio) < 1:
            raise ValueError(f"2*alpha/d must be a positive integer, got {ratio!r}")
        if self.t < 0:
            raise ValueError(f"threshold t must be >= 0, got {self.t}")
        if self.n_bar < 0:
            raise ValueError(f"n_bar must be >= 0, got {self.n_bar}")
        if not 0 < self.epsilon < 1 or not 0 < self.p_err < 1:
            raise ValueError("epsilon and p_err must lie in (0, 1)")

    @property
    def n_bins(self):
        return int(round(2.0 * self.alpha / self.d))

    @property
    def variance(self):
        """Displacement variance ``2 n_bar + 1`` (equals ``10**(s/10)``)."""
        return 2.0 * self.n_bar + 1.0

    @property
    def p_window(self):
        """Probability that one displacement needs no redraw."""
        return erf_probability_in_window(self.alpha, self.variance)


@dataclass
class TestRecord:
    """Discretized test data: bin indices for Alice and Bob, basis labels, redraw counts."""

    xA: np.ndarray
    xB: np.ndarray
    bases: np.ndarray
    retries: np.ndarray

    __test__ = False  # not a pytest class


@dataclass
class TheoremOneBound:
    q_lower: float
    eta_star: float = None
    lam: float = 0.0
    zeta: float = None
    mu: float = None
    delta: float = None
    status: str = "ok"


@dataclass
class ProtocolOneVerdict:
    passed: bool
    avg_distance: float
    q_lower: float = None
    ent_lower: float = None
    bound: TheoremOneBound = field(default=None, repr=False)

    def to_dict(self):
        b = self.bound
        return {
            "passed": bool(self.passed),
            "avg_distance": float(self.avg_distance),
            "q_lower": self.q_lower,
            "ent_lower": self.ent_lower,
            "eta_star": b.eta_star if b else None,
            "lambda": b.lam if b else None,
            "zeta": b.zeta if b else None,
            "mu": b.mu if b else None,
            "delta": b.delta if b else None,
        }


# -- bound evaluation -------------------------------------------------------

def cutoff_slack(cfg):
    """``sqrt(2 (1 - p_window**n))``, the smoothing cost of the displacement cutoff."""
    tail = erf_tail_outside_window(cfg.alpha, cfg.variance)
    return math.sqrt(2.0 * -math.expm1(cfg.n * math.log1p(-tail)))


def cutoff_penalty(cfg):
    """The quantity ``lambda``; the capacity bound is trivially 0 once it reaches ``sqrt(eps/2)``."""
    p = cfg.p_err
    return 8.0 * cutoff_slack(cfg) * (3.0 + 5.0 / (4.0 * p) - 1.0 / math.sqrt(p))


def _zeta(eta, root_eps, slack, p_err):
    return (root_eps - eta + 8.0 * slack / math.sqrt(p_err)) / (3.0 + 5.0 / (4.0 * p_err))


def _mu(zeta, cfg, slack):
    arg = zeta / 4.0 - 2.0 * slack
    if not arg > 0:
        return math.nan
    log_term = -math.log2(arg)
    if log_term < 0:
        return math.nan
    n, k = cfg.n, cfg.k
    return (2.0 * cfg.alpha / cfg.d) * math.sqrt((k + n) * (k + 1.0) / (n * k * k) * log_term)


def _objective(cfg, root_eps, slack):
    per_mode = math.log2(2.0 * math.pi / cfg.d ** 2)

    def terms(eta):
        zeta = _zeta(eta, root_eps, slack, cfg.p_err)
        mu = _mu(zeta, cfg, slack)
        if math.isnan(mu):
            return None
        delta = 4.0 * math.log2(1.0 / eta) + 2.0 * math.log2(2.0 / zeta ** 2) + 2.0
        value = cfg.n * per_mode - 2.0 * cfg.n * log2_gamma_fn(cfg.t + mu) - delta
        return value, zeta, mu, delta

    def f(eta):
        out = terms(eta)
        return -math.inf if out is None else out[0]

    return f, terms


def theorem1_bound(cfg):
    """Certified lower bound (qubits, all ``n`` modes together) when the test passes.

    Returns a :class:`TheoremOneBound`; ``status`` is ``"trivial"`` when the
    cutoff penalty reaches ``sqrt(eps/2)`` and ``"cutoff-dominated"`` when no
    feasible ``eta`` exists.
    """
    lam = cutoff_penalty(cfg)
    root_eps = math.sqrt(cfg.epsilon / 2.0)
    if lam >= root_eps:
        return TheoremOneBound(0.0, lam=lam, status="trivial")
    slack = cutoff_slack(cfg)
    f, terms = _objective(cfg, root_eps, slack)
    eta, value = maximize_on_interval(f, 0.0, root_eps - lam)
    if eta is None:
        return TheoremOneBound(0.0, lam=lam, status="cutoff-dominated")
    _, zeta, mu, delta = terms(eta)
    return TheoremOneBound(max(0.0, value), eta_star=eta, lam=lam, zeta=zeta, mu=mu,
                           delta=delta)


def entanglement_bound(cfg):
    """Lower bound on distillable ebits over the ``n`` modes, or ``None`` if the eta-range is empty.

    Same structure as the capacity bound with ``eps`` replaced by ``2 eps``
    inside ``zeta`` and one extra bit. Not clamped at zero.
    """
    lam = cutoff_penalty(cfg)
    root_eps = math.sqrt(cfg.epsilon)
    if lam >= root_eps:
        return None
    f, _ = _objective(cfg, root_eps, cutoff_slack(cfg))
    eta, value = maximize_on_interval(f, 0.0, root_eps - lam)
    if eta is None:
        return None
    return value + 1.0


def asymptotic_B(d, t):
    """Per-mode asymptotic bound ``max(0, log2(2 pi / d^2) - 2 log2 gamma(t))``."""
    if d <= 0 or t < 0:
        raise ValueError("need d > 0 and t >= 0")
    return max(0.0, math.log2(2.0 * math.pi / d ** 2) - 2.0 * log2_gamma_fn(t))


def asymptotic_threshold_t(tau, n_bar, n_th, d):
    """Mean bin distance a thermal-loss channel produces, the threshold that passes almost surely."""
    rad = n_bar * (1.0 + tau) + 1.0 + n_th * (1.0 - tau) - 2.0 * math.sqrt(n_bar * (n_bar + 1.0) * tau)
    assert rad >= -1e-12, rad
    return math.sqrt(4.0 / math.pi) * math.sqrt(max(rad, 0.0)) / d


def pass_probability_pure_loss(k, t, d, tau, n_bar):
    """Approximate (central-limit) probability that a pure-loss channel passes the test."""
    gap = 2.0 * (math.sqrt(n_bar + 1.0) - math.sqrt(tau * n_bar))
    arg = math.sqrt(k / (math.pi - 2.0)) * (t * d * math.sqrt(math.pi) / gap - 1.0)
    return 0.5 + 0.5 * math.erf(arg)


# -- test simulation --------------------------------------------------------

def prepare_test_inputs(cfg, rng):
    """Draw basis labels and cut-off displacements for ``k`` probes.

    Returns ``(displacements, bases, retries)``; ``retries[i]`` counts how
    many draws of probe ``i`` fell outside ``[-alpha, alpha]``.
    """
    k = int(cfg.k)
    if k % 2:
        raise ValueError(f"k must be even, got {k}")
    bases = rng.permutation(np.repeat([POSITION, MOMENTUM], k // 2))
    sd = math.sqrt(cfg.variance)
    x = rng.normal(0.0, sd, size=k)
    retries = np.zeros(k, dtype=np.int64)
    bad = np.flatnonzero(np.abs(x) > cfg.alpha)
    while bad.size:
        retries[bad] += 1
        x[bad] = rng.normal(0.0, sd, size=bad.size)
        bad = bad[np.abs(x[bad]) > cfg.alpha]
    return x, bases, retries


def simulate_homodyne(cfg, displacements, bases, channel, rng):
    """Bob's continuous homodyne outcomes for probes sent through ``channel``.

    Each probe is prepared as the conditional state obtained by homodyning
    one arm of a two-mode squeezed vacuum with ``n_bar`` photons per mode:
    a squeezed state of variance ``1/V`` centred at ``sqrt(1 - 1/V^2) x``,
    with ``V = 2 n_bar + 1``. The channel then acts on the measured quadrature.
    """
    v = cfg.variance
    shift = math.sqrt(max(0.0, 1.0 - 1.0 / v ** 2))
    x = np.asarray(displacements, dtype=float)
    prepared = shift * x + rng.normal(0.0, math.sqrt(1.0 / v), size=x.shape)
    return sample_channel_quadrature(channel, prepared, bases, rng)


def discretize(value, d, alpha):
    """Bin index in ``{0, ..., 2 alpha/d - 1}``; bin ``j`` covers ``(-alpha + j d, -alpha + (j+1) d]``.

    The two end bins are unbounded.
    """
    n_bins = int(round(2.0 * alpha / d))
    j = np.ceil((np.asarray(value, dtype=float) + alpha) / d) - 1
    j = np.clip(j, 0, n_bins - 1).astype(np.int64)
    return int(j) if j.ndim == 0 else j


def correlation_test(xA, xB, t):
    """``(passed, avg_distance)`` with ``passed`` iff the mean absolute bin distance is <= ``t``."""
    xA = np.asarray(xA)
    xB = np.asarray(xB)
    if xA.shape != xB.shape:
        raise ValueError(f"length mismatch: {xA.shape} vs {xB.shape}")
    avg = float(np.mean(np.abs(xA.astype(np.int64) - xB.astype(np.int64))))
    return avg <= t, avg


def simulate_test_record(cfg, channel, rng, sampler=None):
    """Run the test stage and return a :class:`TestRecord`.

    ``sampler(displacements, bases, rng)`` can replace the i.i.d. channel
    model to inject arbitrary, possibly correlated, output data.
    """
    x, bases, retries = prepare_test_inputs(cfg, rng)
    if sampler is None:
        y = simulate_homodyne(cfg, x, bases, channel, rng)
    else:
        y = np.asarray(sampler(x, bases, rng), dtype=float)
    return TestRecord(discretize(x, cfg.d, cfg.alpha), discretize(y, cfg.d, cfg.alpha),
                      bases, retries)


def run_protocol_one(cfg, channel=None, rng=None, sampler=None, record=None):
    """Simulate (or take) a test record, apply the correlation test and certify bounds if it passes."""
    if record is None:
        if channel is None and sampler is None:
            channel = ChannelModel.identity()
        record = simulate_test_record(cfg, channel, rng, sampler)
    passed, avg = correlation_test(record.xA, record.xB, cfg.t)
    if not passed:
        return ProtocolOneVerdict(False, avg)
    bound = theorem1_bound(cfg)
    return ProtocolOneVerdict(True, avg, bound.q_lower, entanglement_bound(cfg), bound)

