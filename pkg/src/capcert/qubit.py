"""
Capacity certification for qubit channels via two-qubit Pauli tomography.

Alice sends one half of ``|Psi+>`` through the channel; the pair is measured
in one of 16 local Pauli settings. Counts define a confidence polytope of
two-qubit states, and the largest conditional entropy ``H(A|B)`` inside it,
together with finite-size terms, bounds the one-shot capacity.

Subsystem order is ``A (reference) x B (channel output)`` throughout.
"""

from dataclasses import dataclass
import csv
import math

import numpy as np
from scipy import optimize

from ._search import maximize_on_interval
from .gaussmath import binary_entropy

PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
N_SETTINGS = 16
N_OUTCOMES = 4


def kraus_operators(alpha, beta):
    """``A1 = cos(a)|0><0| + cos(b)|1><1|``, ``A2 = sin(b)|0><1| + sin(a)|1><0|``."""
    A1 = np.array([[math.cos(alpha), 0], [0, math.cos(beta)]], dtype=complex)
    A2 = np.array([[0, math.sin(beta)], [math.sin(alpha), 0]], dtype=complex)
    return A1, A2


@dataclass(frozen=True)
class QubitChannelSpec:
    """Two-parameter qubit channel; ``alpha == beta`` is dephasing-type, ``beta == 0`` amplitude damping."""

    alpha: float
    beta: float

    @property
    def kraus(self):
        return kraus_operators(self.alpha, self.beta)

    def completeness_error(self):
        A1, A2 = self.kraus
        return float(np.abs(A1.conj().T @ A1 + A2.conj().T @ A2 - np.eye(2)).max())

    def apply(self, rho):
        return sum(K @ rho @ K.conj().T for K in self.kraus)


def choi_state(spec):
    """``(id x Lambda)(|Psi+><Psi+|)`` as a 4x4 density matrix."""
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / math.sqrt(2)
    proj = np.outer(psi, psi.conj())
    out = np.zeros((4, 4), dtype=complex)
    for K in spec.kraus:
        L = np.kron(np.eye(2), K)
        out += L @ proj @ L.conj().T
    return out


def von_neumann_entropy(rho):
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def reduced_output(rho):
    """Partial trace over the reference ``A``."""
    r = np.asarray(rho).reshape(2, 2, 2, 2)
    return np.einsum("abad->bd", r)


def _check_density(rho, tol=1e-9):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 density matrix, got shape {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > tol or abs(np.trace(rho) - 1) > tol:
        raise ValueError("not a Hermitian unit-trace matrix")
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() < -tol:
        raise ValueError("matrix is not positive semidefinite")
    return rho


def coherent_information(choi):
    """``H(B) - H(AB)`` in bits; may be negative."""
    rho = _check_density(choi)
    return von_neumann_entropy(reduced_output(rho)) - von_neumann_entropy(rho)


def conditional_entropy(rho):
    """``H(A|B) = H(AB) - H(B)``."""
    return von_neumann_entropy(rho) - von_neumann_entropy(reduced_output(rho))


def coherent_information_closed_form(alpha, beta):
    """Closed form of :func:`coherent_information` for the two-parameter family.

    ``h((cos^2 a + sin^2 b)/2) - h((sin^2 a + sin^2 b)/2)``: output entropy
    minus the entropy of the complementary (environment) output.
    """
    sa, sb = math.sin(alpha) ** 2, math.sin(beta) ** 2
    return binary_entropy((1 - sa + sb) / 2) - binary_entropy((sa + sb) / 2)


# -- Pauli tomography ---------------------------------------------------------

def _eigenprojectors(i):
    # the identity "observable" is read out in the Z basis
    P = PAULIS[i if i else 3]
    w, V = np.linalg.eigh(P)
    order = np.argsort(-w)  # +1 eigenvector first
    return [np.outer(V[:, j], V[:, j].conj()) for j in order]


def pauli_povm(setting):
    """Four projectors for setting ``4 i + j`` (Pauli ``i`` on A, ``j`` on B); outcome ``l = 2 a + b``."""
    i, j = divmod(int(setting), 4)
    PA, PB = _eigenprojectors(i), _eigenprojectors(j)
    return [np.kron(PA[a], PB[b]) for a in range(2) for b in range(2)]


_POVMS = np.array([pauli_povm(s) for s in range(N_SETTINGS)])  # (16, 4, 4, 4)


def outcome_probabilities(rho):
    """``tr(rho E_k^l)`` as a (16, 4) array."""
    p = np.real(np.einsum("klij,ji->kl", _POVMS, rho))
    return np.clip(p, 0.0, 1.0)


@dataclass
class TomographyCounts:
    """Outcome counts ``counts[k, l]`` and per-cell error budgets ``delta_cells[k, l]``."""

    counts: np.ndarray
    delta_cells: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        self.delta_cells = np.asarray(self.delta_cells, dtype=float)
        if self.counts.shape != (N_SETTINGS, N_OUTCOMES) or self.delta_cells.shape != self.counts.shape:
            raise ValueError("counts and delta_cells must both have shape (16, 4)")
        if (self.counts < 0).any():
            raise ValueError("negative counts")
        if self.counts.sum() == 0:
            raise ValueError("no measurement rounds recorded")
        if not ((self.delta_cells > 0) & (self.delta_cells < 1)).all():
            raise ValueError("per-cell error budgets must lie in (0, 1)")

    @classmethod
    def uniform(cls, counts, delta):
        """Split ``delta`` evenly over the 64 cells."""
        return cls(counts, np.full((N_SETTINGS, N_OUTCOMES), delta / (N_SETTINGS * N_OUTCOMES)))

    @property
    def n_k(self):
        return self.counts.sum(axis=1)

    @property
    def n(self):
        return int(self.counts.sum())

    @property
    def delta(self):
        return float(self.delta_cells.sum())

    @classmethod
    def from_csv(cls, path, delta):
        """Read ``setting_index,outcome_index,count`` rows (header required)."""
        counts = np.zeros((N_SETTINGS, N_OUTCOMES), dtype=np.int64)
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            need = {"setting_index", "outcome_index", "count"}
            if reader.fieldnames is None or set(reader.fieldnames) != need:
                raise ValueError(f"counts CSV needs exactly the columns {sorted(need)}")
            for row in reader:
                k, l, c = int(row["setting_index"]), int(row["outcome_index"]), int(row["count"])
                if not (0 <= k < N_SETTINGS and 0 <= l < N_OUTCOMES):
                    raise ValueError(f"cell ({k}, {l}) out of range")
                counts[k, l] += c
        return cls.uniform(counts, delta)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["setting_index", "outcome_index", "count"])
            for k in range(N_SETTINGS):
                for l in range(N_OUTCOMES):
                    w.writerow([k, l, int(self.counts[k, l])])


def simulate_tomography(rho, shots_per_setting, rng, delta=0.01):
    """Multinomial Pauli-tomography counts with equal shots per setting."""
    probs = outcome_probabilities(rho)
    probs = probs / probs.sum(axis=1, keepdims=True)
    counts = np.array([rng.multinomial(int(shots_per_setting), p) for p in probs])
    return TomographyCounts.uniform(counts, delta)


def kl_bernoulli(x, y):
    """Relative entropy ``D(x || y)`` of Bernoulli distributions, in nats."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(x > 0, x * np.log(x / y), 0.0)
        b = np.where(x < 1, (1 - x) * np.log((1 - x) / (1 - y)), 0.0)
    return a + b


def confidence_epsilon(p_hat, delta_cell, n, tol=1e-13):
    """Positive root ``eps`` of ``D(p_hat || p_hat + eps) = log(1/delta_cell) / n`` by bisection.

    Vectorized over array inputs. If no root exists in ``(0, 1 - p_hat]`` the
    conservative value ``1 - p_hat`` is returned.
    """
    p_hat, delta_cell, n = np.broadcast_arrays(np.asarray(p_hat, float),
                                               np.asarray(delta_cell, float),
                                               np.asarray(n, float))
    target = np.log(1.0 / delta_cell) / n
    lo = np.zeros(p_hat.shape)
    hi = 1.0 - p_hat
    # D(p || 1) is infinite for p < 1, so the root is interior unless p_hat == 1
    while np.any(hi - lo > tol):
        mid = (lo + hi) / 2
        above = kl_bernoulli(p_hat, p_hat + mid) > target
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    eps = (lo + hi) / 2
    return float(eps) if eps.ndim == 0 else eps


def halfspace_slack(counts):
    """``eps(n_k^l, delta_k^l)`` for every cell, shape (16, 4)."""
    return confidence_epsilon(counts.counts / counts.n, counts.delta_cells, counts.n)


def _constraint_margins(rho, counts, slack):
    n = counts.n
    lhs = (counts.n_k[:, None] / n) * outcome_probabilities(rho)
    return counts.counts / n + slack - lhs


def polytope_halfspace_check(rho, counts, slack=None):
    """True iff ``rho`` satisfies all 64 half-space constraints of the confidence polytope."""
    if not isinstance(counts, TomographyCounts):
        raise TypeError("counts must be a TomographyCounts")
    rho = _check_density(rho)
    if slack is None:
        slack = halfspace_slack(counts)
    return bool((_constraint_margins(rho, counts, slack) >= 0).all())


def linear_inversion(counts):
    """Linear-inversion estimate projected onto the state space (negative eigenvalues clipped)."""
    freqs = counts.counts / np.maximum(counts.n_k[:, None], 1)
    signs = np.array([1, -1, -1, 1]), np.array([1, 1, -1, -1]), np.array([1, -1, 1, -1])
    rho = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            if i and j:
                e = freqs[4 * i + j] @ signs[0]
            elif i:
                e = freqs[4 * i] @ signs[1]
            elif j:
                e = freqs[j] @ signs[2]
            else:
                e = 1.0
            rho += e * np.kron(PAULIS[i], PAULIS[j]) / 4
    w, V = np.linalg.eigh((rho + rho.conj().T) / 2)
    w = np.clip(w, 0, None)
    w /= w.sum()
    return (V * w) @ V.conj().T


def _state_from_params(x):
    T = (x[:16] + 1j * x[16:]).reshape(4, 4)
    rho = T @ T.conj().T
    return rho / np.real(np.trace(rho))


def worst_case_conditional_entropy(counts, rng, restarts=8):
    """Heuristic maximum of ``H(A|B)`` over the confidence polytope.

    Local searches (SLSQP over ``rho = T T^dag / tr``) start from the
    linear-inversion estimate, its mixtures with ``I/4``, and random points
    near it. The best feasible value found is returned with the state; it is
    not a certified global maximum.

    Returns
    -------
    (value, rho, heuristic) : (float, ndarray, bool)
        ``heuristic`` is always True.
    """
    slack = halfspace_slack(counts)
    est = linear_inversion(counts)
    best_val, best_rho = -np.inf, None

    def consider(rho):
        nonlocal best_val, best_rho
        if (_constraint_margins(rho, counts, slack) >= 0).all():
            v = conditional_entropy(rho)
            if v > best_val:
                best_val, best_rho = v, rho

    for mix in (0.0, 1e-3, 1e-2):
        consider((1 - mix) * est + mix * np.eye(4) / 4)

    w, V = np.linalg.eigh(est)
    root = V * np.sqrt(np.clip(w, 0, None) + 1e-6)
    x_est = np.concatenate([root.real.ravel(), root.imag.ravel()])
    # small inner margin so SLSQP's constraint tolerance cannot leave the polytope
    cons = {"type": "ineq",
            "fun": lambda x: _constraint_margins(_state_from_params(x), counts, slack).ravel() - 1e-10}
    for r in range(restarts):
        x0 = x_est if r == 0 else x_est + 0.02 * rng.standard_normal(32)
        res = optimize.minimize(lambda x: -conditional_entropy(_state_from_params(x)), x0,
                                method="SLSQP", constraints=[cons],
                                options={"maxiter": 200, "ftol": 1e-10})
        consider(_state_from_params(res.x))
    if best_rho is None:
        raise RuntimeError("no state inside the confidence polytope was found")
    return float(best_val), best_rho, True


# -- bounds -------------------------------------------------------------------

def qubit_iid_bound(H_AB_conditional_max, n, epsilon, d_A=2):
    """Per-use one-shot capacity bound for ``n`` i.i.d. uses; not clamped at zero.

    ``-H_max + sup_eta (4/n)[-(d_A/2 + 2) sqrt(n) sqrt(log2(2/(sqrt(eps/2) - eta)^2)) + log2 eta] - 2/n``
    """
    root_eps = math.sqrt(epsilon / 2.0)
    coef = (d_A / 2.0 + 2.0) * math.sqrt(n)

    def correction(eta):
        return 4.0 / n * (-coef * math.sqrt(math.log2(2.0 / (root_eps - eta) ** 2)) + math.log2(eta))

    _, best = maximize_on_interval(correction, 0.0, root_eps)
    return -H_AB_conditional_max + best - 2.0 / n


def definetti_epsilon(k, n, r, d=16):
    """``2 k^(d/2) exp(-k (r+1) / (2 (n+k)))``; values below 1e-300 are returned as 0."""
    log_val = math.log(2.0) + (d / 2.0) * math.log(k) - k * (r + 1.0) / (2.0 * (n + k))
    return 0.0 if log_val < math.log(1e-300) else math.exp(log_val)


def almost_iid_halfspace_slack(n_k, n, r, delta_cell):
    """Slack ``(n/n_k) sqrt(log2(1/delta)/n + h(r/n) + (2/n) log2(n/2 + 1))`` for almost-i.i.d. tomography."""
    return (n / n_k) * math.sqrt(math.log2(1.0 / delta_cell) / n + binary_entropy(r / n)
                                 + 2.0 / n * math.log2(n / 2.0 + 1.0))


def qubit_noniid_bound(min_coherent_info, n, k, r, epsilon):
    """One-shot capacity bound (qubits, all ``n`` uses) without the i.i.d. assumption.

    ``min_coherent_info`` is the smallest ``H(B) - H(AB)`` over the
    confidence polytope. Returns 0 when the de Finetti error ``eps'``
    is not below ``eps/2``.
    """
    eps_p = definetti_epsilon(k, n, r)
    if not epsilon / 2.0 > eps_p:
        return 0.0
    root_eps = math.sqrt(epsilon / 2.0)
    hr = binary_entropy(r / n)
    lead = 4.0 * math.sqrt(n - r) * math.log2(2.0 * math.sqrt(2.0) + 1.0)
    hi = root_eps - math.sqrt(eps_p)

    def f(eta):
        inner = 2.0 * n * hr - 4.0 * math.log2(hi - eta) + 2.0 * math.log2(6.0) + 1.0
        return -lead * math.sqrt(inner) + 4.0 * math.log2(eta)

    _, best = maximize_on_interval(f, 0.0, hi)
    return max(0.0, best - n * hr - r + (n - r) * min_coherent_info - 2.0)


def qubit_report(counts, epsilon, rng, restarts=8):
    """JSON-ready summary of the i.i.d. bound from tomography counts."""
    h_max, rho, heuristic = worst_case_conditional_entropy(counts, rng, restarts)
    n = counts.n
    per_use = qubit_iid_bound(h_max, n, epsilon)
    return {
        "n": n,
        "delta": counts.delta,
        "epsilon": epsilon,
        "estimate_conditional_entropy": conditional_entropy(linear_inversion(counts)),
        "worst_conditional_entropy": h_max,
        "heuristic": heuristic,
        "q_lower_per_use": max(0.0, per_use),
        "q_lower": n * max(0.0, per_use),
    }
