"""Phase-insensitive single-mode Gaussian channels and probe-state helpers."""

from dataclasses import dataclass, field
import math

import numpy as np

KINDS = ("identity", "loss", "amplifier", "additive")


def make_rng(seed, stream=0):
    """Independent generator for ``(seed, stream)``; same pair, same draws."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class ChannelModel:
    """A phase-insensitive Gaussian channel acting on one mode.

    Every kind maps a quadrature ``x`` to ``sqrt(scale) * x + noise`` with
    Gaussian noise of variance ``added_noise``:

    ========== ========= ===========================
    kind       scale     added_noise
    ========== ========= ===========================
    identity   1         0
    loss       tau       (1 - tau) (2 n_th + 1)
    amplifier  gain      (gain - 1) (2 n_th + 1)
    additive   1         sigma2_add
    ========== ========= ===========================
    """

    kind: str = "identity"
    tau: float = 1.0
    n_th: float = 0.0
    gain: float = 1.0
    sigma2_add: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}; expected one of {KINDS}")
        if self.n_th < 0:
            raise ValueError(f"thermal photon number must be >= 0, got {self.n_th}")
        if self.kind == "loss" and not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"loss transmissivity must lie in [0, 1], got {self.tau}")
        if self.kind == "amplifier" and self.gain < 1.0:
            raise ValueError(f"amplifier gain must be >= 1, got {self.gain}")
        if self.kind == "additive" and self.sigma2_add < 0:
            raise ValueError(f"added noise variance must be >= 0, got {self.sigma2_add}")

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def loss(cls, tau, n_th=0.0):
        return cls("loss", tau=float(tau), n_th=float(n_th))

    @classmethod
    def amplifier(cls, gain, n_th=0.0):
        return cls("amplifier", gain=float(gain), n_th=float(n_th))

    @classmethod
    def additive(cls, sigma2_add):
        return cls("additive", sigma2_add=float(sigma2_add))

    @property
    def scale(self):
        return {"identity": 1.0, "loss": self.tau, "amplifier": self.gain,
                "additive": 1.0}[self.kind]

    @property
    def added_noise(self):
        if self.kind == "loss":
            return (1.0 - self.tau) * (2.0 * self.n_th + 1.0)
        if self.kind == "amplifier":
            return (self.gain - 1.0) * (2.0 * self.n_th + 1.0)
        if self.kind == "additive":
            return self.sigma2_add
        return 0.0

    def to_dict(self):
        out = {"kind": self.kind}
        if self.kind == "loss":
            out.update(tau=self.tau, n_th=self.n_th)
        elif self.kind == "amplifier":
            out.update(gain=self.gain, n_th=self.n_th)
        elif self.kind == "additive":
            out.update(sigma2_add=self.sigma2_add)
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        kind = data.pop("kind", None)
        allowed = {"identity": set(), "loss": {"tau", "n_th"},
                   "amplifier": {"gain", "n_th"}, "additive": {"sigma2_add"}}
        if kind not in allowed:
            raise ValueError(f"unknown channel kind {kind!r}")
        extra = set(data) - allowed[kind]
        if extra:
            raise ValueError(f"unexpected keys for {kind} channel: {sorted(extra)}")
        return cls(kind, **{k: float(v) for k, v in data.items()})


def squeezing_db_to_nbar(s_db):
    """Mean photon number matching ``s_db`` of squeezing: ``(10**(s/10) - 1) / 2``."""
    return (10.0 ** (s_db / 10.0) - 1.0) / 2.0


def nbar_to_squeezing_db(n_bar):
    return 10.0 * math.log10(2.0 * n_bar + 1.0)


@dataclass(frozen=True)
class ProbeEnsemble:
    """Settings for a batch of ``count`` probe states.

    Squeezing ``s_db`` and mean photon number ``n_bar`` are two views of the
    same quantity, displacement variance ``10**(s/10) = 2 n_bar + 1``; pass
    exactly one of them. ``bases`` holds 0 (position) / 1 (momentum) labels,
    or is empty for coherent-state probes.
    """

    count: int
    n_bar: float = None
    s_db: float = None
    alpha: float = math.inf
    seed: int = 0
    bases: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if (self.n_bar is None) == (self.s_db is None):
            raise ValueError("give exactly one of n_bar or s_db")
        if self.n_bar is None:
            object.__setattr__(self, "n_bar", squeezing_db_to_nbar(self.s_db))
        else:
            if self.n_bar < 0:
                raise ValueError(f"n_bar must be >= 0, got {self.n_bar}")
            object.__setattr__(self, "s_db", nbar_to_squeezing_db(self.n_bar))

    @property
    def variance(self):
        return 2.0 * self.n_bar + 1.0


def tmsv_cov(n_bar):
    """Covariance of a two-mode squeezed vacuum whose reduced modes hold ``n_bar`` photons."""
    if n_bar < 0:
        raise ValueError(f"n_bar must be >= 0, got {n_bar}")
    v = 2.0 * n_bar + 1.0
    c = math.sqrt(4.0 * n_bar * (n_bar + 1.0))  # sqrt(v^2 - 1) without cancellation
    sz = np.diag([1.0, -1.0])
    M = np.block([[v * np.eye(2), c * sz], [c * sz, v * np.eye(2)]])
    return M


def apply_channel_cov(ch, M, mode_index):
    """Covariance after sending mode ``mode_index`` of ``M`` through ``ch``."""
    M = np.array(M, dtype=float)
    m = M.shape[0] // 2
    if not 0 <= mode_index < m:
        raise IndexError(f"mode index {mode_index} out of range for {m} modes")
    sl = slice(2 * mode_index, 2 * mode_index + 2)
    root = math.sqrt(ch.scale)
    out = M.copy()
    out[sl, :] *= root
    out[:, sl] *= root
    out[sl, sl] += ch.added_noise * np.eye(2)
    return out


def sample_channel_quadrature(ch, x_in, basis=0, rng=None):
    """Sample the output quadrature for input quadrature value(s) ``x_in``.

    ``basis`` is accepted for symmetry with homodyne records; the marginal
    statistics of a phase-insensitive channel do not depend on it.
    """
    x_in = np.asarray(x_in, dtype=float)
    out = math.sqrt(ch.scale) * x_in
    noise = ch.added_noise
    if noise > 0:
        if rng is None:
            raise ValueError("a random generator is required for a noisy channel")
        out = out + rng.normal(0.0, math.sqrt(noise), size=x_in.shape)
    return float(out) if out.ndim == 0 else out

