"""Independent transcriptions used as test oracles (kept apart from the library code paths)."""

import mpmath
import numpy as np

mpmath.mp.dps = 50
LD = np.longdouble


def _ld(x):
    return LD(mpmath.nstr(x, 40))


def theorem1_oracle(n, k, d, t, alpha, n_bar, epsilon, p_err, points=10**6, entanglement=False):
    """Straight-line evaluation of the protocol-1 capacity (or entanglement) bound on a dense eta grid."""
    mp = mpmath.mpf
    n, k, d, t, alpha = mp(n), mp(k), mp(d), mp(t), mp(alpha)
    p_win = mpmath.erf(alpha / mpmath.sqrt(2 * (2 * mp(n_bar) + 1)))
    f = mpmath.sqrt(2 * (1 - p_win ** n))
    pe = mp(p_err)
    lam = 8 * f * (3 + 5 / (4 * pe) - 1 / mpmath.sqrt(pe))
    root = mpmath.sqrt(mp(epsilon)) if entanglement else mpmath.sqrt(mp(epsilon) / 2)
    if lam >= root:
        return None if entanglement else 0.0
    hi = root - lam
    w = float(hi)
    half = points // 2
    eta = np.unique(np.concatenate([
        np.geomspace(w * 1e-13, w * (1 - 1e-13), half).astype(LD),
        np.linspace(0, w, half + 2)[1:-1].astype(LD),
    ]))
    eta = eta[(eta > 0) & (eta < _ld(hi))]
    zeta = (_ld(root) - eta + 8 * _ld(f) / _ld(mpmath.sqrt(pe))) / _ld(3 + 5 / (4 * pe))
    arg = zeta / 4 - 2 * _ld(f)
    ok = arg > 0
    inner = np.full(eta.shape, LD(np.nan))
    inner[ok] = -np.log2(arg[ok])
    ok &= inner >= 0
    coef = _ld(2 * alpha / d * mpmath.sqrt((k + n) * (k + 1) / (n * k * k)))
    mu = coef * np.sqrt(np.where(ok, inner, 0))
    x = _ld(t) + mu
    r = np.sqrt(1 + x * x)
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = (np.arcsinh(x) + np.where(x > 0, x * np.log((r + 1) / x), 0)) / np.log(LD(2))
    delta = 4 * np.log2(1 / eta) + 2 * np.log2(2 / zeta ** 2) + 2
    val = _ld(n * mpmath.log(2 * mpmath.pi / d ** 2, 2)) - 2 * _ld(n) * lg - delta
    val = np.where(ok, val, -np.inf)
    best = val.max()
    if entanglement:
        return None if not np.isfinite(best) else float(best + 1)
    return max(0.0, float(best))


def g_oracle(x):
    x = mpmath.mpf(x)
    a, b = (x + 1) / 2, (x - 1) / 2
    return a * mpmath.log(a, 2) - (b * mpmath.log(b, 2) if b > 0 else 0)


def log2_gamma_oracle(x):
    x = mpmath.mpf(x)
    if x == 0:
        return mpmath.mpf(0)
    r = mpmath.sqrt(1 + x * x)
    return mpmath.log(x + r, 2) + x * mpmath.log(x / (r - 1), 2)


def random_theorem1_configs(rng, count):
    """Random valid protocol-1 parameter sets (2 alpha / d integral)."""
    out = []
    while len(out) < count:
        d = float(rng.choice([0.05, 0.1, 0.2, 0.5]))
        alpha = float(rng.choice([37.0, 40.0, 45.0, 50.0]))
        out.append(dict(
            n=float(10 ** rng.uniform(6, 11)), k=None, d=d, t=float(rng.uniform(0.5, 4.0)),
            alpha=alpha, n_bar=float(rng.uniform(4.0, 10.0)), epsilon=float(10 ** rng.uniform(-2.3, -0.7)),
            p_err=float(rng.uniform(0.05, 0.5)),
        ))
        out[-1]["k"] = out[-1]["n"] * float(10 ** rng.uniform(-0.3, 1.0))
    return out
