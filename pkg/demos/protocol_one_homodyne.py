"""
Homodyne correlation test
=========================

Certified capacity per mode from a discretized homodyne correlation test,
how it depends on the test settings, and how often a real channel passes.
"""

# %%
import math

import numpy as np

from capcert import (ChannelModel, ProtocolOneConfig, asymptotic_B, entanglement_bound, make_rng,
                     pass_probability_pure_loss, run_protocol_one, theorem1_bound)

base = dict(d=0.1, t=3.0, alpha=37.0, n_bar=9.5, epsilon=0.02, p_err=0.1)

# %% Per-mode bound versus the number of channel uses, with k = n test modes.
print("  n        q/n      ent/n    status")
for n in 10.0 ** np.arange(5, 13):
    cfg = ProtocolOneConfig(n=n, k=n, **base)
    b = theorem1_bound(cfg)
    ent = entanglement_bound(cfg)
    print(f"{n:8.0e}  {b.q_lower / n:7.4f}  {(ent or 0) / n:7.4f}  {b.status}")
print("asymptote B(d, t) =", round(asymptotic_B(0.1, 3.0), 4))

# %% The cutoff alpha must grow with n: a finite detector range eventually
# makes every test outcome suspect and the bound collapses to zero.
for alpha in (33.0, 37.0, 50.0):
    vals = [theorem1_bound(ProtocolOneConfig(n=n, k=n, **{**base, "alpha": alpha})).q_lower / n
            for n in (1e6, 1e8, 1e10, 1e12)]
    print(f"alpha={alpha:4.0f} ", " ".join(f"{v:7.4f}" for v in vals))

# %% Settings: more test modes, finer bins or a tighter threshold raise the bound.
n = 1e9
for label, kw in [("reference", {}), ("k = 10 n", {}), ("d = 0.05", {"d": 0.05}), ("t = 2", {"t": 2.0})]:
    k = 10 * n if label == "k = 10 n" else n
    q = theorem1_bound(ProtocolOneConfig(n=n, k=k, **{**base, **kw})).q_lower / n
    print(f"{label:10s} {q:.4f}")

# %% Passing the test. A perfect channel sits at mean bin distance
# gap / (d sqrt(pi)); choose t a little above it and simulate.
gap = 2 * (math.sqrt(10.5) - math.sqrt(9.5))
ch = ChannelModel.loss(1.0)
for ratio in (0.99, 1.0, 1.01, 1.02):
    t = ratio * gap / (0.1 * math.sqrt(math.pi))
    cfg = ProtocolOneConfig(n=1e8, k=10**4, **{**base, "t": t, "alpha": 50.0})
    rate = np.mean([run_protocol_one(cfg, ch, make_rng(1, j)).passed for j in range(200)])
    print(f"t={t:.4f}  simulated {rate:.3f}  closed form {pass_probability_pure_loss(1e4, t, 0.1, 1.0, 9.5):.3f}")
