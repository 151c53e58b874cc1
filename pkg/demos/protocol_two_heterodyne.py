"""
Heterodyne threshold test
=========================

Confidence bounds on Bob's variance and the cross-correlation, the
threshold test, and the certified bound as the number of test modes grows.
"""

# %%
import numpy as np

from capcert import (ChannelModel, ProtocolTwoConfig, asymptotic_Biid, channel_thresholds,
                     energy_constrained_capacity_pure_loss, make_rng, optimal_thresholds_loss,
                     run_protocol_two, sigma_max, gamma_min, simulate_heterodyne_pairs,
                     theorem2_bound)

n_bar = 9.5

# %% With thresholds tuned to a pure-loss channel the asymptotic bound is its capacity.
for tau in (0.6, 0.8, 1.0):
    a, c = optimal_thresholds_loss(tau, n_bar, 0.0)
    print(f"tau={tau}: a={a:.3f} c={c:.3f}  B_iid={asymptotic_Biid(a, c, n_bar):.4f}  "
          f"capacity={energy_constrained_capacity_pure_loss(tau, n_bar):.4f}")

# %% Estimators from k heterodyne pairs bracket the true values with probability >= 1 - delta.
ch = ChannelModel.loss(0.8)
a_true, c_true = channel_thresholds(ch, n_bar)
k, delta = 5000, 0.05
misses = np.zeros(2)
for j in range(500):
    rec = simulate_heterodyne_pairs(ch, n_bar, k, make_rng(2, j))
    misses += [a_true > sigma_max(rec.y, k, delta), c_true < gamma_min(rec.x, rec.y, k, delta, n_bar)]
print("miss rates (sigma_max, gamma_min):", misses / 500, "allowed", delta)

# %% The bound is steep in the thresholds at high energy: slack of 0.1 on
# both a and c already costs most of the capacity.
for slack in (0.0, 0.05, 0.1, 0.2):
    print(f"slack={slack:.2f}  B_iid={asymptotic_Biid(a_true + slack, c_true - slack, n_bar):.4f}")

# %% A full run at low energy, where k = 1e5 pins the thresholds down well enough.
low = 1.0
a_low, c_low = channel_thresholds(ch, low)
cfg = ProtocolTwoConfig(n=1e6, k=10**5, n_bar=low, a=a_low + 0.05, c=c_low - 0.05)
verdict = run_protocol_two(cfg, ch, make_rng(3))
print(verdict.passed, "certified per mode:", verdict.q_lower / cfg.n,
      "of", round(asymptotic_Biid(a_low, c_low, low), 4))

# %% Finite-size cost shrinks like 1/sqrt(k).
a, c = optimal_thresholds_loss(0.9, n_bar, 0.0)
for k in 10.0 ** np.arange(3, 11):
    q = theorem2_bound(ProtocolTwoConfig(n=k, k=k, n_bar=n_bar, a=a, c=c)) / k
    print(f"k={k:8.0e}  bound/n={q:.4f}  (B_iid {asymptotic_Biid(a, c, n_bar):.4f})")
