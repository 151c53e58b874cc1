"""
Qubit channels from tomography
==============================

Coherent information of a two-parameter qubit channel family, Pauli
tomography of its Choi state, the confidence polytope and finite-size bounds.
"""

# %%
import numpy as np

from capcert import (QubitChannelSpec, choi_state, coherent_information,
                     coherent_information_closed_form, definetti_epsilon, make_rng,
                     polytope_halfspace_check, qubit_iid_bound, qubit_noniid_bound,
                     simulate_tomography)
from capcert.qubit import conditional_entropy, qubit_report

# %% beta = 0 is amplitude damping; alpha = beta is dephasing.
for a in np.linspace(0, np.pi / 2, 5):
    print(f"alpha={a:.3f}  I_c(ad)={coherent_information_closed_form(a, 0.0):+.4f}  "
          f"I_c(deph)={coherent_information(choi_state(QubitChannelSpec(a, a))):+.4f}")

# %% Tomography of the Choi state: 16 Pauli settings with 4 outcomes each.
spec = QubitChannelSpec(0.3, 0.1)
rho = choi_state(spec)
rng = make_rng(4)
counts = simulate_tomography(rho, 10**6, rng, delta=0.01)
print("true state inside polytope:", polytope_halfspace_check(rho, counts))
print("true H(A|B) =", round(conditional_entropy(rho), 4))

# %% Worst case over the polytope (heuristic local search) and the i.i.d. bound.
rep = qubit_report(counts, epsilon=0.02, rng=rng, restarts=4)
for key in ("estimate_conditional_entropy", "worst_conditional_entropy", "q_lower_per_use"):
    print(f"{key:30s} {rep[key]:.4f}")

# %% The i.i.d. bound approaches -H(A|B) slowly.
h = conditional_entropy(rho)
for n in (1e4, 1e6, 1e8, 1e10):
    print(f"n={n:.0e}  {qubit_iid_bound(h, n, 0.02):+.4f}  (limit {-h:+.4f})")

# %% Without the i.i.d. assumption: the symmetrization error eps' needs k(r+1)/(n+k)
# well above 8 ln k before it drops below epsilon, and the sqrt(n) correction
# then leaves nothing at n = 1e6.
for n, k, r in [(1e6, 1e6, 1e3), (1e8, 1e7, 1e4), (1e12, 1e9, 1e6)]:
    print(f"n={n:.0e} k={k:.0e} r={r:.0e}  eps'={definetti_epsilon(k, n, r):.1e}  "
          f"bound/n={qubit_noniid_bound(-h, n, k, r, 0.02) / n:.4f}")
print("eps' at k = 1e3, r = 0:", definetti_epsilon(1e3, 2e3, 0))
