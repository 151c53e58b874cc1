"""
Gaussian covariance toolkit
===========================

Symplectic spectra, entropies and channel action on a two-mode squeezed
vacuum probe, in vacuum-variance-one units.
"""

# %%
import numpy as np

from capcert import (ChannelModel, apply_channel_cov, bona_fide_check, g_entropy,
                     gaussian_state_entropy, symplectic_eigenvalues, tmsv_cov)

# %% A TMSV is pure: both symplectic eigenvalues are 1 and the entropy vanishes.
M = tmsv_cov(9.5)
print(np.round(M, 3))
print("nu =", symplectic_eigenvalues(M), " S =", gaussian_state_entropy(M))

# %% Sending Bob's arm through a lossy channel mixes in vacuum.
for tau in (1.0, 0.9, 0.5, 0.1):
    out = apply_channel_cov(ChannelModel.loss(tau), M, 1)
    nu = symplectic_eigenvalues(out)
    print(f"tau={tau:3.1f}  nu={nu.round(4)}  S(AB)={gaussian_state_entropy(out):.4f}  "
          f"S(B)={g_entropy(out[2, 2]):.4f}  physical={bona_fide_check(out)}")

# %% Coherent information of the pure-loss channel at this energy: S(B) - S(AB).
for tau in np.linspace(0.5, 1.0, 6):
    out = apply_channel_cov(ChannelModel.loss(tau), M, 1)
    print(f"tau={tau:.1f}  I_c={g_entropy(out[2, 2]) - gaussian_state_entropy(out):.4f}")
