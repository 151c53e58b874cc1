"""
Figure data from presets
========================

Bundled presets reproduce the curves of the capacity-certification figures
as CSV. This script runs two of them through the library API and plots them.
"""

# %%
import json
from importlib import resources

import matplotlib.pyplot as plt

from capcert.experiments import ExperimentConfig, run_experiment


def preset(name):
    return json.loads(resources.files("capcert").joinpath("presets", f"{name}.json").read_text())


# %% Per-mode bound versus n for every curve of the fig2 preset.
rows, diags = run_experiment(ExperimentConfig.from_dict(preset("fig2")))
print(len(rows), "rows;", len(diags), "points with a trivial bound")
fig, ax = plt.subplots(1, 2, figsize=(10, 4))
for label in dict.fromkeys(r["curve"] for r in rows):
    pts = [(r["n"], r["q_per_mode"]) for r in rows if r["curve"] == label]
    ax[0].semilogx(*zip(*pts), label=label)
ax[0].set_xlabel("n")
ax[0].set_ylabel("certified qubits per mode")
ax[0].legend(fontsize=6)

# %% Asymptotic comparison of the two tests over the loss parameter.
rows, _ = run_experiment(ExperimentConfig.from_dict(preset("fig3")))
for n_bar in (3.0, 9.5):
    sel = [r for r in rows if r["n_bar"] == n_bar and r["n_th"] == 0]
    ax[1].plot([r["tau"] for r in sel], [r["B_iid"] for r in sel], label=f"heterodyne n={n_bar}")
    ax[1].plot([r["tau"] for r in sel], [r["B"] for r in sel], "--", label=f"homodyne n={n_bar}")
ax[1].set_xlabel("tau")
ax[1].legend(fontsize=6)
fig.tight_layout()
fig.savefig("figure_data.png", dpi=120)
print("wrote figure_data.png")
