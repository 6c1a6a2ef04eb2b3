#!/usr/bin/env python3
"""Noise robustness: Gaussian perturbation of the subspace matrix elements.

Measured matrix elements carry finite precision.  Adding complex Gaussian
noise of standard deviation sigma to H, S, and d0 emulates that, and the
singular-value threshold is the knob that trades retained subspace rank
against noise amplification: each sigma gets its own threshold.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from krylov_ff import (
    KrylovConfig,
    NoiseConfig,
    SelectionConfig,
    basis_state,
    heisenberg_chain,
    run_selection_loop,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

hamiltonian = heisenberg_chain(4)
psi0 = basis_state("0101")
sel = SelectionConfig(
    t_max=20.0,
    eps_stop=1e-12,
    max_references=4,
    references_per_round=3,
    exact_sampling=True,
    seed=7,
)

# per-sigma singular-value thresholds: keeping directions with singular
# values below the noise floor only amplifies the noise
sweep = [
    (0.0, 1e-9),
    (1e-9, 1e-8),
    (1e-7, 1e-6),
    (1e-5, 1e-4),
    (1e-3, 1e-2),
]

fig, ax = plt.subplots(figsize=(8, 4))
print(f"{'sigma':>8}  {'threshold':>10}  {'kept':>4}  {'1 - F(T_max)':>12}")
for sigma, threshold in sweep:
    noise = NoiseConfig(sigma, seed=7) if sigma > 0 else None
    cfg = KrylovConfig(tau=0.1, krylov_dim=6, svd_threshold=threshold, noise=noise)
    result = run_selection_loop(hamiltonian, psi0, cfg, sel)
    final = result.rounds[-1]
    infidelity = np.clip(1.0 - final.fidelity, 1e-18, None)
    label = "noiseless" if sigma == 0 else rf"$\sigma = 10^{{{int(np.log10(sigma))}}}$"
    ax.semilogy(sel.eval_grid.times, infidelity, label=label)
    print(f"{sigma:>8.0e}  {threshold:>10.0e}  {final.kept_rank:>4}  {infidelity[-1]:>12.2e}")

ax.set_xlabel("t (a.u.)")
ax.set_ylabel("1 - F(t)")
ax.set_title("Infidelity under matrix-element noise (4-site Heisenberg, R = 4)")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "noise_robustness.png", dpi=120)
print(f"wrote {OUT / 'noise_robustness.png'}")
