"""How fragile is the prepared superposition to missed photons?

Every detected photon advances the relative phase of the two doublet
components by 2*phi, with phi = -arctan(u11 dz / kappa).  A photon that is
lost (not recorded) applies the same phase kick at an unknown time, so L
losses leave a mixture of L + 1 phase-shifted cats.  The purity of that
mixture has a closed form; small splittings (small |phi|) keep the cat
almost pure even after many losses.
"""

import numpy as np

from latticemc import ProbeModel, Scenario, cat_phase, purity, purity_sweep

model = ProbeModel(Scenario.TRANSMISSION, kappa=1.0, u11=1.0, eta=1.0)

print("purity after L lost photons vs doublet splitting dz "
      "(kappa/u11 = 1):")
print()
loss_counts = (0, 1, 3, 10)
header = f"{'dz':>6} {'phi':>8}" + "".join(f"  P_L={L:<3d}" for L in loss_counts)
print(header)
for dz in (0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0):
    phi = cat_phase(model, dz)
    row = f"{dz:6.1f} {phi:8.4f}"
    for L in loss_counts:
        row += f"  {purity(L, phi):7.4f}"
    print(row)
print()

rows = purity_sweep(loss_counts, np.linspace(0.0, 10.0, 401), model)
for L in loss_counts[1:]:
    vals = rows[rows[:, 1] == L]
    worst = vals[np.argmin(vals[:, 2])]
    print(f"L = {L:2d}: worst purity {worst[2]:.4f} at dz = {worst[0]:.2f}")
print()
print("note the revivals: when 2*phi is a multiple of 2*pi the phase kicks")
print("are invisible and the mixture re-purifies — decoherence from photon")
print("loss is not monotonic in the splitting.")
