"""
Two-station interferometer: no local fringes, full coincidence fringes.

Each photon of the pair meets its own phase shifter and beam splitter.
Single-station detection rates do not depend on either phase, while the
coincidence rate follows (1 + cos(phi_s - phi_a)) / 4. Replacing the pair by
the incoherent mixture of |s1 a1> and |s2 a2> flattens the coincidence
fringes as well.

Run:  python demos/02_coincidence_fringes.py
"""

import numpy as np

from entanglab.interferometry import bell_pair, fringe_visibility, joint_distribution, marginal, mixture

pair, mix = bell_pair(), mixture()

print(f"{'phi_s':>6} {'P_uu pair':>10} {'P_u(S) pair':>12} {'P_uu mixture':>13}")
for phi_s in np.linspace(0, 2 * np.pi, 9):
    j = joint_distribution(pair, (phi_s, 0.0))
    jm = joint_distribution(mix, (phi_s, 0.0))
    print(f"{phi_s:6.3f} {j.p_uu:10.6f} {marginal(j, 'S')[0]:12.6f} {jm.p_uu:13.6f}")

for name, state in (("pair", pair), ("mixture", mix)):
    v = fringe_visibility(state, phi_a_fixed=0.0, grid_n=64)
    print(f"{name:8s} coincidence visibility {v.coincidence:.12f}   local visibility {v.local:.1e}")
