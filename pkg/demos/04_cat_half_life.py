"""
When is the reduced-state basis ambiguous?

A nucleus with half-life T entangles with a cat. After time t the undecayed
(alive) branch has weight 2**(-t/T). The cat's reduced state is diagonal
with eigenvalues 2**(-t/T) and 1 - 2**(-t/T); its eigenbasis is fixed by the
alive/dead states except when the two eigenvalues coincide, which happens
only at t = T.

Run:  python demos/04_cat_half_life.py
"""

import numpy as np

from entanglab.states import HalfLifeClock, basis_ambiguity, cat_amplitudes, entanglement_report, premeasure, reduced_states

T = 1.0
print(f"{'t/T':>6} {'P(alive)':>9} {'gap':>9} {'ambiguous':>10} {'entropy':>8}")
for t in np.linspace(0, 3, 13):
    a = cat_amplitudes(HalfLifeClock(T, t))
    m = premeasure(a)
    ambiguous, gap = basis_ambiguity(reduced_states(m)[0])
    _, ent = entanglement_report(m.psi)
    print(f"{t:6.2f} {a.weights[0]:9.5f} {gap:9.5f} {str(ambiguous):>10} {ent:8.5f}")
