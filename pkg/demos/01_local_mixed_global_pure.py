"""
Measurement as entanglement: the global state stays pure, the local states do not.

An ideal measurement couples a qubit S in c1|s1> + c2|s2> to a pointer A
that starts in |a1>. The coupling is a controlled shift of the pointer, a
unitary, so the pair ends up in the pure state c1|s1 a1> + c2|s2 a2>.

Tracing out either partner leaves a diagonal density operator with the
Born weights on the diagonal. Its purity |c1|^4 + |c2|^4 drops below one as
soon as both branches are populated, while the purity of the pair stays at
exactly one.

Run:  python demos/01_local_mixed_global_pure.py
"""

import numpy as np

from entanglab.qlinalg import density_of, purity, entropy
from entanglab.states import Amplitudes, collapse_mixture, premeasure, reduced_states

print(f"{'|c1|^2':>8} {'global purity':>14} {'local purity':>13} {'local entropy':>14}")
for p1 in (1.0, 0.9, 0.64, 0.5, 0.36, 0.1, 0.0):
    m = premeasure(Amplitudes.from_weight(p1))
    rho_s, rho_a = reduced_states(m)
    print(f"{p1:8.2f} {purity(density_of(m.psi)):14.12f} {purity(rho_s):13.6f} {entropy(rho_s):14.6f}")

# the entangled pair and the incoherent mixture look the same locally...
a = Amplitudes(0.6, 0.8j)
m = premeasure(a)
mix = collapse_mixture(a)
print("\nreduced state of S from the entangled pair:\n", np.round(reduced_states(m)[0].matrix.real, 12))
print("diagonal of the collapsed mixture:", np.round(np.diag(mix.matrix).real, 12))

# ...but only the pair carries coherence between the two branches
print("|s1 a1><s2 a2| element, pair:    ", np.round(m.density().matrix[0, 3], 12))
print("|s1 a1><s2 a2| element, mixture: ", mix.matrix[0, 3])
