"""
Environment qubits wash out branch coherence, in principle reversibly.

Every environment qubit is rotated by +theta or -theta depending on the
pointer reading. The off-diagonal element of the system/apparatus state is
multiplied by the overlap of the two environment records, prod cos(2 theta).
With a few qubits it is already tiny; the exact simulation (full state
vector of up to 12 qubits, environment traced out) agrees with that factor.

Running the coupling backwards on the full state restores the coherence,
even for the ten-qubit "detector" that drives the factor to zero.

Run:  python demos/05_environment_decoherence.py
"""

import numpy as np

from entanglab.decoherence import (
    EnvironmentSpec,
    decoherence_factor,
    decohered_state,
    reverse_and_check,
    simulate_env_exact,
)
from entanglab.states import EQUAL, premeasure

m = premeasure(EQUAL)
theta = np.pi / 16
print(f"{'n':>3} {'analytic r':>12} {'exact |rho_03|/0.5':>20}")
for n in range(1, 11):
    env = EnvironmentSpec.uniform(n, theta)
    exact = abs(simulate_env_exact(m, env).matrix[0, 3]) / 0.5
    print(f"{n:3d} {decoherence_factor(env):12.8f} {exact:20.8f}")

far = EnvironmentSpec.uniform(200, theta)
print(f"\nn = 200 (analytic only): r = {decoherence_factor(far):.3e}")
print("off-diagonal after 200 qubits:", decohered_state(m.density(), far).matrix[0, 3])

rep = reverse_and_check(m, EnvironmentSpec.uniform(4, 0.3))
print(f"\nforward: coherence {rep.coherence_before:.6f} -> {rep.coherence_decohered:.6f}"
      f"   reversed: {rep.coherence_after:.6f}   reversible = {rep.reversible}")
print(f"detector (10 qubits, theta = pi/4): coherence {rep.detector_coherence:.1e}, "
      f"reversible = {rep.detector_reversible}")
