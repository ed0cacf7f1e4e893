"""Numerical experiments on measurement as entanglement.

Submodules:

- :mod:`entanglab.qlinalg` -- small dense complex linear algebra
- :mod:`entanglab.states` -- superposition, measurement state, mixtures, reduced states
- :mod:`entanglab.interferometry` -- two-station photon-pair interferometer, CHSH, no-signaling
- :mod:`entanglab.decoherence` -- environment-qubit decoherence and its reversal
- :mod:`entanglab.sampler` -- seeded Monte Carlo detection counts
- :mod:`entanglab.cli` -- command-line runner
"""

__version__ = "0.1.0"
