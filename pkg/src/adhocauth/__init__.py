"""Anonymous, revocable authentication for ad-hoc networks.

GQ zero-knowledge identification run over Merkle puzzles, exercised in a
deterministic simulated network with scripted adversaries.
"""

__version__ = "0.1.0"
