"""Dense boxes (right factors of factorizations) in topological groups.

Exact group arithmetic, neighborhood bases and convergent sequences,
factorization witnesses, brute-force oracles, stagewise and greedy
constructions, and certificates that can be checked without re-running them.
"""

__version__ = "0.1.0"
