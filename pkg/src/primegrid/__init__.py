"""Sparse universally good averaging sequences at desk scale.

Construction of zero-Banach-density integer sequences from prime-grid
arithmetic progressions, the discrete averaging operators and maximal
inequalities that control them, and ergodic-average experiments on concrete
measure-preserving systems.
"""

__version__ = "0.1.0"
