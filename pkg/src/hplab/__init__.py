"""hplab: a desk-scale laboratory for prime-weighted ergodic averages along Hardy sequences."""

__version__ = "0.1.0"
