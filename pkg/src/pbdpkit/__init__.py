"""pbdpkit: polynomial birth-death point processes.

Fits PBDPs to locally dependent point processes, estimates the d2 distance
between configuration laws, and checks the Stein factors and error bounds
numerically.
"""

__version__ = "0.1.0"
