"""Rank-1 inhomogeneous random graph simulator (NR, ENR, CL, GRG)"""

__version__ = "1.0.0"
