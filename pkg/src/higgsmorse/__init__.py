"""Morse theory computations on moduli spaces of Higgs bundles.

Exact Poincare-polynomial and index bookkeeping for S^1-fixed strata,
component censuses for Sp(2n,R), and a lattice metric heat flow for the
Yang-Mills-Higgs functional.
"""

__version__ = "0.1.0"
