"""Certified poor complex tori: number-field generators, Galois certificates,
period matrices and lattice invariants."""

__version__ = "0.1.0"
