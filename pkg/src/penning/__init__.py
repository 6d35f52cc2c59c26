"""Planar ion crystals in a Penning trap: equilibria, phonons and Ising couplings."""

__version__ = "0.1.0"
