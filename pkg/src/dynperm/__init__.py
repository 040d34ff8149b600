"""Cycle dynamics of random transposition processes and their graph limits."""
from .perm_core import CyclePermutation, Merged, Split, identity, apply_transposition, largest_cycle
from .limits import zeta, phi, phi_inverse, eta

__all__ = ["CyclePermutation", "Merged", "Split", "identity", "apply_transposition",
           "largest_cycle", "zeta", "phi", "phi_inverse", "eta"]
__version__ = "0.1.0"
