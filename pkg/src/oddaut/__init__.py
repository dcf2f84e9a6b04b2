"""Parity of permutations induced by polynomial automorphisms over finite fields."""

__version__ = "0.1.0"
