"""Insertion-deletion graph streams, one-way reductions to Augmented Bi-Index,
and a group-contraction vertex-cover streaming algorithm."""

__version__ = "0.1.0"
