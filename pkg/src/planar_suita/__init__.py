"""Conformal invariants of multiply-connected planar domains and equality tests
for weighted Suita-type inequalities."""

__version__ = "0.1.0"
