"""Exact derivation of Picard-Fuchs operators for deformation families of
quasi-homogeneous hypersurfaces, plus independent hypergeometric series
construction for cross-checking the operators.

All computation is exact over Q and its rational-function extensions.
"""

__version__ = "0.1.0"
