"""Exact arithmetic for theta lifts of Maass forms to O(1,5).

Definite quaternion orders, their discriminant forms and Weil
representations, the Fourier coefficients of the lift as formal sums of the
Maass coefficients c(m), Hecke eigenvalue checks, local L-factors, and a
separate floating-point path for evaluating truncated Fourier series.
"""

__version__ = "0.1.0"
