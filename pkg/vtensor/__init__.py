"""
VTensor v1.0
Exact symbolic engine for the P(z)/Q(z) tensor-product calculus on the
rank-1 Heisenberg vertex operator algebra.
"""

__version__ = '1.0.0'
