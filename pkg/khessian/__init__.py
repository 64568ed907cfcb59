"""
Numerical laboratory for radial biharmonic k-Hessian boundary-value problems.
"""
__version__ = '0.1.0'
