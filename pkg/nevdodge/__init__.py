"""
Neumann eigenvalue dodging for Δ+λ−V on smooth planar domains.
"""
