"""
Scheduling, simulation and convergence checks for layer-wise partial
synchronization in local SGD.
"""
__version__ = '0.1.0'
