"""
Convergence lab: local SGD with layer-wise synchronization on synthetic
strongly convex problems.
"""
