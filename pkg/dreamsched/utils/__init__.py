"""
Various helpful classes and functions live here.
"""
