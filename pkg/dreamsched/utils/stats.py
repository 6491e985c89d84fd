#!/usr/bin/env python
"""
Small statistics helpers.
"""
import numpy as np
import scipy.stats

def loglog_slope(x, y):
    """
    Least-squares slope of log(y) against log(x).

    Parameters:
    -----------
    x : positive abscissae (e.g. iteration counts)
    y : positive ordinates (e.g. mean suboptimality)

    Returns:
    --------
    slope, intercept, rvalue
    """
    x = np.asarray(x,dtype=float)
    y = np.asarray(y,dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        msg = "Log-log fit requires positive values"
        raise ValueError(msg)
    fit = scipy.stats.linregress(np.log(x),np.log(y))
    return fit.slope, fit.intercept, fit.rvalue

def relative_gap(value, reference):
    """ (value - reference) / reference; zero when both vanish. """
    if reference == 0:
        return 0.0 if value == 0 else np.inf
    return (value - reference)/reference

def time_average(values, skip=0):
    """ Mean of a trace after discarding the first `skip` samples. """
    values = np.asarray(values,dtype=float)[skip:]
    if not len(values): return np.nan
    return np.mean(values)
