"""
Scaling comparison of the pruned search against exhaustive enumeration.
"""
import time
from multiprocessing import Pool

import numpy as np

from dreamsched.utils.logger import logger
from dreamsched.analysis.profile import synth_profile, LinkModel, REGIMES
from dreamsched.analysis.scheduler import (schedule_dfs, schedule_brute_force,
                                           count_candidates, BRUTE_FORCE_LIMIT)

# Exhaustive search is only run up to this many layers and
# BRUTE_FORCE_LIMIT candidates
BRUTE_FORCE_MAX_LAYERS = 30

COLUMNS = [('layers',int),('H',int),('regime','U16'),('bandwidth',float),
           ('dfs_solutions',int),('bf_candidates',int),('dfs_cost',float),
           ('bf_cost',float),('gap',float),('dfs_seconds',float),
           ('bf_seconds',float)]

def bench_instance(args):
    """ One (layers, H, regime, seed, bandwidth) row. """
    layers,H,regime,seed,bandwidth = args
    profile = synth_profile(layers,seed,regime)
    if bandwidth is not None:
        profile = profile.with_link(LinkModel(bandwidth,0.0))
    bandwidth = profile.link.bandwidth

    start = time.perf_counter()
    dfs = schedule_dfs(profile,H)
    dfs_seconds = time.perf_counter() - start

    candidates = count_candidates(layers,H)
    bf_cost, bf_seconds, gap = np.nan, np.nan, np.nan
    if layers <= BRUTE_FORCE_MAX_LAYERS and candidates <= BRUTE_FORCE_LIMIT:
        start = time.perf_counter()
        oracle = schedule_brute_force(profile,H)
        bf_seconds = time.perf_counter() - start
        bf_cost = oracle.best_cost
        dfs.oracle_cost = bf_cost
        gap = dfs.gap

    logger.debug("L=%i %s: dfs=%r bf=%r"%(layers,regime,dfs.best_cost,bf_cost))
    return (layers,H,regime,bandwidth,dfs.solutions_explored,candidates,
            dfs.best_cost,bf_cost,gap,dfs_seconds,bf_seconds)

def bench_scheduler(max_layers, H=5, seed=0, regimes=None, bandwidths=None,
                    ncores=None):
    """
    Search cost and quality for every layer count from H to max_layers.

    Parameters:
    -----------
    max_layers : largest layer count
    H          : synchronization period
    seed       : synth-profile seed
    regimes    : synth regimes (default all)
    bandwidths : link speeds to re-time each profile with (default: as
                 synthesized)
    ncores     : worker processes (default: serial)

    Returns:
    --------
    data : structured array with the COLUMNS fields
    """
    if max_layers < H:
        msg = "max_layers (%s) must be >= H (%s)"%(max_layers,H)
        raise ValueError(msg)
    if regimes is None: regimes = list(REGIMES)
    if not bandwidths: bandwidths = [None]

    tasks = [(L,H,regime,seed,bw) for regime in regimes for bw in bandwidths
             for L in range(H,max_layers+1)]
    logger.info("Benchmarking %i instances..."%len(tasks))
    if ncores and ncores > 1:
        with Pool(processes=ncores,maxtasksperchild=100) as pool:
            rows = pool.map(bench_instance,tasks)
    else:
        rows = list(map(bench_instance,tasks))
    return np.array(rows,dtype=COLUMNS)
