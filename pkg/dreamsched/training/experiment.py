"""
Multi-run convergence experiments.
"""
from collections import namedtuple, OrderedDict as odict

import numpy as np

from dreamsched.utils.logger import logger
from dreamsched.utils.stats import loglog_slope, time_average
from dreamsched.training.trainer import TrainerConfig, run_training

RateFit = namedtuple('RateFit',['slope','intercept','rvalue','R','subopt'])

# Variant name -> config overrides
VARIANTS = odict([
    ('partial',      dict(mode='partial',schedule='enp')),
    ('partial+fill', dict(mode='partial',schedule='enp+fill')),
    ('full',         dict(mode='full')),
])

def _configure(template, **kwargs):
    params = dict(template)
    params.update(kwargs)
    return TrainerConfig(params)

def rate_experiment(problem, config, R_list, seeds):
    """
    Fit the decay of the final suboptimality with the iteration count.

    Parameters:
    -----------
    problem : Problem
    config  : config template (TrainerConfig, dict or filename)
    R_list  : iteration counts (at least three)
    seeds   : worker seeds averaged at each R

    Returns:
    --------
    RateFit(slope, intercept, rvalue, R, subopt) of log mean suboptimality
    against log R
    """
    R_list = [int(R) for R in R_list]
    if len(R_list) < 3:
        msg = "Rate fit needs at least 3 iteration counts; got %i"%len(R_list)
        raise ValueError(msg)
    if not len(seeds):
        raise ValueError("Rate fit needs at least one seed")
    template = TrainerConfig(config)
    if template['sigma'] == 0 or problem.sigma == 0:
        logger.warning("Noise-free problem: expect faster than O(1/R) decay")
    if template['lr'] != 'decaying':
        logger.warning("Rate fit with a constant step size")

    subopt = []
    for R in R_list:
        values = []
        for seed in seeds:
            cfg = _configure(template,R=R,seed=seed,log_stride=max(R,1))
            values.append(run_training(cfg,problem).final_subopt)
        subopt.append(np.mean(values))
        logger.info("R=%i: mean subopt %.4g over %i seeds"%(R,subopt[-1],len(seeds)))

    slope,intercept,rvalue = loglog_slope(R_list,subopt)
    return RateFit(slope,intercept,rvalue,np.array(R_list),np.array(subopt))

def divergence_experiment(problem, config, seeds, variants=None, skip=0):
    """
    Time-averaged model divergence of several synchronization variants on
    identical noise streams.

    Parameters:
    -----------
    problem  : Problem
    config   : config template
    seeds    : worker seeds
    variants : names from VARIANTS (default all)
    skip     : leading logged iterations left out of the average

    Returns:
    --------
    results : ordered dict of variant -> array of per-seed averages
    """
    template = TrainerConfig(config)
    if variants is None: variants = list(VARIANTS)
    results = odict()
    for name in variants:
        if name not in VARIANTS:
            msg = "Unrecognized variant: %s (choices: %s)"%(name,', '.join(VARIANTS))
            raise ValueError(msg)
        values = []
        for seed in seeds:
            cfg = _configure(template,seed=seed,log_stride=1,**VARIANTS[name])
            trace = run_training(cfg,problem)
            values.append(time_average(trace.gamma,skip))
        results[name] = np.array(values)
        logger.info("%s: mean divergence %.4g"%(name,np.mean(values)))
    return results
