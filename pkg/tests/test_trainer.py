#!/usr/bin/env python
"""
Test the convergence lab: problem, local SGD steps, divergence traces and
the multi-seed experiments.
"""
import os

import numpy as np
import pytest

from dreamsched.utils.config import ConfigError
from dreamsched.analysis.cost import Schedule, ScheduleError
from dreamsched.analysis.scheduler import save_schedule
from dreamsched.training.problem import Problem, stochastic_gradient
from dreamsched.training.trainer import (TrainerConfig, WorkerState,
                                         plsgd_step, run_training,
                                         resolve_schedule, prefix_fill,
                                         phase_masks, block_divergence,
                                         theory_bound)
from dreamsched.training.experiment import (rate_experiment,
                                            divergence_experiment)

TESTDIR = os.path.dirname(os.path.abspath(__file__))
CONFIG = os.path.join(TESTDIR,'train.yaml')

CONFIG_DEFAULTS = dict(K=4,H=5,R=100,lr='decaying',mode='partial',
                       schedule='enp',seed=0,log_stride=1,dim=64,layers=8,
                       mu=1.0,beta=2.0,sigma=1.0)

def make_config(**kwargs):
    return TrainerConfig(dict(CONFIG_DEFAULTS,**kwargs))

def problem_for(config):
    return Problem.from_config(config)

def test_problem():
    problem = Problem.quadratic(10,3,mu=1.0,beta=4.0,seed=2)
    np.testing.assert_equal(problem.block_sizes,[4,3,3])
    np.testing.assert_equal(problem.kappa,4.0)
    np.testing.assert_allclose(np.linalg.norm(problem.w0-problem.optimum),1.0)
    assert 0.5 <= problem.loss(problem.w0) <= 2.0
    np.testing.assert_equal(problem.loss(problem.optimum),0.0)

    x = np.arange(10,dtype=float)
    np.testing.assert_equal(problem.block_sq_norms(x),
                            [0+1+4+9,16+25+36,49+64+81])

    with pytest.raises(ValueError):
        Problem.quadratic(4,5)
    with pytest.raises(ValueError):
        Problem.quadratic(4,2,mu=2.0,beta=1.0)
    with pytest.raises(ValueError):
        Problem([1.0,-1.0],[0.0,0.0],[1,1])
    with pytest.raises(ValueError):
        Problem([1.0,1.0],[0.0,0.0],[1,2])

def test_stochastic_gradient():
    problem = Problem([1.0,2.0],[0.0,0.0],[1,1])
    rng = np.random.default_rng(0)
    np.testing.assert_equal(stochastic_gradient(problem,[1.0,1.0],rng),[1.0,2.0])
    with pytest.raises(ValueError):
        stochastic_gradient(problem,[1.0,1.0,1.0],rng)

    noisy = Problem(np.ones(4),np.zeros(4),[2,2],sigma=2.0)
    samples = np.array([stochastic_gradient(noisy,np.zeros(4),rng)
                        for i in range(5000)])
    np.testing.assert_allclose(samples.mean(axis=0),0.0,atol=0.1)
    np.testing.assert_allclose(np.mean(np.sum(samples**2,axis=1)),4.0,rtol=0.1)

def test_config():
    config = TrainerConfig()
    np.testing.assert_equal(config['K'],4)
    np.testing.assert_equal(config.shift,33.0)
    np.testing.assert_allclose(config.eta(0),4.0/33.0)

    config = TrainerConfig(CONFIG)
    np.testing.assert_equal(config.filename,CONFIG)
    np.testing.assert_equal((config['H'],config['R'],config['dim']),(2,50,16))

    config = make_config(lr='constant',eta=0.05)
    np.testing.assert_equal(config.eta(1000),0.05)

    for kwargs in [dict(K=0),dict(H=0),dict(mode='async'),dict(K='x'),
                   dict(lr='cosine'),dict(lr='constant',eta=0),
                   dict(a=10.0),dict(layers=65),dict(mu=3.0)]:
        with pytest.raises(ConfigError):
            make_config(**kwargs)

def test_resolve_schedule(tmp_path):
    config = make_config()
    problem = problem_for(config)
    np.testing.assert_equal(resolve_schedule(config,problem),Schedule.enp(8,5))

    filled = resolve_schedule(make_config(schedule='enp+fill'),problem)
    np.testing.assert_equal(filled.supplemental,
                            ((),(8,7),(8,7,6,5),(8,7,6,5,4,3),
                             (8,7,6,5,4,3,2)))
    np.testing.assert_equal(prefix_fill(Schedule([[3,2,1],[]])).supplemental,
                            ((),(3,2,1)))

    path = str(tmp_path.joinpath('eight.schedule'))
    save_schedule(Schedule.from_sizes([4,4,0,0,0]),path)
    np.testing.assert_equal(resolve_schedule(make_config(schedule=path),problem),
                            Schedule.from_sizes([4,4,0,0,0]))

    assert resolve_schedule(make_config(mode='full'),problem) is None
    with pytest.raises(ConfigError):
        resolve_schedule(make_config(schedule='nope'),problem)
    with pytest.raises(ScheduleError):
        run_training(make_config(R=5),problem,Schedule.enp(8,4))

def test_ssgd_equivalence():
    # Synchronizing every layer every iteration is S-SGD
    config = make_config(H=1)
    problem = problem_for(config)
    schedule = resolve_schedule(config,problem)
    np.testing.assert_equal(schedule,Schedule.single(8))

    partial = WorkerState.spawn(4,problem.w0,7)
    ssgd = WorkerState.spawn(4,problem.w0,7)
    full = WorkerState.spawn(4,problem.w0,7)
    ssgd_config = make_config(H=1,mode='ssgd')
    full_config = make_config(H=1,mode='full')
    for r in range(100):
        plsgd_step(partial,r,config,problem,schedule)
        plsgd_step(ssgd,r,ssgd_config,problem)
        plsgd_step(full,r,full_config,problem)
    for a,b,c in zip(partial,ssgd,full):
        np.testing.assert_allclose(a.w,b.w,rtol=0,atol=1e-12)
        np.testing.assert_equal(a.w,c.w)

def test_block_synchronization():
    config = make_config(K=2,H=2,dim=8,layers=2)
    problem = problem_for(config)
    schedule = resolve_schedule(config,problem)
    masks = phase_masks(schedule,problem)
    workers = WorkerState.spawn(2,problem.w0,3)
    first,second = problem.blocks

    plsgd_step(workers,0,config,problem,masks=masks)
    np.testing.assert_equal(workers[0].w[second],workers[1].w[second])
    assert np.any(workers[0].w[first] != workers[1].w[first])
    W = np.stack([w.w for w in workers])
    gamma = block_divergence(W,problem)
    assert gamma[0] > 0
    np.testing.assert_equal(gamma[1],0.0)

    plsgd_step(workers,1,config,problem,masks=masks)
    np.testing.assert_equal(workers[0].w[first],workers[1].w[first])
    assert np.any(workers[0].w[second] != workers[1].w[second])

    with pytest.raises(ScheduleError):
        plsgd_step(workers,2,config,problem)

def test_block_divergence():
    problem = Problem(np.ones(4),np.zeros(4),[2,2])
    W = np.array([[1.0,0.0,2.0,0.0],[-1.0,0.0,2.0,0.0]])
    np.testing.assert_allclose(block_divergence(W,problem),[1.0,0.0])

def test_identical_workers():
    config = make_config(identical_workers=True,R=50)
    trace = run_training(config,problem_for(config))
    np.testing.assert_equal(trace.gamma,np.zeros(51))
    assert np.all(trace.subopt > 0)

def test_divergence_bound():
    for H in (2,5):
        for seed in range(10):
            config = make_config(K=8,H=H,R=200,dim=32,layers=4,seed=seed)
            trace = run_training(config,problem_for(config))
            np.testing.assert_equal(len(trace),201)
            np.testing.assert_equal(len(trace.violations(slack=2.0)),0)
            assert trace.G_meas > 0
            assert np.max(trace.gamma) > 0

def test_monotone_loss():
    config = make_config(mode='ssgd',sigma=0.0,R=200)
    problem = problem_for(config)
    trace = run_training(config,problem)
    assert np.all(np.diff(trace.loss) < 0)
    np.testing.assert_equal(trace.gamma,np.zeros(201))

def test_trace_output(tmp_path):
    config = TrainerConfig(CONFIG)
    trace = run_training(config,problem_for(config))
    np.testing.assert_equal(trace.r,np.arange(0,51,5))
    np.testing.assert_equal(trace.gamma_l.shape,(11,4))
    np.testing.assert_allclose(trace.gamma,trace.gamma_l.sum(axis=1))

    path = str(tmp_path.joinpath('trace.csv'))
    trace.write(path)
    with open(path) as f:
        lines = f.read().splitlines()
    np.testing.assert_equal(lines[0],'r,gamma,gamma_l_1,gamma_l_2,gamma_l_3,'
                            'gamma_l_4,lemma2_bound,subopt,eta')
    np.testing.assert_equal(len(lines),12)
    np.testing.assert_equal(lines[1].split(',')[0],'0')

    summary = trace.summary()
    np.testing.assert_equal(summary['iterations'],50)
    np.testing.assert_equal(summary['mode'],'partial')
    assert np.isfinite(summary['theory_bound']) and summary['theory_bound'] > 0
    assert 'subopt=' in trace.format_summary()

    # Same seed, same run
    again = run_training(config,problem_for(config))
    np.testing.assert_equal(again.subopt,trace.subopt)

def test_theory_bound():
    config = make_config()
    problem = problem_for(config)
    terms = theory_bound(problem,config,G=1.0)
    np.testing.assert_equal(list(terms),['init','variance','divergence','total'])
    np.testing.assert_allclose(terms['total'],terms['init']+terms['variance']
                               +terms['divergence'])
    assert np.isnan(theory_bound(problem,make_config(R=0),G=1.0)['total'])

    more = theory_bound(problem,make_config(R=1000),G=1.0)
    assert more['total'] < terms['total']

def test_rate():
    config = make_config(sigma=1.0)
    problem = problem_for(config)
    seeds = list(range(10))
    fit = rate_experiment(problem,config,[500,1000,2000,4000],seeds)
    assert -1.3 <= fit.slope <= -0.7
    assert np.all(np.diff(fit.subopt) < 0)

    quiet = make_config(sigma=0.0)
    exact = rate_experiment(problem_for(quiet),quiet,[500,1000,2000],seeds[:1])
    assert exact.slope < -1.3

    with pytest.raises(ValueError):
        rate_experiment(problem,config,[500,1000],seeds)
    with pytest.raises(ValueError):
        rate_experiment(problem,config,[500,1000,2000],[])

def test_more_workers():
    problem = problem_for(make_config())
    subopt = []
    for K in (4,8):
        values = [run_training(make_config(K=K,R=1000,log_stride=1000,seed=s),
                               problem).final_subopt for s in range(10)]
        subopt.append(np.mean(values))
    assert subopt[1] < subopt[0]

def test_divergence_experiment():
    # Partial synchronization keeps the replicas closer than full
    # synchronization on every seed
    config = make_config(K=32,H=5,R=500,lr='decaying')
    problem = problem_for(config)
    results = divergence_experiment(problem,config,range(5),
                                    variants=['partial','full'])
    np.testing.assert_equal(list(results),['partial','full'])
    assert np.all(results['partial'] < results['full'])

    config = make_config(lr='constant',eta=0.05,R=500)
    problem = problem_for(config)
    results = divergence_experiment(problem,config,range(5))
    np.testing.assert_equal(list(results),['partial','partial+fill','full'])
    partial,fill,full = [np.mean(v) for v in results.values()]
    assert fill < partial

    with pytest.raises(ValueError):
        divergence_experiment(problem,config,[0],variants=['async'])

if __name__ == "__main__":
    import argparse
    parser = argparse.ArgumentParser(description=__doc__)
    args = parser.parse_args()
