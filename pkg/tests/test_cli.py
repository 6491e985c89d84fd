#!/usr/bin/env python
"""
Test the command-line verbs end to end.
"""
import os
import json

import numpy as np

from dreamsched import cli
from dreamsched.analysis.profile import load_profile
from dreamsched.analysis.scheduler import load_schedule
from dreamsched.analysis.cost import Schedule

TESTDIR = os.path.dirname(os.path.abspath(__file__))
THREE_LAYER = os.path.join(TESTDIR,'three_layer.profile')
TOTALS = os.path.join(TESTDIR,'totals.profile')
CONFIG = os.path.join(TESTDIR,'train.yaml')

def run(capsys, *argv):
    code = cli.main(list(argv))
    out,err = capsys.readouterr()
    return code,out,err

def test_schedule(capsys, tmp_path):
    code,out,err = run(capsys,'schedule','--profile',THREE_LAYER,'--H','2',
                       '--explain')
    np.testing.assert_equal(code,0)
    lines = out.splitlines()
    assert 'objective=9.0' in lines
    assert 'solutions_explored=2' in lines
    assert 'h=1: sync=[3] fill=[]' in lines

    path = str(tmp_path.joinpath('three.schedule'))
    code,out,err = run(capsys,'schedule','--profile',THREE_LAYER,'--H','2',
                       '--out',path,'--no-fill')
    np.testing.assert_equal(code,0)
    np.testing.assert_equal(load_schedule(path),Schedule([[3],[2,1]]))

def test_oracle(capsys):
    code,out,err = run(capsys,'oracle','--profile',THREE_LAYER,'--H','2')
    np.testing.assert_equal(code,0)
    lines = out.splitlines()
    assert 'gap=0.0%' in lines
    assert 'bf_candidates=3' in lines
    assert 'dfs_cost=9.0' in lines

def test_simulate(capsys, tmp_path):
    code,out,err = run(capsys,'simulate','--profile',TOTALS,'--mode','flsgd',
                       '--iters','10','--H','5')
    np.testing.assert_equal(code,0)
    np.testing.assert_equal(out,'mode=flsgd makespan=36.0 avg_iter=3.6\n')

    schedule = str(tmp_path.joinpath('three.schedule'))
    run(capsys,'schedule','--profile',THREE_LAYER,'--H','2','--out',schedule)
    trace = str(tmp_path.joinpath('trace','plsgd.json'))
    code,out,err = run(capsys,'simulate','--profile',THREE_LAYER,
                       '--mode','plsgd','--schedule',schedule,'--iters','2',
                       '--trace',trace)
    np.testing.assert_equal(code,0)
    assert out.startswith('mode=plsgd makespan=15.0')
    with open(trace) as f:
        assert len(json.load(f)['traceEvents']) > 0

    # plsgd without a schedule is a validation error
    code,out,err = run(capsys,'simulate','--profile',THREE_LAYER,
                       '--mode','plsgd','--iters','2')
    np.testing.assert_equal(code,1)
    assert 'schedule' in err

def test_profile(capsys, tmp_path):
    path = str(tmp_path.joinpath('synth.profile'))
    argv = ['profile','gen','--layers','12','--seed','3','--regime',
            'comm-heavy','--out',path]
    np.testing.assert_equal(run(capsys,*argv)[0],0)
    np.testing.assert_equal(load_profile(path).nlayers,12)
    np.testing.assert_equal(run(capsys,*argv)[0],1)
    np.testing.assert_equal(run(capsys,*(argv+['--force']))[0],0)

    code,out,err = run(capsys,'profile','show','--profile',path)
    np.testing.assert_equal(code,0)
    assert 'layers=12' in out.splitlines()

def test_compare(capsys):
    code,out,err = run(capsys,'compare','--profile',THREE_LAYER,'--H','2',
                       '--iters','4')
    np.testing.assert_equal(code,0)
    lines = out.splitlines()
    np.testing.assert_equal(lines[0],'mode\tmakespan_s\tavg_iter_s')
    np.testing.assert_equal(len(lines),7)

def test_train(capsys, tmp_path):
    path = str(tmp_path.joinpath('trace.csv'))
    code,out,err = run(capsys,'train','--config',CONFIG,'--out',path)
    np.testing.assert_equal(code,0)
    assert os.path.exists(path)
    assert any(l.startswith('subopt=') for l in out.splitlines())

def test_bench(capsys, tmp_path):
    path = str(tmp_path.joinpath('bench.csv'))
    code,out,err = run(capsys,'bench','sched','--max-layers','6','--H','3',
                       '--regime','balanced','--out',path)
    np.testing.assert_equal(code,0)
    data = np.genfromtxt(path,delimiter=',',names=True,dtype=None,
                         encoding='utf-8')
    np.testing.assert_equal(data['layers'],[3,4,5,6])
    np.testing.assert_equal(data['gap'] >= 0,True)

def test_exit_codes(capsys, monkeypatch):
    code,out,err = run(capsys,'--version')
    np.testing.assert_equal(code,0)
    assert 'dreamsched' in out

    np.testing.assert_equal(run(capsys,'frobnicate')[0],1)
    np.testing.assert_equal(run(capsys,'schedule','--H','2')[0],1)
    missing = os.path.join(TESTDIR,'missing.profile')
    code,out,err = run(capsys,'schedule','--profile',missing,'--H','2')
    np.testing.assert_equal(code,1)
    np.testing.assert_equal(out,'')
    # More periods than layers
    np.testing.assert_equal(run(capsys,'schedule','--profile',THREE_LAYER,
                                '--H','4')[0],1)

    def boom(opts):
        raise RuntimeError('boom')
    monkeypatch.setattr(cli,'compare',boom)
    code,out,err = run(capsys,'compare','--profile',THREE_LAYER,'--H','2',
                       '--iters','4')
    np.testing.assert_equal(code,2)
    assert 'internal error' in err

if __name__ == "__main__":
    import argparse
    parser = argparse.ArgumentParser(description=__doc__)
    args = parser.parse_args()
