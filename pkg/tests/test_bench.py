#!/usr/bin/env python
"""
Test the DFS vs brute-force scaling table.
"""
import numpy as np
import pytest

from dreamsched.analysis.scheduler import BRUTE_FORCE_LIMIT, search_bound
from dreamsched.analysis.bench import bench_scheduler, bench_instance

def test_bench_scaling():
    H = 5
    data = bench_scheduler(30,H=H,regimes=['balanced'])
    np.testing.assert_equal(data['layers'],np.arange(H,31))
    assert np.all(data['dfs_solutions'] >= 1)
    assert np.all(data['dfs_solutions'] <= 2**(H-1))
    for row in data[data['layers'] >= 2*H-1]:
        assert row['dfs_solutions'] <= search_bound(row['layers'],H)

    assert np.all(np.isfinite(data['bf_cost']))
    assert np.all(data['gap'] >= 0)
    assert np.all(data['dfs_cost'] >= data['bf_cost'])

    ratio = data['bf_candidates']/data['dfs_solutions']
    np.testing.assert_equal(data['bf_candidates'][-1],27841)
    assert ratio[-1] >= 1e2
    assert ratio[-1] > 10*ratio[0]

def test_bench_budget():
    # 30 layers in 10 sets exceeds the exhaustive budget
    row = bench_instance((30,10,'balanced',0,None))
    layers,H,regime,bandwidth,dfs_solutions,candidates = row[:6]
    assert candidates > BRUTE_FORCE_LIMIT
    assert dfs_solutions <= 2**(H-1)
    assert np.isnan(row[7]) and np.isnan(row[8])

def test_bench_errors():
    with pytest.raises(ValueError):
        bench_scheduler(4,H=5)
    with pytest.raises(ValueError):
        bench_scheduler(6,H=3,regimes=['nope'],ncores=2)

if __name__ == "__main__":
    import argparse
    parser = argparse.ArgumentParser(description=__doc__)
    args = parser.parse_args()
