import math

import numpy as np
import pytest

from fpplab.branching import (population_at_time, simulate_branching, simulate_population,
                              growth_rate_estimate)
from fpplab.degrees import DegreeDistribution, size_biased
from fpplab.errors import OutOfScopeError
from fpplab.stats import ks_two_sample

CUBIC = DegreeDistribution.regular(3)


def test_regular_population_is_linear():
    tr = simulate_branching(CUBIC, target_pop=500, seed=1)
    assert tr.root_degree == 3
    assert np.array_equal(tr.Sigma, 3 + np.arange(tr.splits + 1))
    assert tr.Sigma_last == 500 and tr.splits == 497


def test_split_time_increments():
    tr = simulate_branching(DegreeDistribution({3: 0.5, 5: 0.5}), target_pop=2000, seed=2)
    assert tr.T[0] == 0.0
    assert np.all(np.diff(tr.T) > 0)
    assert np.allclose(np.diff(tr.T), tr.E / tr.Sigma[:-1], rtol=1e-9, atol=1e-15)
    assert np.array_equal(np.diff(tr.Sigma), tr.offspring - 1)


def test_population_lower_bound_from_min_degree():
    p = DegreeDistribution({3: 0.5, 4: 0.5})
    for seed in range(20):
        tr = simulate_branching(p, target_pop=300, seed=seed)
        i = np.arange(tr.splits + 1)
        assert np.all(tr.Sigma >= tr.root_degree + i)
        if tr.root_degree == 3:
            assert np.all(tr.Sigma >= 3 + (3 - 2) * i)


def test_offspring_law_matches_size_biased():
    p = DegreeDistribution({3: 0.9, 10: 0.1})
    q = size_biased(p)
    tr = simulate_branching(p, target_pop=60000, seed=3)
    freq = np.mean(tr.offspring == 9)
    assert abs(freq - q.pmf[9]) < 4 * math.sqrt(q.pmf[9] * (1 - q.pmf[9]) / tr.offspring.size)


def test_first_split_mean():
    rng = np.random.default_rng(4)
    t1 = np.array([simulate_branching(CUBIC, target_pop=4, seed=rng).T_last for _ in range(10**5)])
    assert abs(t1.mean() / (1 / 3) - 1) < 0.01


def test_split_time_law_matches_pure_birth():
    # with 3 + j individuals alive before split j, T_k is a sum of Exp(3 + j), j < k
    k = 20
    rng = np.random.default_rng(5)
    sims = np.array([simulate_branching(CUBIC, target_pop=3 + k, seed=rng).T_last for _ in range(2000)])
    direct = rng.standard_exponential((2000, k)) / (3 + np.arange(k))
    assert ks_two_sample(sims, direct.sum(axis=1)).passed


def test_population_at_time():
    tr = simulate_branching(CUBIC, target_pop=1000, seed=6)
    assert population_at_time(tr, 0.0) == 3
    assert population_at_time(tr, np.nextafter(tr.T[1], 0)) == 3
    assert population_at_time(tr, tr.T[1]) == 4
    assert population_at_time(tr, tr.T[500]) == 503
    with pytest.raises(ValueError):
        population_at_time(tr, -1.0)


def test_streamed_population_matches_stored():
    tr = simulate_branching(CUBIC, target_pop=5000, seed=7)
    t = float(tr.T[3000]) + 1e-9
    assert simulate_population(CUBIC, t, seed=7) == population_at_time(tr, t)


@pytest.mark.slow
def test_exponential_growth_rate():
    pops = [simulate_population(CUBIC, 12.0, seed=s) for s in range(1000)]
    assert abs(growth_rate_estimate(pops, 12.0) - 1.0) < 0.1


def test_large_runs_drop_arrays():
    tr = simulate_branching(CUBIC, target_pop=300000, seed=8)
    assert tr.T is None and tr.Sigma_last == 300000
    with pytest.raises(ValueError):
        tr.to_csv()


def test_scope():
    with pytest.raises(OutOfScopeError):
        simulate_branching(DegreeDistribution({2: 1.0}), target_pop=10)
    with pytest.raises(ValueError):
        simulate_branching(CUBIC, target_pop=10**8)


def test_csv():
    lines = simulate_branching(CUBIC, target_pop=6, seed=1).to_csv().splitlines()
    assert lines[0] == "i,T_i,Sigma_i"
    assert lines[1] == "0,0,3"
    assert len(lines) == 5
