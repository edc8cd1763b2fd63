import random

import pytest
from hypothesis import given, settings, strategies as st

from setpack23.instance import generate_random, parse_instance, validate_packing
from setpack23.oracle import OracleBudgetExceeded, solve_exact
from conftest import brute_force_optimum, chain_instance


def test_empty_instance():
    assert solve_exact(parse_instance("")).optimum_weight == 0


def test_chain_optimum_and_witness():
    result = solve_exact(chain_instance())
    assert result.optimum_weight == 4
    assert result.witness.members == {0, 2}


def test_pairwise_disjoint_sums_everything():
    inst = parse_instance("1 2\n3 4 5\n6 7\n8 9 10\n")
    assert solve_exact(inst).optimum_weight == 1 + 2 + 1 + 2


@given(st.integers(0, 2 ** 31))
@settings(max_examples=60, deadline=None)
def test_matches_exhaustive_enumeration(seed):
    rng = random.Random(seed)
    n = rng.randrange(5, 11)
    m = rng.randrange(1, 16)
    inst = generate_random(n, m, rng.random(), seed)
    result = solve_exact(inst)
    assert result.optimum_weight == brute_force_optimum(inst)
    validate_packing(inst, result.witness)
    assert result.witness.weight(inst) == result.optimum_weight


def test_budget_error():
    inst = generate_random(30, 60, 0.5, seed=3)
    with pytest.raises(OracleBudgetExceeded):
        solve_exact(inst, budget=10)
