"""CDCL core: differential against brute force, classics, incrementality."""

import itertools
import random

import pytest

from minibmc.satcore import SATISFIABLE, Solver, UNSATISFIABLE, luby


def brute_force(num_vars, clauses, assumptions=()):
    """Exhaustive enumeration; the ground truth for small formulas."""
    forced = {}
    for lit in assumptions:
        if forced.get(abs(lit), lit > 0) != (lit > 0):
            return None
        forced[abs(lit)] = lit > 0
    for bits in itertools.product([False, True], repeat=num_vars):
        model = {v + 1: bits[v] for v in range(num_vars)}
        if any(model[abs(l)] != (l > 0) for l in assumptions):
            continue
        if all(any(model[abs(l)] == (l > 0) for l in c) for c in clauses):
            return model
    return None


def make_solver(num_vars, clauses):
    s = Solver()
    for _ in range(num_vars):
        s.new_var()
    for c in clauses:
        s.add_clause(c)
    return s


def random_cnf(rng, num_vars, num_clauses, width=3):
    clauses = []
    for _ in range(num_clauses):
        k = rng.randint(1, width)
        vs = rng.sample(range(1, num_vars + 1), min(k, num_vars))
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return clauses


def check(clauses, model):
    return all(any(model[abs(l)] == (l > 0) for l in c) for c in clauses)


def test_trivial():
    s = make_solver(2, [[1], [-1, 2]])
    r = s.solve()
    assert r.verdict == SATISFIABLE
    assert r.model[1] and r.model[2]


def test_empty_clause_unsat():
    s = Solver()
    s.new_var()
    s.add_clause([])
    assert s.solve().verdict == UNSATISFIABLE


def test_contradiction():
    s = make_solver(1, [[1], [-1]])
    assert s.solve().verdict == UNSATISFIABLE


def test_luby_sequence():
    assert [luby(i) for i in range(1, 10)] == [1, 1, 2, 1, 1, 2, 4, 1, 1]


@pytest.mark.parametrize("seed", range(40))
def test_random_vs_brute_force(seed):
    rng = random.Random(seed)
    num_vars = rng.randint(3, 9)
    clauses = random_cnf(rng, num_vars, rng.randint(2, 4 * num_vars))
    expected = brute_force(num_vars, clauses)
    s = make_solver(num_vars, clauses)
    r = s.solve()
    if expected is None:
        assert r.verdict == UNSATISFIABLE
    else:
        assert r.verdict == SATISFIABLE
        assert check(clauses, r.model)


@pytest.mark.parametrize("seed", range(40, 70))
def test_random_with_assumptions(seed):
    rng = random.Random(seed)
    num_vars = rng.randint(3, 8)
    clauses = random_cnf(rng, num_vars, rng.randint(2, 3 * num_vars))
    assumptions = [v if rng.random() < 0.5 else -v
                   for v in rng.sample(range(1, num_vars + 1), 2)]
    expected = brute_force(num_vars, clauses, assumptions)
    s = make_solver(num_vars, clauses)
    r = s.solve(assumptions)
    if expected is None:
        assert r.verdict == UNSATISFIABLE
    else:
        assert r.verdict == SATISFIABLE
        assert check(clauses, r.model)
        assert all(r.model[abs(l)] == (l > 0) for l in assumptions)


def test_incremental_reuse():
    """Solving again after an UNSAT-under-assumptions round must work."""
    s = make_solver(3, [[1, 2], [-1, 3]])
    assert s.solve([-2, -3]).verdict == UNSATISFIABLE  # forces 1 and -3 clash
    r = s.solve()
    assert r.verdict == SATISFIABLE
    r2 = s.solve([-1])
    assert r2.verdict == SATISFIABLE and not r2.model[1]


def test_clauses_added_between_solves():
    s = make_solver(2, [[1, 2]])
    assert s.solve().verdict == SATISFIABLE
    s.add_clause([-1])
    s.add_clause([-2])
    assert s.solve().verdict == UNSATISFIABLE


def php_clauses(pigeons, holes):
    """Pigeonhole principle: var p*holes + h + 1 means pigeon p in hole h."""
    def var(p, h):
        return p * holes + h + 1
    clauses = [[var(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p1 in range(pigeons):
            for p2 in range(p1 + 1, pigeons):
                clauses.append([-var(p1, h), -var(p2, h)])
    return pigeons * holes, clauses


def test_pigeonhole_4_3_unsat():
    n, clauses = php_clauses(4, 3)
    s = make_solver(n, clauses)
    r = s.solve()
    assert r.verdict == UNSATISFIABLE
    assert r.stats.conflicts > 0


def test_pigeonhole_3_3_sat():
    n, clauses = php_clauses(3, 3)
    r = make_solver(n, clauses).solve()
    assert r.verdict == SATISFIABLE
    assert check(clauses, r.model)


def test_models_are_total():
    s = make_solver(5, [[1]])
    r = s.solve()
    assert set(r.model) == {1, 2, 3, 4, 5}


def test_deterministic():
    rng = random.Random(7)
    clauses = random_cnf(rng, 8, 25)
    r1 = make_solver(8, clauses).solve()
    r2 = make_solver(8, clauses).solve()
    assert r1.verdict == r2.verdict
    assert r1.model == r2.model
