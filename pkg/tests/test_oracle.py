import random
from fractions import Fraction

import pytest

from conekit.cones import (PositivityFunctional, cone_from_rays, is_pointed,
                           is_spanning, membership, vertex_enumeration)
from conekit.oracle import (MAX_AMBIENT_DIM, MAX_RAYS, OracleBudgetError,
                            brute_force_polar_rays, lp_membership,
                            oracle_classify)
from conekit.reduced import wdot
from conekit.scenario import builtin_scenario


def _good_cone(rng, d, n):
    while True:
        rays = [tuple(rng.randint(-3, 3) for _ in range(d)) for _ in range(n)]
        c = cone_from_rays(rays, exact=True)
        if c.rays and is_spanning(c) and \
                isinstance(is_pointed(c), PositivityFunctional):
            return c


def test_brute_force_matches_vertex_enumeration():
    rng = random.Random(31)
    for _ in range(30):
        d = rng.randint(2, 5)
        c = _good_cone(rng, d, rng.randint(d, 9))
        dd = sorted(r.coords for r in vertex_enumeration(c).rays)
        bf = sorted(tuple(map(Fraction, r))
                    for r in brute_force_polar_rays(c.ray_vectors(), d))
        assert [tuple(map(Fraction, r)) for r in dd] == bf


def test_brute_force_dimension_one():
    assert brute_force_polar_rays([(2,), (3,)], 1) == [(Fraction(1),)]
    assert brute_force_polar_rays([(-1,)], 1) == [(Fraction(-1),)]
    assert brute_force_polar_rays([(1,), (-1,)], 1) == []


def test_budgets_enforced():
    with pytest.raises(OracleBudgetError):
        brute_force_polar_rays([(1,) * 7] * 7, 7)
    with pytest.raises(OracleBudgetError):
        brute_force_polar_rays([(1, 0)] * (MAX_RAYS + 1), 2)


def test_lp_membership_agrees_with_engine():
    rng = random.Random(7)
    for _ in range(25):
        d = rng.randint(2, 4)
        c = _good_cone(rng, d, rng.randint(d, 8))
        point = tuple(rng.randint(-4, 4) for _ in range(d))
        ok_engine, _ = membership(point, c)
        res = lp_membership(point, c.ray_vectors())
        assert res.feasible == ok_engine
        if res.feasible:
            recon = [sum(t * r[i] for t, r in zip(res.coefficients,
                                                  c.ray_vectors()))
                     for i in range(d)]
            assert tuple(recon) == tuple(map(Fraction, point))


def test_oracle_classify_corpus():
    expected = {
        ("classical_simplex", 2): "Classical",
        ("classical_simplex", 3): "Classical",
        ("gpt_square", None): "NonClassical",
        ("qubit_six_state", None): "Classical",
        ("qubit_trine", None): "Classical",
    }
    for (name, d), verdict in expected.items():
        kw = {"d": d} if d else {}
        rep = oracle_classify(builtin_scenario(name, **kw))
        assert rep.verdict == verdict, name


def test_oracle_float_path():
    sc = builtin_scenario("qubit_trine")
    assert not sc.exact
    rep = oracle_classify(sc)
    assert rep.verdict == "Classical"
    assert rep.dim_reduced == 3
