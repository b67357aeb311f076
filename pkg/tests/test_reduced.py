from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conekit.reduced import (EmptySpanError, project, reduced_space,
                             span_orthobasis, swapped_reduced_space, wdot)


def test_span_rank_exact():
    s = span_orthobasis([(1, 0, 0), (0, 1, 0), (1, 1, 0)], exact=True)
    assert s.rank == 2
    # basis rows are mutually orthogonal
    for i, b in enumerate(s.basis):
        for j, c in enumerate(s.basis):
            if i != j:
                assert wdot(b, c) == 0


def test_span_with_ambient_gram():
    g = (2, 3)
    s = span_orthobasis([(1, 1), (2, 2)], ambient_gram=g, exact=True)
    assert s.rank == 1
    assert s.gram[0] == wdot(s.basis[0], s.basis[0], g)


def test_span_empty_raises():
    with pytest.raises(EmptySpanError):
        span_orthobasis([], exact=True)


def test_projection_is_idempotent_and_selfadjoint():
    rng = np.random.default_rng(0)
    vecs = [tuple(v) for v in rng.normal(size=(3, 6))]
    s = span_orthobasis(vecs)
    for _ in range(10):
        x = tuple(rng.normal(size=6))
        y = tuple(rng.normal(size=6))
        px = project(x, s)
        assert max(abs(a - b) for a, b in zip(px, project(px, s))) < 1e-10
        assert abs(wdot(px, y) - wdot(x, project(y, s))) < 1e-10


coords = st.fractions(min_value=-2, max_value=2, max_denominator=5)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_reduction_preserves_pairings_exact(data):
    n = data.draw(st.integers(3, 5))
    states = [tuple(data.draw(coords) for _ in range(n)) for _ in range(3)]
    effects = [tuple(data.draw(coords) for _ in range(n)) for _ in range(3)]
    if all(all(x == 0 for x in v) for v in states) or \
            all(all(x == 0 for x in v) for v in effects):
        return
    rs = reduced_space(states, effects, exact=True)
    if rs.dim == 0:
        return
    for s in states:
        for e in effects:
            lhs = wdot(s, e)
            rhs = rs.inner(rs.to_reduced(s), rs.to_reduced(e))
            assert lhs == rhs


def test_swapped_space_same_dimension():
    rng = np.random.default_rng(5)
    for _ in range(20):
        states = [tuple(v) for v in rng.normal(size=(4, 7))]
        effects = [tuple(v) for v in rng.normal(size=(3, 7))]
        a = reduced_space(states, effects)
        b = swapped_reduced_space(states, effects)
        assert a.dim == b.dim


def test_to_reduced_roundtrip():
    states = [(1, 0, 0, 0), (0, 1, 0, 0)]
    effects = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)]
    rs = reduced_space(states, effects, exact=True)
    assert rs.dim == 2
    v = (Fraction(1, 2), Fraction(1, 3), 0, 0)
    back = rs.to_ambient(rs.to_reduced(v))
    assert tuple(back) == v
