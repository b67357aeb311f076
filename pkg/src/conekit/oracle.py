"""Independent cross-check pipeline for small instances.

Everything here is deliberately reimplemented from first principles and
shares no cone/LP code with the main engine: polar rays come from
brute-force facet enumeration over ray subsets, and membership from a
separate simplex with a different pivot rule. Hard budgets keep it
honest — this module exists to catch bugs, not to scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT, Tolerances
from .reduced import reduced_space, wdot
from .scenario import Scenario

MAX_AMBIENT_DIM = 6
MAX_RAYS = 24


class OracleBudgetError(RuntimeError):
    pass


def _rref_nullspace(rows: List[List], exact: bool, eps: float) -> List[list]:
    """Null-space basis via reduced row echelon form (own elimination)."""
    if not rows:
        return []
    m, n = len(rows), len(rows[0])
    work = [[Fraction(x) if exact else float(x) for x in r] for r in rows]
    pivots: List[int] = []
    r = 0
    for col in range(n):
        # partial pivot: largest magnitude below row r
        sel = None
        best = eps if not exact else 0
        for i in range(r, m):
            mag = abs(work[i][col])
            if (exact and mag != 0) or (not exact and float(mag) > best):
                sel, best = i, float(mag)
                if exact:
                    break
        if sel is None:
            continue
        work[r], work[sel] = work[sel], work[r]
        piv = work[r][col]
        work[r] = [x / piv for x in work[r]]
        for i in range(m):
            if i != r and work[i][col] != 0:
                f = work[i][col]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0) if exact else 0.0] * n
        v[fc] = Fraction(1) if exact else 1.0
        for ri, pc in enumerate(pivots):
            v[pc] = -work[ri][fc]
        basis.append(v)
    return basis


def _normalize_dir(v: Sequence, exact: bool, eps: float) -> Optional[tuple]:
    if exact:
        fr = [Fraction(x) for x in v]
        if all(x == 0 for x in fr):
            return None
        denom = 1
        for f in fr:
            denom = denom * f.denominator // _gcd(denom, f.denominator)
        ints = [int(f * denom) for f in fr]
        g = 0
        for x in ints:
            g = _gcd(g, abs(x))
        return tuple(Fraction(x // g) for x in ints)
    arr = np.asarray(v, dtype=float)
    nrm = float(np.linalg.norm(arr))
    if nrm <= eps:
        return None
    return tuple(float(x) for x in arr / nrm)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def brute_force_polar_rays(rays: Sequence[Sequence], ambient_dim: int,
                           tol: Tolerances = DEFAULT) -> List[tuple]:
    """Extremal rays of the polar cone by facet enumeration.

    Every (d-1)-subset of generators whose span has a one-dimensional
    orthogonal complement contributes a candidate normal; keep it when
    it is nonnegative on all generators.
    """
    rays = [tuple(r) for r in rays]
    if ambient_dim > MAX_AMBIENT_DIM:
        raise OracleBudgetError(f"oracle limited to dim <= {MAX_AMBIENT_DIM}")
    if len(rays) > MAX_RAYS:
        raise OracleBudgetError(f"oracle limited to {MAX_RAYS} rays")
    exact = all(isinstance(x, (int, Fraction)) and not isinstance(x, bool)
                for r in rays for x in r)
    eps = tol.polar_tol
    d = ambient_dim

    if d == 1:
        # polar of the positive half-line is itself
        sgns = set()
        for r in rays:
            if (r[0] > 0 if exact else float(r[0]) > eps):
                sgns.add(1)
            elif (r[0] < 0 if exact else float(r[0]) < -eps):
                sgns.add(-1)
        if sgns == {1}:
            return [(Fraction(1),) if exact else (1.0,)]
        if sgns == {-1}:
            return [(Fraction(-1),) if exact else (-1.0,)]
        return []

    found: List[tuple] = []
    for subset in itertools.combinations(range(len(rays)), d - 1):
        null = _rref_nullspace([list(rays[i]) for i in subset], exact, eps)
        if len(null) != 1:
            continue
        n = null[0]
        vals = [wdot(n, r) for r in rays]
        if exact:
            nonneg = all(v >= 0 for v in vals)
            nonpos = all(v <= 0 for v in vals)
        else:
            nonneg = all(float(v) >= -eps for v in vals)
            nonpos = all(float(v) <= eps for v in vals)
        if nonpos and not nonneg:
            n = [-x for x in n]
        elif not nonneg:
            continue
        cand = _normalize_dir(n, exact, eps)
        if cand is None:
            continue
        if exact:
            if cand not in found:
                found.append(cand)
        else:
            if not any(max(abs(a - b) for a, b in zip(cand, f)) <= 10 * eps
                       for f in found):
                found.append(cand)
    found.sort()
    return found


@dataclass(frozen=True)
class OracleLP:
    feasible: bool
    coefficients: Optional[tuple] = None


def lp_membership(point: Sequence, rays: Sequence[Sequence],
                  tol: Tolerances = DEFAULT) -> OracleLP:
    """Is point a nonnegative combination of rays? Own simplex, Dantzig rule."""
    rays = [tuple(r) for r in rays]
    point = tuple(point)
    exact = all(isinstance(x, (int, Fraction)) and not isinstance(x, bool)
                for r in rays for x in r) and \
        all(isinstance(x, (int, Fraction)) and not isinstance(x, bool)
            for x in point)
    eps = 0 if exact else tol.polar_tol
    m = len(point)
    n = len(rays)
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0

    # phase-1 tableau: minimize sum of artificials; columns = rays then
    # artificials; Dantzig entering rule (most negative reduced cost)
    b = [Fraction(x) if exact else float(x) for x in point]
    A = [[Fraction(rays[j][i]) if exact else float(rays[j][i])
          for j in range(n)] for i in range(m)]
    for i in range(m):
        if (b[i] < 0 if exact else b[i] < -(eps or 0.0)):
            b[i] = -b[i]
            A[i] = [-x for x in A[i]]
    tab = [A[i] + [one if k == i else zero for k in range(m)] + [b[i]]
           for i in range(m)]
    cost = [zero] * n + [one] * m
    basis = list(range(n, n + m))

    def reduced_costs():
        out = []
        for j in range(n + m):
            rc = cost[j] - sum(cost[basis[i]] * tab[i][j] for i in range(m))
            out.append(rc)
        return out

    for it in range(20000):
        rc = reduced_costs()
        enter, best = None, -(eps if not exact else 0)
        for j in range(n + m):
            if rc[j] < best:
                enter, best = j, rc[j]
                if it > 5000:
                    break      # fall back to first-index rule to break cycles
        if enter is None:
            break
        leave, best_ratio = None, None
        for i in range(m):
            a = tab[i][enter]
            if (a > 0 if exact else float(a) > (eps or 1e-12)):
                ratio = tab[i][-1] / a
                if best_ratio is None or ratio < best_ratio or \
                        (ratio == best_ratio and basis[i] < basis[leave]):
                    leave, best_ratio = i, ratio
        if leave is None:
            break          # unbounded in phase 1: cannot happen, cost >= 0
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [a - f * p for a, p in zip(tab[i], tab[leave])]
        basis[leave] = enter
    obj = sum(cost[basis[i]] * tab[i][-1] for i in range(m))
    if (obj > 0 if exact else float(obj) > (tol.polar_tol)):
        return OracleLP(False)
    x = [zero] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tab[i][-1]
    return OracleLP(True, tuple(x))


@dataclass(frozen=True)
class OracleReport:
    verdict: str                  # "Classical" | "NonClassical"
    dim_reduced: int
    n_products: int
    state_polar: tuple
    effect_polar: tuple


def oracle_classify(sc: Scenario, swap: bool = False,
                    tol: Tolerances = DEFAULT) -> OracleReport:
    states, effects = sc.state_vectors, sc.effect_vectors
    if swap:
        states, effects = effects, states
    rs = reduced_space(states, effects, tol.rank_tol, sc.ambient_gram, sc.exact)
    d = rs.dim
    if d > MAX_AMBIENT_DIM:
        raise OracleBudgetError(f"oracle limited to dim(R) <= {MAX_AMBIENT_DIM}")

    def uniq(vectors):
        out = []
        for v in vectors:
            n = _normalize_dir(v, sc.exact, tol.polar_tol)
            if n is None:
                continue
            if sc.exact:
                if n not in out:
                    out.append(n)
            elif not any(max(abs(a - b) for a, b in zip(n, o)) <= 10 * tol.polar_tol
                         for o in out):
                out.append(n)
        return out

    red_states = uniq(rs.to_reduced(v) for v in states)
    red_effects = uniq(rs.to_reduced(v) for v in effects)
    # polar taken against the reduced metric: feed dual coordinates
    g = rs.gram
    pol_s = brute_force_polar_rays(red_states, d, tol)
    pol_e = brute_force_polar_rays(red_effects, d, tol)

    products = []
    for sig in pol_e:
        sc_c = [x / gk for x, gk in zip(sig, g)]
        for eff in pol_s:
            fc = [x / gk for x, gk in zip(eff, g)]
            products.append(tuple(a * b for a in sc_c for b in fc))
    if sc.exact:
        choi = tuple(Fraction(1, 1) / g[k] if k == l else Fraction(0)
                     for k in range(d) for l in range(d))
    else:
        choi = tuple(1.0 / g[k] if k == l else 0.0
                     for k in range(d) for l in range(d))
    res = lp_membership(choi, products, tol)
    verdict = "Classical" if res.feasible else "NonClassical"
    return OracleReport(verdict, d, len(products),
                        tuple(pol_s), tuple(pol_e))
