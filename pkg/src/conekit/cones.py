"""Finite-dimensional convex cone engine.

V-representations are ray lists; the central operation is the polar map
(vertex enumeration) for spanning pointed cones, implemented with the
double description method. Everything runs in one of two arithmetics:

* exact: rays are coprime-integer tuples, all comparisons are exact;
* float: rays are unit-norm tuples, comparisons use a tolerance.

The same code path serves both; only canonicalization and zero tests
differ.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT, Tolerances


class ConePreconditionError(ValueError):
    """Raised when an operation requires a spanning and/or pointed cone."""


# --- canonical rays ---------------------------------------------------------

def _is_exact_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def detect_exact(vectors: Sequence[Sequence]) -> bool:
    for v in vectors:
        for x in v:
            if not _is_exact_scalar(x):
                return False
    return True


def _canon_exact(vec: Sequence) -> Optional[tuple]:
    """Coprime-integer representative of the ray through vec (direction kept)."""
    fracs = [Fraction(x) for x in vec]
    if all(f == 0 for f in fracs):
        return None
    denom = 1
    for f in fracs:
        denom = denom * f.denominator // math.gcd(denom, f.denominator)
    ints = [int(f * denom) for f in fracs]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    return tuple(v // g for v in ints)


def _canon_float(vec: Sequence, tol: float) -> Optional[tuple]:
    arr = np.asarray(vec, dtype=float)
    nrm = float(np.linalg.norm(arr))
    if nrm <= tol:
        return None
    return tuple(float(x) for x in arr / nrm)


@dataclass(frozen=True)
class Ray:
    coords: tuple
    canonical: bool = True


@dataclass(frozen=True)
class PositivityFunctional:
    """A linear functional strictly positive on every generator of a cone."""
    coords: tuple


@dataclass(frozen=True)
class NotPointedReport:
    """Certificate that a cone contains a line: sum_k coeff_k * ray_k = 0."""
    ray_index: int
    coefficients: tuple


@dataclass(frozen=True)
class ConeV:
    """Conic hull of finitely many rays."""

    ambient_dim: int
    rays: Tuple[Ray, ...]
    exact: bool
    pointed: Optional[bool] = None
    spanning: Optional[bool] = None
    rays_extremal: bool = False

    def ray_vectors(self) -> List[tuple]:
        return [r.coords for r in self.rays]


@dataclass(frozen=True)
class ConeH:
    """Intersection of homogeneous halfspaces <n, .> >= 0."""

    ambient_dim: int
    normals: Tuple[Ray, ...]
    exact: bool


def canonicalize(vectors: Sequence[Sequence], exact: Optional[bool] = None,
                 tol: Tolerances = DEFAULT) -> List[Ray]:
    """Drop zeros, scale each ray to canonical form, dedupe, sort."""
    if exact is None:
        exact = detect_exact(vectors)
    canon = []
    for v in vectors:
        c = _canon_exact(v) if exact else _canon_float(v, tol.polar_tol)
        if c is not None:
            canon.append(c)
    if exact:
        canon = sorted(set(canon))
    else:
        canon.sort()
        deduped: List[tuple] = []
        for c in canon:
            if any(max(abs(a - b) for a, b in zip(c, d)) <= 10 * tol.polar_tol
                   for d in deduped):
                continue
            deduped.append(c)
        canon = deduped
    return [Ray(c) for c in canon]


def cone_from_rays(vectors: Sequence[Sequence], exact: Optional[bool] = None,
                   tol: Tolerances = DEFAULT) -> ConeV:
    if exact is None:
        exact = detect_exact(vectors)
    rays = canonicalize(vectors, exact, tol)
    dim = len(vectors[0]) if vectors else 0
    return ConeV(dim, tuple(rays), exact)


# --- generic linear algebra -------------------------------------------------

def _rank(rows: Sequence[Sequence], exact: bool, eps: float) -> int:
    if not rows:
        return 0
    if exact:
        work = [list(map(Fraction, r)) for r in rows]
        ncols = len(work[0])
        rank = 0
        row = 0
        for col in range(ncols):
            piv = next((i for i in range(row, len(work)) if work[i][col] != 0), None)
            if piv is None:
                continue
            work[row], work[piv] = work[piv], work[row]
            pval = work[row][col]
            for i in range(row + 1, len(work)):
                if work[i][col] != 0:
                    f = work[i][col] / pval
                    work[i] = [a - f * b for a, b in zip(work[i], work[row])]
            row += 1
            rank += 1
            if row == len(work):
                break
        return rank
    mat = np.array(rows, dtype=float)
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > max(eps, sv[0] * 1e-12)))


def _independent_rows(rows: Sequence[tuple], target: int, exact: bool,
                      eps: float) -> Optional[List[int]]:
    """Indices of `target` linearly independent rows, greedily."""
    chosen: List[int] = []
    if exact:
        work: List[list] = []
        for idx, r in enumerate(rows):
            cand = work + [list(map(Fraction, r))]
            if _rank_accum_exact(cand):
                work = cand
                chosen.append(idx)
                if len(chosen) == target:
                    return chosen
        return None
    basis: List[np.ndarray] = []
    for idx, r in enumerate(rows):
        v = np.array(r, dtype=float)
        for b in basis:
            v = v - np.dot(v, b) * b
        n = np.linalg.norm(v)
        if n > max(eps, 1e-10):
            basis.append(v / n)
            chosen.append(idx)
            if len(chosen) == target:
                return chosen
    return None


def _rank_accum_exact(rows: List[list]) -> bool:
    """True iff the row list is linearly independent (destructive on a copy)."""
    work = [row[:] for row in rows]
    n = len(work)
    ncols = len(work[0])
    row = 0
    for col in range(ncols):
        piv = next((i for i in range(row, n) if work[i][col] != 0), None)
        if piv is None:
            continue
        work[row], work[piv] = work[piv], work[row]
        pval = work[row][col]
        for i in range(row + 1, n):
            if work[i][col] != 0:
                f = work[i][col] / pval
                work[i] = [a - f * b for a, b in zip(work[i], work[row])]
        row += 1
        if row == n:
            return True
    return False


def _invert(rows: Sequence[tuple], exact: bool) -> List[tuple]:
    """Columns of the inverse of the square matrix with the given rows."""
    d = len(rows)
    if exact:
        work = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(d)]
                for i, r in enumerate(rows)]
        for col in range(d):
            piv = next(i for i in range(col, d) if work[i][col] != 0)
            work[col], work[piv] = work[piv], work[col]
            pval = work[col][col]
            work[col] = [x / pval for x in work[col]]
            for i in range(d):
                if i != col and work[i][col] != 0:
                    f = work[i][col]
                    work[i] = [a - f * b for a, b in zip(work[i], work[col])]
        inv = [[work[i][d + j] for i in range(d)] for j in range(d)]
        return [tuple(col) for col in inv]
    inv = np.linalg.inv(np.array(rows, dtype=float))
    return [tuple(float(x) for x in inv[:, j]) for j in range(d)]


def null_vector_exact(rows: Sequence[Sequence]) -> Optional[tuple]:
    """A nonzero rational vector x with row . x = 0 for all rows, or None."""
    if not rows:
        return None
    m = len(rows)
    n = len(rows[0])
    work = [list(map(Fraction, r)) for r in rows]
    pivots = {}
    row = 0
    for col in range(n):
        piv = next((i for i in range(row, m) if work[i][col] != 0), None)
        if piv is None:
            continue
        work[row], work[piv] = work[piv], work[row]
        pval = work[row][col]
        work[row] = [x / pval for x in work[row]]
        for i in range(m):
            if i != row and work[i][col] != 0:
                f = work[i][col]
                work[i] = [a - f * b for a, b in zip(work[i], work[row])]
        pivots[col] = row
        row += 1
        if row == m:
            break
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return None
    f0 = free[0]
    x = [Fraction(0)] * n
    x[f0] = Fraction(1)
    for col, r in pivots.items():
        x[col] = -work[r][f0]
    return tuple(x)


def null_vector_float(rows: Sequence[Sequence], eps: float) -> Optional[tuple]:
    mat = np.array(rows, dtype=float)
    _, sv, vt = np.linalg.svd(mat, full_matrices=True)
    n = mat.shape[1]
    rank = int(np.sum(sv > max(eps, (sv[0] if sv.size else 0.0) * 1e-12)))
    if rank >= n:
        return None
    return tuple(float(x) for x in vt[rank])


# --- simplex ----------------------------------------------------------------

@dataclass(frozen=True)
class LPResult:
    status: str                      # "optimal" | "infeasible" | "unbounded"
    x: Optional[tuple] = None
    dual: Optional[tuple] = None     # Farkas vector on infeasibility


def simplex_solve(A: Sequence[Sequence], b: Sequence, c: Optional[Sequence] = None,
                  exact: bool = True, eps: float = 1e-9) -> LPResult:
    """min c.x  s.t.  A x = b, x >= 0, via a two-phase tableau with Bland's rule.

    On infeasibility the returned dual y satisfies y.b > 0 and y^T A <= 0.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    if exact:
        eps = 0
        conv = Fraction
    else:
        conv = float
    rows = [[conv(x) for x in row] for row in A]
    rhs = [conv(x) for x in b]
    cost = [conv(x) for x in (c if c is not None else [0] * n)]
    flip = [False] * m
    for i in range(m):
        if rhs[i] < -eps if not exact else rhs[i] < 0:
            rows[i] = [-x for x in rows[i]]
            rhs[i] = -rhs[i]
            flip[i] = True

    # columns: n structural + m artificial
    tab = [rows[i] + [conv(int(i == j)) for j in range(m)] + [rhs[i]]
           for i in range(m)]
    basis = [n + i for i in range(m)]
    total = n + m

    def reduced_costs(cvec):
        cb = [cvec[basis[i]] for i in range(m)]
        r = []
        for j in range(total):
            zj = sum(cb[i] * tab[i][j] for i in range(m))
            r.append(cvec[j] - zj)
        return r

    def pivot(pr, pc):
        pval = tab[pr][pc]
        tab[pr] = [x / pval for x in tab[pr]]
        for i in range(m):
            if i != pr and tab[i][pc] != 0:
                f = tab[i][pc]
                tab[i] = [a - f * bb for a, bb in zip(tab[i], tab[pr])]
        basis[pr] = pc

    def run(cvec, eligible):
        while True:
            r = reduced_costs(cvec)
            pc = next((j for j in range(total)
                       if eligible(j) and r[j] < -eps), None)
            if pc is None:
                return "optimal"
            best = None
            for i in range(m):
                if tab[i][pc] > eps:
                    ratio = tab[i][total] / tab[i][pc]
                    if best is None or ratio < best[0] or \
                            (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return "unbounded"
            pivot(best[1], pc)

    phase1 = [conv(0)] * n + [conv(1)] * m
    run(phase1, lambda j: True)
    obj1 = sum(tab[i][total] for i in range(m) if basis[i] >= n)
    if (exact and obj1 != 0) or (not exact and obj1 > max(eps, 1e-7)):
        # Farkas dual from artificial reduced costs: y_i = 1 - r_{art_i}
        r = reduced_costs(phase1)
        y = [conv(1) - r[n + i] for i in range(m)]
        y = [-yi if flip[i] else yi for i, yi in enumerate(y)]
        return LPResult("infeasible", None, tuple(y))

    status = run(cost + [conv(0)] * m, lambda j: j < n)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [conv(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tab[i][total]
    return LPResult("optimal", tuple(x))


# --- cone predicates --------------------------------------------------------

def is_spanning(c: ConeV, tol: Tolerances = DEFAULT) -> bool:
    if not c.rays:
        return False
    return _rank(c.ray_vectors(), c.exact, tol.rank_tol) == c.ambient_dim


def is_pointed(c: ConeV, tol: Tolerances = DEFAULT):
    """PositivityFunctional on success, NotPointedReport otherwise."""
    rays = c.ray_vectors()
    if not rays:
        raise ConePreconditionError("empty cone has no pointedness certificate")
    d = c.ambient_dim
    n = len(rays)
    # find L with <L, r_k> >= 1: variables L = u - v, slack s >= 0
    A = []
    for i, r in enumerate(rays):
        slack = [0] * n
        slack[i] = -1
        A.append(list(r) + [-x for x in r] + slack)
    b = [1] * n
    res = simplex_solve(A, b, None, exact=c.exact,
                        eps=0 if c.exact else tol.polar_tol)
    if res.status == "optimal":
        L = tuple(res.x[i] - res.x[d + i] for i in range(d))
        return PositivityFunctional(L)
    y = res.dual
    j = next(i for i in range(n) if y[i] > 0)
    return NotPointedReport(j, tuple(y))


def membership(point: Sequence, c: ConeV, tol: Tolerances = DEFAULT):
    """(True, coefficients) if point is a conic combination of the rays,
    else (False, separating normal)."""
    rays = c.ray_vectors()
    if len(point) != c.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    exact = c.exact and detect_exact([point])
    if not rays:
        if all((x == 0) if exact else (abs(float(x)) <= tol.polar_tol) for x in point):
            return True, ()
        raise ConePreconditionError("membership in the empty cone is degenerate")
    A = [[r[i] for r in rays] for i in range(c.ambient_dim)]
    res = simplex_solve(A, list(point), None, exact=exact,
                        eps=0 if exact else tol.polar_tol)
    if res.status == "optimal":
        return True, res.x
    normal = tuple(-y for y in res.dual)
    return False, normal


def conic_combination(point: Sequence, c: ConeV, tol: Tolerances = DEFAULT,
                      minimize_sum: bool = True):
    """Nonnegative coefficients recombining to point, or None."""
    rays = c.ray_vectors()
    exact = c.exact and detect_exact([point])
    A = [[r[i] for r in rays] for i in range(c.ambient_dim)]
    cvec = [1] * len(rays) if minimize_sum else None
    res = simplex_solve(A, list(point), cvec, exact=exact,
                        eps=0 if exact else tol.polar_tol)
    if res.status != "optimal":
        return None
    return res.x


def extreme_ray_filter(c: ConeV, tol: Tolerances = DEFAULT) -> ConeV:
    """Minimal generator list: drop rays that are conic combinations of the rest."""
    rays = list(canonicalize(c.ray_vectors(), c.exact, tol))
    keep = list(range(len(rays)))
    for i in range(len(rays)):
        if i not in keep:
            continue
        others = [rays[j].coords for j in keep if j != i]
        if not others:
            continue
        sub = ConeV(c.ambient_dim, tuple(Ray(o) for o in others), c.exact)
        inside, _ = membership(rays[i].coords, sub, tol)
        if inside:
            keep.remove(i)
    kept = tuple(rays[i] for i in keep)
    return ConeV(c.ambient_dim, kept, c.exact, c.pointed, c.spanning,
                 rays_extremal=True)


# --- vertex enumeration (double description) --------------------------------

def _check_preconditions(c: ConeV, tol: Tolerances) -> ConeV:
    spanning = c.spanning if c.spanning is not None else is_spanning(c, tol)
    if not spanning:
        raise ConePreconditionError(
            f"cone does not span its {c.ambient_dim}-dim ambient space")
    if c.pointed is not None:
        pointed = c.pointed
    else:
        pointed = isinstance(is_pointed(c, tol), PositivityFunctional)
    if not pointed:
        raise ConePreconditionError("cone is not pointed (contains a line)")
    return replace(c, pointed=True, spanning=True)


def vertex_enumeration(c: ConeV, tol: Tolerances = DEFAULT) -> ConeV:
    """Extremal rays of the polar cone {y : <x,y> >= 0 for all x in C}."""
    c = _check_preconditions(c, tol)
    if not c.rays_extremal:
        # redundant generators do not change the polar, but dropping them
        # first keeps the run (and its roundoff) identical for equal cones
        c = replace(extreme_ray_filter(c, tol), pointed=True, spanning=True)
    d = c.ambient_dim
    eps = 0 if c.exact else tol.polar_tol
    constraints = [r.coords for r in canonicalize(c.ray_vectors(), c.exact, tol)]

    if d == 1:
        sign = 1 if constraints[0][0] > 0 else -1
        out = canonicalize([(sign,)], c.exact, tol)
        return ConeV(1, tuple(out), c.exact, pointed=True, spanning=True,
                     rays_extremal=True)

    idx = _independent_rows(constraints, d, c.exact, tol.rank_tol)
    if idx is None:
        raise ConePreconditionError("failed to find a simplicial subcone")
    base = [constraints[i] for i in idx]
    rest = [constraints[i] for i in range(len(constraints)) if i not in set(idx)]

    rays = [r for r in (_canon_exact(col) if c.exact else _canon_float(col, tol.polar_tol)
                        for col in _invert(base, c.exact)) if r is not None]
    processed: List[tuple] = list(base)

    def dot(a, r):
        return sum(x * y for x, y in zip(a, r))

    def activity_mask(r) -> int:
        mask = 0
        for k, a in enumerate(processed):
            v = dot(a, r)
            if (v == 0) if c.exact else (abs(v) <= eps):
                mask |= 1 << k
        return mask

    masks = [activity_mask(r) for r in rays]

    # insertion heuristic: most strictly-positive rays first, stable
    def pos_count(a):
        return sum(1 for r in rays if dot(a, r) > eps)

    rest = [rest[i] for i in
            sorted(range(len(rest)), key=lambda i: (-pos_count(rest[i]), i))]

    for a in rest:
        vals = [dot(a, r) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > eps]
        neg = [i for i, v in enumerate(vals) if v < -eps]
        zero = [i for i, v in enumerate(vals) if i not in pos and i not in neg]
        if not neg:
            processed.append(a)
            bit = 1 << (len(processed) - 1)
            for i in zero:
                masks[i] |= bit
            continue
        new_rays: List[tuple] = []
        for ip, iq in itertools.product(pos, neg):
            common = masks[ip] & masks[iq]
            if common.bit_count() < d - 2:
                continue
            active = [processed[k] for k in range(len(processed))
                      if common >> k & 1]
            if d > 2 and _rank(active, c.exact, tol.rank_tol) != d - 2:
                continue
            rp, rq = rays[ip], rays[iq]
            vp, vq = vals[ip], vals[iq]
            w = tuple(vp * q - vq * p for p, q in zip(rp, rq))
            w = _canon_exact(w) if c.exact else _canon_float(w, tol.polar_tol)
            if w is not None:
                new_rays.append(w)
        keep = pos + zero
        rays = [rays[i] for i in keep]
        masks = [masks[i] for i in keep]
        processed.append(a)
        bit = 1 << (len(processed) - 1)
        for i, r in enumerate(rays):
            v = dot(a, r)
            if (v == 0) if c.exact else (abs(v) <= eps):
                masks[i] |= bit
        seen = set(rays) if c.exact else None
        for w in new_rays:
            if c.exact:
                if w in seen:
                    continue
                seen.add(w)
            else:
                if any(max(abs(x - y) for x, y in zip(w, r)) <= 10 * tol.polar_tol
                       for r in rays):
                    continue
            rays.append(w)
            masks.append(activity_mask(w))

    out = canonicalize(rays, c.exact, tol)
    return ConeV(d, tuple(out), c.exact, pointed=None, spanning=None,
                 rays_extremal=True)


def double_polar_check(c: ConeV, tol: Tolerances = DEFAULT) -> bool:
    """Verify (C polar) polar == C on the canonical extremal generators."""
    polar = vertex_enumeration(c, tol)
    double = vertex_enumeration(
        replace(polar, pointed=None, spanning=None), tol)
    reference = extreme_ray_filter(c, tol)
    return same_ray_sets(double, reference, tol)


def same_ray_sets(a: ConeV, b: ConeV, tol: Tolerances = DEFAULT) -> bool:
    ra = [r.coords for r in canonicalize(a.ray_vectors(), a.exact, tol)]
    rb = [r.coords for r in canonicalize(b.ray_vectors(), b.exact, tol)]
    if len(ra) != len(rb):
        return False
    if a.exact and b.exact:
        return set(ra) == set(rb)
    for x, y in zip(ra, rb):
        if max(abs(p - q) for p, q in zip(x, y)) > 1e-7:
            return False
    return True


def cone_from_halfspaces(h: ConeH, tol: Tolerances = DEFAULT) -> ConeV:
    """V-representation of {y : <n, y> >= 0 for all normals n}.

    This is the polar of the cone generated by the normals, so it reuses
    vertex enumeration; the normal cone must be spanning and pointed.
    """
    normal_cone = ConeV(h.ambient_dim, h.normals, h.exact)
    return vertex_enumeration(normal_cone, tol)


def dump_cone(c: ConeV) -> dict:
    """JSON-friendly debug dump."""
    return {
        "ambient_dim": c.ambient_dim,
        "rays": [[_num_repr(x) for x in r.coords] for r in c.rays],
    }


def _num_repr(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, int):
        return x
    return float(x)
