"""Polyhedral approximation hierarchies for non-polyhedral cones.

The exact pipeline needs polyhedral input cones. When the true state
and effect cones are round — the full qubit Bloch cone, or the PSD cone
in the entanglement recast — two one-sided approximations bracket the
answer:

* outer input cones (finitely many supporting halfspaces) shrink the
  polars, so the product cone Sep_in is contained in the true separable
  cone: membership of J certifies classicality / separability;
* inner input cones (finitely many true rays) enlarge the polars, so
  Sep_out contains the true separable cone: a Farkas functional for
  J outside Sep_out is nonnegative on everything separable and is a
  sound non-classicality / entanglement witness.

Sample sets grow monotonically with the level (structured solids first,
then a seeded low-discrepancy spiral), so Sep_out shrinks and Sep_in
grows along the hierarchy and any one-sided conclusion is final.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from .config import DEFAULT, Tolerances
from .cones import ConeH, Ray, cone_from_halfspaces, cone_from_rays
from .operators import Matrix, to_coords
from .reduced import reduced_space
from .scenario import Scenario

SOUNDNESS_BATCH = 10_000
SOUNDNESS_TOL = 1e-8


# --- direction schedules -----------------------------------------------------

_TETRAHEDRON = [
    (1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0),
]
_OCTAHEDRON = [
    (1.0, 0.0, 0.0), (-1.0, 0.0, 0.0), (0.0, 1.0, 0.0),
    (0.0, -1.0, 0.0), (0.0, 0.0, 1.0), (0.0, 0.0, -1.0),
]
_CUBE = [(x, y, z) for x in (1.0, -1.0) for y in (1.0, -1.0)
         for z in (1.0, -1.0)]


def _normed(v) -> tuple:
    n = math.sqrt(sum(x * x for x in v))
    return tuple(x / n for x in v)


def _fibonacci_tail(n: int, seed: int) -> List[tuple]:
    golden = (1 + math.sqrt(5)) / 2
    offset = (seed * 0.618033988749895) % 1.0
    out = []
    for i in range(n):
        z = 1 - 2 * (i + 0.5) / n
        r = math.sqrt(max(0.0, 1 - z * z))
        phi = 2 * math.pi * ((i / golden + offset) % 1.0)
        out.append((r * math.cos(phi), r * math.sin(phi), z))
    return out


def bloch_directions(count: int, seed: int = 0) -> List[tuple]:
    """The first `count` directions of a monotone schedule on the sphere."""
    base = [_normed(v) for v in _TETRAHEDRON + _OCTAHEDRON + _CUBE]
    if count <= len(base):
        return base[:count]
    return base + _fibonacci_tail(count - len(base), seed)


def level_count(level: int) -> int:
    """Directions per side at a hierarchy level: 4, 10, 18, 34, 66, ..."""
    if level <= 0:
        raise ValueError("levels start at 1")
    if level == 1:
        return 4
    if level == 2:
        return 10
    if level == 3:
        return 18
    return 18 + 16 * (2 ** (level - 3) - 1)


# --- float conic LPs (HiGHS) -------------------------------------------------

def _conic_membership(point: np.ndarray, gens: np.ndarray,
                      tol: float = 1e-9):
    """(True, theta) if point = gens.T @ theta with theta >= 0, else
    (False, gamma) with gamma nonnegative on every generator and
    gamma . point < 0 (Farkas)."""
    m, d = gens.shape
    res = linprog(np.zeros(m), A_eq=gens.T, b_eq=point,
                  bounds=[(0, None)] * m, method="highs")
    if res.status == 0:
        return True, np.asarray(res.x)
    # dual search: min <point, g> s.t. gens @ g >= 0, <point, g> >= -1
    res2 = linprog(point, A_ub=np.vstack([-gens, -point[None, :]]),
                   b_ub=np.concatenate([np.zeros(m), [1.0]]),
                   bounds=[(None, None)] * d, method="highs")
    if res2.status != 0 or res2.fun > -tol:
        return False, None
    return False, np.asarray(res2.x)


# --- verdicts ----------------------------------------------------------------

@dataclass(frozen=True)
class ApproxVerdict:
    kind: str                    # CertifiedClassical | WitnessedNonClassical
    #                            # | Inconclusive
    level: int
    context: str                 # "classicality" | "entanglement"
    witness: Optional[np.ndarray] = None     # matrix on R_e (x) R_s
    violation: Optional[float] = None        # normalized <target, witness>
    certifiers: Optional[np.ndarray] = None  # Sep_in coefficients
    margin: Optional[float] = None           # best witness value this level
    reason: str = ""


# --- per-side samplers -------------------------------------------------------

@dataclass(frozen=True)
class ConeSide:
    """One input cone with level-indexed inner rays and outer-polar rays.

    ``rays(k)`` returns k (or all, for polyhedral cones) true extremal
    rays; ``polar_rays(k)`` returns true extremal rays of the polar —
    equivalently, supporting-halfspace normals of the cone.
    ``polar_at`` (ball cones only) maps arbitrary sphere directions to
    polar elements, for fresh soundness batches.
    """

    kind: str                    # "ball" | "polyhedral"
    dim: int
    _rays: object = field(repr=False)
    _polar: object = field(repr=False)
    polar_at: Optional[object] = field(default=None, repr=False)

    def rays(self, k: int, seed: int) -> np.ndarray:
        return self._rays(k, seed)

    def polar_rays(self, k: int, seed: int) -> np.ndarray:
        return self._polar(k, seed)


def _ball_side(rs, eta: float, tol: Tolerances) -> ConeSide:
    """The depolarized Bloch-ball cone: rays eta*pure + (1-eta)*mixed.

    Its polar is again a ball cone; the supporting normal at direction
    n is (eta + 1/eta) * center - ray(n) / eta, up to positive scale.
    """
    def op_coords(m: Matrix) -> np.ndarray:
        return np.array(rs.to_reduced(to_coords(m, tol=tol).coords), dtype=float)

    mixed = op_coords(Matrix.identity(2).scale(0.5))

    def ray_of(n) -> np.ndarray:
        m = Matrix.from_parts(
            [[(1 + n[2]) / 2, n[0] / 2], [n[0] / 2, (1 - n[2]) / 2]],
            [[0.0, -n[1] / 2], [n[1] / 2, 0.0]], False)
        return eta * op_coords(m) + (1 - eta) * mixed

    def polar_at(dirs):
        r = np.array([ray_of(n) for n in dirs])
        return (eta + 1 / eta) * mixed[None, :] - r / eta

    def rays(k, seed):
        return np.array([ray_of(n) for n in bloch_directions(k, seed)])

    def polar(k, seed):
        return polar_at(bloch_directions(k, seed))

    return ConeSide("ball", rs.dim, rays, polar, polar_at)


def _polyhedral_side(rs, generators, tol: Tolerances) -> ConeSide:
    """Finite cone: every level sees the full generator and polar lists."""
    from .cones import vertex_enumeration
    red = np.array([rs.to_reduced(v) for v in generators], dtype=float)
    cone = cone_from_rays([tuple(r) for r in red], exact=False, tol=tol)
    pol = np.array([r.coords for r in vertex_enumeration(cone, tol).rays])
    ray_arr = np.array([r.coords for r in cone.rays])
    return ConeSide("polyhedral", rs.dim,
                    lambda k, seed: ray_arr, lambda k, seed: pol)


def _scenario_sides(sc: Scenario, tol: Tolerances):
    """Reduced space, state side, effect side, and J's coordinates."""
    if sc.mode != "quantum":
        raise ValueError("the approximation hierarchy targets quantum scenarios")
    states = [tuple(float(x) for x in v) for v in sc.state_vectors]
    effects = [tuple(float(x) for x in v) for v in sc.effect_vectors]
    if sc.exact:
        # exact charts are contravariant in the raw basis; move to the
        # orthonormal chart the float pipeline uses
        scale = [math.sqrt(float(g)) for g in sc.ambient_gram]
        states = [tuple(c * s for c, s in zip(v, scale)) for v in states]
        effects = [tuple(c * s for c, s in zip(v, scale)) for v in effects]
    rs = reduced_space(states, effects, tol.rank_tol, None, False)

    ball = (sc.hilbert_dim == 2 and sc.labels.get("name") == "qubit_full"
            and rs.dim == 4)
    if ball:
        eta = float(sc.labels.get("depolarized_eta", 1.0))
        side_s = _ball_side(rs, eta, tol)
        side_e = _ball_side(rs, 1.0, tol)
    else:
        side_s = _polyhedral_side(rs, states, tol)
        side_e = _polyhedral_side(rs, effects, tol)
    choi = np.eye(rs.dim).reshape(-1)   # orthonormal chart: J is the identity
    return rs, side_s, side_e, choi


def _products(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("ik,jl->ijkl", a, b).reshape(a.shape[0] * b.shape[0], -1)


def _halfspace_rays_float(normals: np.ndarray, tol: Tolerances) -> np.ndarray:
    h = ConeH(normals.shape[1],
              tuple(Ray(tuple(n)) for n in normals), exact=False)
    return np.array([r.coords for r in cone_from_halfspaces(h, tol).rays])


def certify_classical(sc: Scenario, level: int, seed: int = 0,
                      outer_faces: Optional[int] = None,
                      tol: Tolerances = DEFAULT) -> ApproxVerdict:
    """Outer input cones -> Sep_in inside Sep; membership of J certifies.

    The sampled supporting normals are true polar elements, so their
    products generate a cone inside the true separable cone.
    """
    _, side_s, side_e, choi = _scenario_sides(sc, tol)
    k = outer_faces or level_count(level)
    sep_in = _products(side_e.polar_rays(k, seed), side_s.polar_rays(k, seed))
    ok, theta = _conic_membership(choi, sep_in)
    if ok:
        return ApproxVerdict("CertifiedClassical", level, "classicality",
                             certifiers=theta)
    return ApproxVerdict("Inconclusive", level, "classicality",
                         reason="J outside the inner separable cone")


def witness_nonclassical(sc: Scenario, level: int, seed: int = 0,
                         inner_rays: Optional[int] = None,
                         tol: Tolerances = DEFAULT) -> ApproxVerdict:
    """Inner input cones -> Sep_out containing Sep; a Farkas functional
    for J outside Sep_out is a sound non-classicality witness."""
    from .cones import vertex_enumeration
    _, side_s, side_e, choi = _scenario_sides(sc, tol)
    k = inner_rays or level_count(level)
    polar_parts = []
    for side in (side_e, side_s):
        inner = side.rays(k, seed)
        cone = cone_from_rays([tuple(r) for r in inner], exact=False, tol=tol)
        polar_parts.append(
            np.array([r.coords for r in vertex_enumeration(cone, tol).rays]))
    sep_out = _products(polar_parts[0], polar_parts[1])
    ok, gamma = _conic_membership(choi, sep_out)
    d = side_s.dim
    if ok or gamma is None:
        return ApproxVerdict("Inconclusive", level, "classicality",
                             reason="J inside the outer separable cone")
    gamma = gamma / np.linalg.norm(gamma)
    value = float(choi @ gamma)
    replay = replay_soundness(
        gamma.reshape(d, d),
        lambda rng, n: _sample_polar(side_e, rng, n),
        seed=seed + 7919,
        sampler_b=lambda rng, n: _sample_polar(side_s, rng, n))
    if not replay["ok"]:
        return ApproxVerdict("Inconclusive", level, "classicality",
                             reason="witness failed the soundness replay")
    return ApproxVerdict("WitnessedNonClassical", level, "classicality",
                         witness=gamma.reshape(d, d), violation=value,
                         margin=value)


def _sample_polar(side: ConeSide, rng: np.random.Generator,
                  n: int) -> np.ndarray:
    """Fresh true polar elements for the soundness replay."""
    if side.kind == "polyhedral":
        pol = side.polar_rays(0, 0)
        idx = rng.integers(0, pol.shape[0], size=n)
        return pol[idx]
    return side.polar_at(_random_bloch(rng, n))


def hierarchy(sc: Scenario, max_level: int = 4, mode: str = "auto",
              seed: int = 0, inner_rays: Optional[int] = None,
              outer_faces: Optional[int] = None,
              tol: Tolerances = DEFAULT) -> ApproxVerdict:
    """Alternate certification and witnessing; first conclusion wins."""
    best_margin = None
    for level in range(1, max_level + 1):
        if mode in ("auto", "certify"):
            v = certify_classical(sc, level, seed, outer_faces, tol)
            if v.kind == "CertifiedClassical":
                return v
        if mode in ("auto", "witness"):
            v = witness_nonclassical(sc, level, seed, inner_rays, tol)
            if v.kind == "WitnessedNonClassical":
                return v
            if v.margin is not None:
                best_margin = v.margin if best_margin is None else \
                    min(best_margin, v.margin)
    return ApproxVerdict("Inconclusive", max_level,
                         "classicality" if mode != "entanglement"
                         else "entanglement",
                         margin=best_margin, reason="hierarchy exhausted")


# --- soundness replay --------------------------------------------------------

def _random_bloch(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def replay_soundness(gamma: np.ndarray, sampler, seed: int,
                     batch: int = SOUNDNESS_BATCH,
                     sampler_b=None) -> dict:
    """Check a witness is nonnegative on a fresh batch of true product rays.

    Each sampler ``(rng, n) -> (n, d)`` returns true elements of one
    side's polar cone; ``sampler`` feeds the first tensor slot.
    """
    rng = np.random.default_rng(seed)
    a = sampler(rng, batch)
    b = (sampler_b or sampler)(rng, batch)
    vals = np.einsum("ni,ij,nj->n", a, gamma, b)
    worst = float(vals.min())
    scale = float(np.abs(a).max() * np.abs(b).max() * np.abs(gamma).max())
    ok = worst >= -SOUNDNESS_TOL * max(scale, 1.0)
    return {"ok": ok, "min_pairing": worst, "batch": batch}


# --- entanglement recast -----------------------------------------------------

def _pauli_coords(rho: np.ndarray) -> np.ndarray:
    """Coordinates of a two-qubit operator in the product orthonormal chart."""
    from .operators import hermitian_basis
    basis = hermitian_basis(2).matrices
    out = np.zeros((4, 4))
    for k, bk in enumerate(basis):
        for l, bl in enumerate(basis):
            out[k, l] = float(np.trace(np.kron(bk, bl) @ rho).real)
    return out


def _qubit_pure_coords(dirs) -> np.ndarray:
    """Orthonormal-chart coordinates of (I + n.sigma)/2: (1, n)/sqrt(2)."""
    arr = np.asarray(dirs, dtype=float)
    return np.hstack([np.full((arr.shape[0], 1), 1.0), arr]) / math.sqrt(2.0)


def _random_pure_products(rng: np.random.Generator, n: int) -> np.ndarray:
    return _qubit_pure_coords(_random_bloch(rng, n))


def entanglement_check(rho: np.ndarray, max_level: int = 3, seed: int = 0,
                       inner_rays: Optional[int] = None,
                       outer_faces: Optional[int] = None,
                       tol: Tolerances = DEFAULT) -> ApproxVerdict:
    """Decide entanglement of a two-qubit state with the same machinery.

    Both input cones are the qubit PSD cone (self-dual), the state's
    tensor representative replaces J. Outer approximations of the PSD
    cones give a product cone containing every separable state, so a
    Farkas functional is a sound entanglement witness; inner
    approximations (sampled pure products) certify separability.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("expected a 4x4 two-qubit density matrix")
    omega = _pauli_coords(rho).reshape(-1)

    for level in range(1, max_level + 1):
        k = inner_rays or level_count(level)
        pure = _qubit_pure_coords(bloch_directions(k, seed))
        # separability certificate: omega inside sampled pure products
        sep_in = _products(pure, pure)
        ok, theta = _conic_membership(omega, sep_in)
        if ok:
            return ApproxVerdict("CertifiedClassical", level, "entanglement",
                                 certifiers=theta)
        # entanglement witness: omega outside products of outer PSD cones
        kf = outer_faces or level_count(level)
        faces = _qubit_pure_coords(bloch_directions(kf, seed))
        outer = _halfspace_rays_float(faces, tol)
        sep_out = _products(outer, outer)
        ok, gamma = _conic_membership(omega, sep_out)
        if not ok and gamma is not None:
            gamma = gamma / np.linalg.norm(gamma)
            value = float(omega @ gamma)
            replay = replay_soundness(gamma.reshape(4, 4),
                                      _random_pure_products,
                                      seed=seed + 104729)
            if replay["ok"]:
                return ApproxVerdict("WitnessedNonClassical", level,
                                     "entanglement",
                                     witness=gamma.reshape(4, 4),
                                     violation=value, margin=value)
    return ApproxVerdict("Inconclusive", max_level, "entanglement",
                         reason="hierarchy exhausted")
