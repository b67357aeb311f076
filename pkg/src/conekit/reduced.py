"""Reduced-space construction: project the state span onto the effect span.

Vectors here are plain coordinate sequences in an ambient chart that is
either orthonormal (float mode, Gram diagonal all ones) or orthogonal
with a rational Gram diagonal (exact mode). All inner products are
Gram-weighted dot products, which keeps every quantity rational on the
exact path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from .config import DEFAULT, Tolerances


def wdot(x: Sequence, y: Sequence, gram: Optional[Sequence] = None):
    if gram is None:
        return sum(a * b for a, b in zip(x, y))
    return sum(a * b * g for a, b, g in zip(x, y, gram))


def _scale_to_integers(vec: Sequence[Fraction]) -> tuple:
    """Positive rescaling to coprime integers (keeps direction)."""
    fracs = [Fraction(x) for x in vec]
    denom = 1
    for f in fracs:
        denom = denom * f.denominator // math.gcd(denom, f.denominator)
    ints = [int(f * denom) for f in fracs]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(Fraction(v) for v in ints)


@dataclass(frozen=True)
class Subspace:
    """Orthogonal basis (rows) of a linear span, with its Gram diagonal."""

    ambient_dim: int
    basis: tuple              # rows: tuples of coordinates
    gram: tuple               # <b_i, b_i> for each row
    ambient_gram: Optional[tuple]
    exact: bool

    @property
    def rank(self) -> int:
        return len(self.basis)


class EmptySpanError(ValueError):
    pass


def span_orthobasis(vectors: Sequence[Sequence], rank_tol: float = DEFAULT.rank_tol,
                    ambient_gram: Optional[Sequence] = None,
                    exact: bool = False) -> Subspace:
    """Orthogonal basis of the linear span of the given vectors.

    Both modes run Gram-Schmidt over the vectors in the given order, so
    appending vectors already inside the span leaves the basis unchanged
    entry for entry.  Float mode reorthogonalizes each residual once and
    drops it when its norm falls below rank_tol times the input norm;
    exact mode keeps every nonzero residual.
    """
    vectors = [tuple(v) for v in vectors]
    if not vectors:
        raise EmptySpanError("cannot span an empty vector list")
    n = len(vectors[0])
    for v in vectors:
        if len(v) != n:
            raise ValueError("vectors have inconsistent ambient dimension")
    ag = tuple(ambient_gram) if ambient_gram is not None else None

    if exact:
        basis: List[tuple] = []
        grams: List[Fraction] = []
        for v in vectors:
            r = list(Fraction(x) for x in v)
            for b, g in zip(basis, grams):
                c = wdot(b, r, ag) / g
                if c != 0:
                    r = [ri - c * bi for ri, bi in zip(r, b)]
            if any(x != 0 for x in r):
                r = _scale_to_integers(r)
                basis.append(r)
                grams.append(wdot(r, r, ag))
        return Subspace(n, tuple(basis), tuple(grams), ag, True)

    agf = np.array(ag, dtype=float) if ag is not None else None

    def wd(a, b):
        return float(np.dot(a * agf, b)) if agf is not None else \
            float(np.dot(a, b))

    fbasis: List[np.ndarray] = []
    for v in vectors:
        r = np.array(v, dtype=float)
        norm0 = np.sqrt(max(wd(r, r), 0.0))
        for _ in range(2):                 # second pass for orthogonality
            for b in fbasis:
                r = r - wd(b, r) * b
        rn = np.sqrt(max(wd(r, r), 0.0))
        if rn > rank_tol * max(norm0, 1.0):
            fbasis.append(r / rn)
    return Subspace(n, tuple(tuple(float(x) for x in b) for b in fbasis),
                    tuple(1.0 for _ in fbasis), ag, False)


def project(v: Sequence, s: Subspace) -> tuple:
    """Orthogonal projection of v onto the subspace, in ambient coordinates."""
    if len(v) != s.ambient_dim:
        raise ValueError(f"vector length {len(v)} != ambient dim {s.ambient_dim}")
    if s.exact:
        out = [Fraction(0)] * s.ambient_dim
        v = [Fraction(x) for x in v]
    else:
        out = [0.0] * s.ambient_dim
    for b, g in zip(s.basis, s.gram):
        c = wdot(b, v, s.ambient_gram) / g
        for i in range(s.ambient_dim):
            out[i] += c * b[i]
    return tuple(out)


@dataclass(frozen=True)
class ReducedSpace:
    """The projection of span(states) onto span(effects)."""

    subspace: Subspace

    @property
    def dim(self) -> int:
        return self.subspace.rank

    @property
    def gram(self) -> tuple:
        return self.subspace.gram

    @property
    def exact(self) -> bool:
        return self.subspace.exact

    def to_reduced(self, v: Sequence) -> tuple:
        """Contravariant coordinates of the projection of v."""
        s = self.subspace
        return tuple(wdot(b, v, s.ambient_gram) / g
                     for b, g in zip(s.basis, s.gram))

    def to_ambient(self, coords: Sequence) -> tuple:
        s = self.subspace
        if s.exact:
            out = [Fraction(0)] * s.ambient_dim
        else:
            out = [0.0] * s.ambient_dim
        for c, b in zip(coords, s.basis):
            for i in range(s.ambient_dim):
                out[i] += c * b[i]
        return tuple(out)

    def inner(self, x: Sequence, y: Sequence):
        """Inner product of two elements given in contravariant coordinates."""
        return wdot(x, y, self.gram)


def reduced_space(state_gens: Sequence[Sequence], effect_gens: Sequence[Sequence],
                  rank_tol: float = DEFAULT.rank_tol,
                  ambient_gram: Optional[Sequence] = None,
                  exact: bool = False) -> ReducedSpace:
    effect_span = span_orthobasis(effect_gens, rank_tol, ambient_gram, exact)
    projected = [project(s, effect_span) for s in state_gens]
    sub = span_orthobasis(projected, rank_tol, ambient_gram, exact)
    return ReducedSpace(sub)


def swapped_reduced_space(state_gens: Sequence[Sequence], effect_gens: Sequence[Sequence],
                          rank_tol: float = DEFAULT.rank_tol,
                          ambient_gram: Optional[Sequence] = None,
                          exact: bool = False) -> ReducedSpace:
    """The alternative reduced space with the roles of states and effects swapped."""
    return reduced_space(effect_gens, state_gens, rank_tol, ambient_gram, exact)
