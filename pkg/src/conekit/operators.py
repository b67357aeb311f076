"""Hermitian operators as real coordinate vectors.

Matrices are stored as separate real/imaginary parts so that exact
rational entries (fractions.Fraction) and floats go through the same
code. The coordinate chart is the generalized Gell-Mann family in a
fixed order: identity, symmetric off-diagonals, antisymmetric
off-diagonals, diagonals. Two scalings of the same chart are used:

* orthonormal (float): every basis element has Hilbert-Schmidt norm 1,
  so inner products are plain dot products;
* raw (exact-friendly): basis elements keep integer entries and are
  merely orthogonal, with a rational Gram diagonal. Inner products are
  dot products weighted by the inverse Gram diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .config import DEFAULT, Tolerances

Number = Union[int, float, Fraction]


class DimensionMismatch(ValueError):
    pass


class NotHermitian(ValueError):
    pass


@dataclass(frozen=True)
class Matrix:
    """A square matrix split into real and imaginary parts.

    ``exact`` means entries are Fractions (object dtype); otherwise
    float64.
    """

    dim: int
    re: np.ndarray
    im: np.ndarray
    exact: bool

    @staticmethod
    def from_complex(arr) -> "Matrix":
        a = np.asarray(arr, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("expected a square matrix")
        return Matrix(a.shape[0], np.ascontiguousarray(a.real),
                      np.ascontiguousarray(a.imag), exact=False)

    @staticmethod
    def from_parts(re_rows, im_rows, exact: bool) -> "Matrix":
        if exact:
            re = np.array([[Fraction(x) for x in row] for row in re_rows], dtype=object)
            im = np.array([[Fraction(x) for x in row] for row in im_rows], dtype=object)
        else:
            re = np.array(re_rows, dtype=float)
            im = np.array(im_rows, dtype=float)
        d = re.shape[0]
        if re.shape != (d, d) or im.shape != (d, d):
            raise ValueError("expected square real/imag parts of equal shape")
        return Matrix(d, re, im, exact)

    @staticmethod
    def zeros(dim: int, exact: bool = False) -> "Matrix":
        if exact:
            z = np.array([[Fraction(0)] * dim for _ in range(dim)], dtype=object)
            return Matrix(dim, z, z.copy(), True)
        z = np.zeros((dim, dim))
        return Matrix(dim, z, z.copy(), False)

    @staticmethod
    def identity(dim: int, exact: bool = False) -> "Matrix":
        m = Matrix.zeros(dim, exact)
        one = Fraction(1) if exact else 1.0
        for i in range(dim):
            m.re[i, i] = one
        return m

    def to_complex(self) -> np.ndarray:
        return self.re.astype(float) + 1j * self.im.astype(float)

    def add(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix(self.dim, self.re + other.re, self.im + other.im,
                      self.exact and other.exact)

    def sub(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix(self.dim, self.re - other.re, self.im - other.im,
                      self.exact and other.exact)

    def scale(self, c: Number) -> "Matrix":
        if self.exact and isinstance(c, (int, Fraction)):
            c = Fraction(c)
            return Matrix(self.dim, self.re * c, self.im * c, True)
        return Matrix(self.dim, self.re.astype(float) * float(c),
                      self.im.astype(float) * float(c), False)

    def kron(self, other: "Matrix") -> "Matrix":
        exact = self.exact and other.exact
        re = np.kron(self.re, other.re) - np.kron(self.im, other.im)
        im = np.kron(self.re, other.im) + np.kron(self.im, other.re)
        return Matrix(self.dim * other.dim, re, im, exact)

    def trace(self) -> Number:
        return sum(self.re[i, i] for i in range(self.dim))

    def herm_defect(self) -> float:
        """Largest entrywise deviation from M = M^dagger."""
        dr = np.abs(self.re.astype(float) - self.re.astype(float).T).max()
        di = np.abs(self.im.astype(float) + self.im.astype(float).T).max()
        return max(dr, di)

    def is_hermitian(self, tol: float = DEFAULT.herm_tol) -> bool:
        return self.herm_defect() <= tol

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.to_complex())

    def _check_same(self, other: "Matrix") -> None:
        if self.dim != other.dim:
            raise DimensionMismatch(f"matrix dims {self.dim} != {other.dim}")


@dataclass(frozen=True)
class OperatorVector:
    """Real coordinates of a Hermitian operator in an orthonormal basis."""

    space_dim: int
    coords: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float))
        if self.coords.shape != (self.space_dim,):
            raise DimensionMismatch(
                f"expected {self.space_dim} coordinates, got {self.coords.shape}")


def hs_inner(a: OperatorVector, b: OperatorVector) -> float:
    if a.space_dim != b.space_dim:
        raise DimensionMismatch(f"space dims {a.space_dim} != {b.space_dim}")
    return float(np.dot(a.coords, b.coords))


# --- Gell-Mann chart -------------------------------------------------------

def _index_pairs(d: int):
    return [(j, k) for j in range(d) for k in range(j + 1, d)]


def gram_diag(d: int, exact: bool = True) -> list:
    """Hilbert-Schmidt norms squared of the raw (integer-entry) basis."""
    make = Fraction if exact else float
    g = [make(d)]
    npairs = len(_index_pairs(d))
    g += [make(2)] * npairs          # symmetric family
    g += [make(2)] * npairs          # antisymmetric family
    g += [make(l * (l + 1)) for l in range(1, d)]   # diagonal family
    return g


def raw_basis_matrix(d: int, idx: int, exact: bool = False) -> Matrix:
    """The idx-th raw basis element (integer entries, unnormalized)."""
    pairs = _index_pairs(d)
    np_ = len(pairs)
    m = Matrix.zeros(d, exact)
    one = Fraction(1) if exact else 1.0
    if idx == 0:
        for i in range(d):
            m.re[i, i] = one
    elif idx <= np_:
        j, k = pairs[idx - 1]
        m.re[j, k] = one
        m.re[k, j] = one
    elif idx <= 2 * np_:
        j, k = pairs[idx - 1 - np_]
        m.im[j, k] = -one
        m.im[k, j] = one
    else:
        l = idx - 2 * np_
        for i in range(l):
            m.re[i, i] = one
        m.re[l, l] = -l * one
    return m


def raw_coords(m: Matrix) -> list:
    """Coordinates Tr[B_i m] against the raw basis. Rational in, rational out."""
    d = m.dim
    coords = [m.trace()]
    for j, k in _index_pairs(d):
        coords.append(m.re[j, k] + m.re[k, j])
    for j, k in _index_pairs(d):
        # Tr[(-i E_jk + i E_kj) m] = i(m_jk - m_kj)
        coords.append(m.im[k, j] - m.im[j, k])
    for l in range(1, d):
        coords.append(sum(m.re[i, i] for i in range(l)) - l * m.re[l, l])
    return coords


def from_raw_coords(coords: Sequence[Number], d: int, exact: bool = False) -> Matrix:
    g = gram_diag(d, exact)
    out = Matrix.zeros(d, exact)
    for i, c in enumerate(coords):
        if (not exact and c == 0.0) or (exact and c == 0):
            continue
        b = raw_basis_matrix(d, i, exact)
        w = Fraction(c) / g[i] if exact else float(c) / float(g[i])
        out = out.add(b.scale(w))
    return out


@dataclass(frozen=True)
class HermBasis:
    """Orthonormal Gell-Mann basis for Herm(H), hilbert_dim x hilbert_dim."""

    hilbert_dim: int
    matrices: list = field(repr=False)

    @property
    def space_dim(self) -> int:
        return self.hilbert_dim ** 2


def hermitian_basis(d: int) -> HermBasis:
    if d < 1:
        raise ValueError("Hilbert dimension must be >= 1")
    g = gram_diag(d, exact=False)
    mats = []
    for i in range(d * d):
        b = raw_basis_matrix(d, i, exact=False)
        mats.append(b.to_complex() / math.sqrt(g[i]))
    return HermBasis(d, mats)


def to_coords(m: Matrix, basis: Optional[HermBasis] = None,
              tol: Tolerances = DEFAULT, label: Optional[str] = None) -> OperatorVector:
    """Orthonormal-basis coordinates of a Hermitian matrix."""
    if basis is not None and basis.hilbert_dim != m.dim:
        raise DimensionMismatch(
            f"matrix dim {m.dim} != basis dim {basis.hilbert_dim}")
    defect = m.herm_defect()
    if defect > tol.herm_tol:
        raise NotHermitian(f"Hermiticity defect {defect:.3e} exceeds {tol.herm_tol}")
    g = gram_diag(m.dim, exact=False)
    raw = [float(c) for c in raw_coords(m)]
    coords = np.array([c / math.sqrt(gi) for c, gi in zip(raw, g)])
    return OperatorVector(m.dim ** 2, coords, label)


def from_coords(v: OperatorVector, d: int) -> Matrix:
    g = gram_diag(d, exact=False)
    raw = [c * math.sqrt(gi) for c, gi in zip(v.coords, g)]
    return from_raw_coords(raw, d, exact=False)


# --- Validation ------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    messages: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def validate_state(m: Matrix, tol: Tolerances = DEFAULT) -> ValidationReport:
    """Positive semi-definite, trace one, Hermitian."""
    msgs = []
    defect = m.herm_defect()
    if defect > tol.herm_tol:
        return ValidationReport(False, (f"not Hermitian (defect {defect:.3e})",))
    evs = m.eigvalsh()
    if evs.min() < -tol.psd_tol:
        msgs.append(f"negative eigenvalue {evs.min():.6g}")
    tr = float(m.trace())
    if abs(tr - 1.0) > tol.trace_tol:
        msgs.append(f"trace {tr:.6g} deviates from 1 by {abs(tr - 1.0):.3e}")
    return ValidationReport(not msgs, tuple(msgs))


def validate_effect(m: Matrix, tol: Tolerances = DEFAULT) -> ValidationReport:
    """0 <= E <= I, Hermitian."""
    msgs = []
    defect = m.herm_defect()
    if defect > tol.herm_tol:
        return ValidationReport(False, (f"not Hermitian (defect {defect:.3e})",))
    evs = m.eigvalsh()
    if evs.min() < -tol.psd_tol:
        msgs.append(f"E has negative eigenvalue {evs.min():.6g}")
    comp = Matrix.identity(m.dim, m.exact).sub(m)
    evs_c = comp.eigvalsh()
    if evs_c.min() < -tol.psd_tol:
        msgs.append(f"I-E has negative eigenvalue {evs_c.min():.6g}")
    return ValidationReport(not msgs, tuple(msgs))
