"""Unit-separability decision and classical-model extraction.

The scenario is classical exactly when the identity's tensor
representative J lies in the separable cone generated by products of
the two polar cones. The decision runs as a conic membership linear
program over the product generators; infeasibility yields a Farkas
functional that is already a non-classicality witness (nonnegative on
every generator, strictly negative on J). The full witness set — the
extremal rays of the polar of the separable cone — is enumerated on
demand, since its size can grow quickly with dim(R).

Coordinate conventions (see ``reduced``): elements of R carry
contravariant coordinates in an orthogonal basis with Gram diagonal g;
functionals carry dual coordinates (contravariant times g), so every
pairing is a plain dot product and the exact path stays rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT, Tolerances, max_tensor_dim
from .cones import (ConePreconditionError, ConeV, NotPointedReport, Ray,
                    cone_from_rays, conic_combination, is_pointed, is_spanning,
                    membership, null_vector_exact, null_vector_float,
                    vertex_enumeration)
from .reduced import ReducedSpace, reduced_space, wdot
from .scenario import Scenario


class ResourceGuardError(RuntimeError):
    """dim(R)^2 exceeds the configured tensor-dimension cap."""


@dataclass(frozen=True)
class SepSetup:
    """Everything classify needs, precomputed once per scenario."""

    scenario: Scenario
    swap: bool
    exact: bool
    reduced: ReducedSpace
    state_cone: ConeV            # canonical cone over reduced states
    effect_cone: ConeV           # canonical cone over reduced effects
    state_polar: ConeV           # functionals nonnegative on the states
    effect_polar: ConeV          # functionals nonnegative on the effects
    products: tuple              # sigma_i (x) F_j in contravariant coords
    product_pairs: tuple         # (i into effect_polar, j into state_polar)
    choi: tuple                  # J(id_R), contravariant coordinates
    unit_reduced: tuple          # reduced unit effect, contravariant

    @property
    def dim(self) -> int:
        return self.reduced.dim

    @property
    def tensor_dim(self) -> int:
        return self.reduced.dim ** 2

    def tensor_gram(self) -> tuple:
        g = self.reduced.gram
        return tuple(gk * gl for gk in g for gl in g)


def _dualize(vec: Sequence, gram: Sequence) -> tuple:
    """Contravariant -> dual coordinates (multiply by the Gram diagonal)."""
    return tuple(x * g for x, g in zip(vec, gram))


def _contra(vec: Sequence, gram: Sequence) -> tuple:
    """Dual -> contravariant coordinates (divide by the Gram diagonal)."""
    return tuple(x / g for x, g in zip(vec, gram))


def build_setup(sc: Scenario, swap: bool = False,
                tol: Tolerances = DEFAULT) -> SepSetup:
    states, effects = sc.state_vectors, sc.effect_vectors
    if swap:
        states, effects = effects, states
    rs = reduced_space(states, effects, tol.rank_tol, sc.ambient_gram, sc.exact)
    if rs.dim == 0:
        raise ConePreconditionError("reduced space is zero-dimensional")
    guard = max_tensor_dim()
    if rs.dim ** 2 > guard:
        raise ResourceGuardError(
            f"dim(R)^2 = {rs.dim ** 2} exceeds the cap {guard} "
            "(set CONEKIT_MAX_TENSOR_DIM to override)")

    red_states = [rs.to_reduced(v) for v in states]
    red_effects = [rs.to_reduced(v) for v in effects]
    cone_s = cone_from_rays(red_states, exact=sc.exact, tol=tol)
    cone_e = cone_from_rays(red_effects, exact=sc.exact, tol=tol)
    for name, c in (("state", cone_s), ("effect", cone_e)):
        if not c.rays:
            raise ConePreconditionError(f"reduced {name} cone is empty")
        if not is_spanning(c):
            raise ConePreconditionError(
                f"reduced {name} cone does not span the reduced space")
        rep = is_pointed(c, tol)
        if isinstance(rep, NotPointedReport):
            raise ConePreconditionError(
                f"reduced {name} cone is not pointed "
                f"(lineality via ray {rep.ray_index})")

    pol_s = vertex_enumeration(cone_s, tol)
    pol_e = vertex_enumeration(cone_e, tol)

    g = rs.gram
    d = rs.dim
    # products sigma (x) F: sigma from the effect polar (epistemic states),
    # F from the state polar (response functionals); stored contravariantly.
    products: List[tuple] = []
    pairs: List[Tuple[int, int]] = []
    for i, sig in enumerate(pol_e.rays):
        sc_c = _contra(sig.coords, g)
        for j, eff in enumerate(pol_s.rays):
            fc = _contra(eff.coords, g)
            products.append(tuple(a * b for a in sc_c for b in fc))
            pairs.append((i, j))

    if sc.exact:
        choi = tuple(Fraction(1, 1) / g[k] if k == l else Fraction(0)
                     for k in range(d) for l in range(d))
    else:
        choi = tuple(1.0 / g[k] if k == l else 0.0
                     for k in range(d) for l in range(d))
    unit_reduced = rs.to_reduced(sc.unit_vector)
    return SepSetup(sc, swap, sc.exact, rs, cone_s, cone_e, pol_s, pol_e,
                    tuple(products), tuple(pairs), choi, unit_reduced)


# --- witnesses ---------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    """A functional on R (x) R, nonnegative on every separable generator."""

    coords: tuple               # dual coordinates on the tensor space
    value: object               # pairing with J(id_R)
    norm: float                 # metric norm, for normalized reporting
    extremal: bool              # True when it came out of vertex enumeration

    def normalized_value(self) -> float:
        return float(self.value) / self.norm if self.norm else float(self.value)


def _witness_norm(coords: Sequence, gram2: Sequence) -> float:
    return math.sqrt(sum(float(w) ** 2 / float(g)
                         for w, g in zip(coords, gram2)))


def witness_set(setup: SepSetup, tol: Tolerances = DEFAULT) -> List[Witness]:
    """All extremal rays of the polar of the separable cone.

    Exponential in bad cases; classify only calls this on demand.
    """
    sep = cone_from_rays(setup.products, exact=setup.exact, tol=tol)
    polar = vertex_enumeration(sep, tol)
    gram2 = setup.tensor_gram()
    out = []
    for r in polar.rays:
        val = wdot(setup.choi, r.coords)
        out.append(Witness(r.coords, val, _witness_norm(r.coords, gram2), True))
    out.sort(key=lambda w: (float(w.normalized_value()), w.coords))
    return out


def check_witness(setup: SepSetup, coords: Sequence,
                  tol: Tolerances = DEFAULT) -> dict:
    """Standalone soundness check: polar positivity plus violation on J."""
    coords = tuple(coords)
    slack = min(float(wdot(coords, p)) for p in setup.products)
    value = wdot(setup.choi, coords)
    norm = _witness_norm(coords, setup.tensor_gram())
    ok = slack >= -tol.polar_tol and float(value) < 0
    return {"ok": ok, "min_generator_pairing": slack,
            "value": float(value), "norm": norm}


# --- classical models --------------------------------------------------------

@dataclass(frozen=True)
class ClassicalModel:
    """An explicit ontic decomposition id_R = sum_i |sigma_i><F_i|.

    ``sigmas`` are normalized epistemic states (unit pairing with the
    reduced unit effect) and ``effect_funcs`` the matching response
    functionals, both in dual coordinates on R.
    """

    sigmas: tuple               # dual coords, one per ontic state
    effect_funcs: tuple         # dual coords, one per ontic state
    exact: bool

    @property
    def cardinality(self) -> int:
        return len(self.sigmas)


def _active_caratheodory(products: Sequence[tuple], theta: List, exact: bool,
                         eps: float) -> List:
    """Prune a conic decomposition down to linearly independent support."""
    zero = Fraction(0) if exact else 0.0
    while True:
        active = [i for i, t in enumerate(theta) if (t > 0 if exact else t > eps)]
        if not active:
            break
        # coefficients alpha with sum_k alpha_k * product_k = 0
        cols = list(zip(*[products[i] for i in active]))
        alpha = (null_vector_exact(cols) if exact
                 else null_vector_float(cols, max(eps, 1e-12)))
        if alpha is None:
            break
        if all(a <= 0 for a in alpha):
            alpha = [-a for a in alpha]
        best_t, best_k = None, None
        for k, a in enumerate(alpha):
            if (a > 0 if exact else a > eps):
                ratio = theta[active[k]] / a
                if best_t is None or ratio < best_t:
                    best_t, best_k = ratio, k
        if best_t is None:
            break
        for k, a in enumerate(alpha):
            theta[active[k]] = theta[active[k]] - best_t * a
        theta[active[best_k]] = zero
        if not exact:
            for i in active:
                if abs(theta[i]) <= eps:
                    theta[i] = 0.0
    return theta


def _product_cone(setup: SepSetup) -> ConeV:
    """The separable cone with ray order matching ``setup.products``."""
    return ConeV(setup.tensor_dim,
                 tuple(Ray(tuple(p), canonical=False) for p in setup.products),
                 setup.exact)


def extract_model(setup: SepSetup, tol: Tolerances = DEFAULT) -> ClassicalModel:
    res = conic_combination(setup.choi, _product_cone(setup), tol,
                            minimize_sum=True)
    if res is None:
        raise ValueError("choi operator is not separable; no model exists")
    theta = list(res)
    eps = 0.0 if setup.exact else 1e-10
    theta = _active_caratheodory(setup.products, theta, setup.exact, eps)

    g = setup.reduced.gram
    u = setup.unit_reduced             # contravariant
    sigmas, funcs = [], []
    for idx, t in enumerate(theta):
        if not (t > 0 if setup.exact else t > eps):
            continue
        i, j = setup.product_pairs[idx]
        sig = setup.effect_polar.rays[i].coords      # dual coords
        eff = setup.state_polar.rays[j].coords
        # normalize sigma against the unit effect; fold the rest into F
        tr = wdot(_contra(sig, g), u, g)             # = <sigma, u>
        if (tr == 0 if setup.exact else abs(float(tr)) <= tol.recon_tol):
            raise ValueError("degenerate ontic state with zero unit pairing")
        sigmas.append(tuple(x / tr for x in sig))
        funcs.append(tuple(x * t * tr for x in eff))
    return ClassicalModel(tuple(sigmas), tuple(funcs), setup.exact)


def evaluate_model(setup: SepSetup, model: ClassicalModel,
                   tol: Tolerances = DEFAULT) -> dict:
    """Check a model reproduces the scenario and is a valid ontic table."""
    sc, rs = setup.scenario, setup.reduced
    g = rs.gram
    states, effects = sc.state_vectors, sc.effect_vectors
    if setup.swap:
        states, effects = effects, states
    red_states = [rs.to_reduced(v) for v in states]
    red_effects = [rs.to_reduced(v) for v in effects]

    max_tab_err = 0.0
    min_mu = min_xi = float("inf")
    max_xi = -float("inf")
    max_norm_err = 0.0
    for k, s in enumerate(red_states):
        mus = [float(wdot(f, s)) for f in model.effect_funcs]
        min_mu = min(min_mu, *mus)
        max_norm_err = max(max_norm_err, abs(sum(mus) - 1.0))
        for l, e in enumerate(red_effects):
            xis = [float(wdot(sig, e)) for sig in model.sigmas]
            p = sum(m * x for m, x in zip(mus, xis))
            truth = float(wdot(s, e, g))
            max_tab_err = max(max_tab_err, abs(p - truth))
    for sig in model.sigmas:
        for e in red_effects:
            x = float(wdot(sig, e))
            min_xi = min(min_xi, x)
            max_xi = max(max_xi, x)
    ok = (max_tab_err <= tol.recon_tol and min_mu >= -tol.recon_tol
          and min_xi >= -tol.recon_tol and max_xi <= 1 + tol.recon_tol
          and max_norm_err <= tol.recon_tol)
    return {"ok": ok, "cardinality": model.cardinality,
            "table_error": max_tab_err, "min_response": min_mu,
            "response_norm_error": max_norm_err,
            "min_effect_prob": min_xi, "max_effect_prob": max_xi}


# --- verdicts ----------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    kind: str                               # Classical | NonClassical
    setup: SepSetup = field(repr=False)
    model: Optional[ClassicalModel] = None
    witness: Optional[Witness] = None
    violation: Optional[float] = None       # normalized <J, Gamma>
    boundary_near: bool = False
    witness_count: Optional[int] = None

    @property
    def dim_reduced(self) -> int:
        return self.setup.dim

    def stats(self) -> dict:
        s = self.setup
        return {
            "dim_R": s.dim,
            "state_rays": len(s.state_cone.rays),
            "effect_rays": len(s.effect_cone.rays),
            "state_polar_rays": len(s.state_polar.rays),
            "effect_polar_rays": len(s.effect_polar.rays),
            "sep_generators": len(s.products),
        }


def classify(sc: Scenario, swap: bool = False, tol: Tolerances = DEFAULT,
             with_model: bool = True, with_witnesses: bool = False) -> Verdict:
    """Decide classicality of a scenario.

    The verdict comes from a membership linear program of J against the
    separable generators; its Farkas certificate doubles as a witness.
    ``with_witnesses`` additionally enumerates the full witness set
    (needed for margins and witness counts, exponential in bad cases).
    """
    setup = build_setup(sc, swap, tol)
    return classify_setup(setup, tol, with_model, with_witnesses)


def classify_setup(setup: SepSetup, tol: Tolerances = DEFAULT,
                   with_model: bool = True,
                   with_witnesses: bool = False) -> Verdict:
    ok, certificate = membership(setup.choi, _product_cone(setup), tol)
    gram2 = setup.tensor_gram()

    wits = witness_set(setup, tol) if with_witnesses else None
    count = len(wits) if wits is not None else None

    if ok:
        model = extract_model(setup, tol) if with_model else None
        boundary = False
        if wits:
            margin = wits[0].normalized_value()
            boundary = (not setup.exact) and margin < tol.margin_tol
        return Verdict("Classical", setup, model=model,
                       boundary_near=boundary, witness_count=count)

    if wits:
        wit = wits[0]        # most negative normalized pairing, extremal
    else:
        coords = tuple(certificate)
        wit = Witness(coords, wdot(setup.choi, coords),
                      _witness_norm(coords, gram2), False)
    violation = wit.normalized_value()
    boundary = (not setup.exact) and violation > -tol.verdict_tol
    return Verdict("NonClassical", setup, witness=wit, violation=violation,
                   boundary_near=boundary, witness_count=count)


# --- serialization -----------------------------------------------------------

def _num(x):
    if isinstance(x, Fraction):
        return str(x)
    return float(x)


def model_to_json(model: ClassicalModel) -> dict:
    return {
        "cardinality": model.cardinality,
        "sigma": [[_num(x) for x in s] for s in model.sigmas],
        "F": [[_num(x) for x in f] for f in model.effect_funcs],
        "exact": model.exact,
    }


def witness_to_json(w: Witness) -> dict:
    return {
        "coords": [_num(x) for x in w.coords],
        "value": float(w.value),
        "norm": w.norm,
        "normalized_value": w.normalized_value(),
        "extremal": w.extremal,
    }


def verdict_to_json(v: Verdict) -> dict:
    out = {"verdict": v.kind, "dim_R": v.dim_reduced,
           "boundary_near": v.boundary_near, "stats": v.stats(),
           "swap": v.setup.swap, "exact": v.setup.exact}
    if v.witness_count is not None:
        out["witness_count"] = v.witness_count
    if v.model is not None:
        out["model"] = model_to_json(v.model)
    if v.witness is not None:
        out["witness"] = witness_to_json(v.witness)
        out["violation"] = float(v.violation)
    return out
