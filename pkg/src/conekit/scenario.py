"""Prepare-and-measure scenarios: quantum or GPT generator sets.

A scenario is a finite list of state generators and effect generators
(the convex sets they describe are their convex hulls), with effect
completion bookkeeping: every effect belongs to at least one group that
sums to the unit. Loading auto-inserts the zero and unit effects and
missing complements; every auto-insertion is recorded in ``notes``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Union

import numpy as np

from .config import DEFAULT, Tolerances
from .operators import (Matrix, gram_diag, raw_coords, validate_effect,
                        validate_state)
from .reduced import wdot


class ScenarioError(ValueError):
    pass


def _parse_number(x, want_exact: bool):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, bool):
        raise ScenarioError(f"boolean is not a number: {x!r}")
    if isinstance(x, int):
        return Fraction(x) if want_exact else float(x)
    if isinstance(x, float):
        if want_exact:
            raise ScenarioError("float entry in an exact-mode document")
        return x
    if isinstance(x, Fraction):
        return x if want_exact else float(x)
    raise ScenarioError(f"unsupported number: {x!r}")


def _doc_is_exact(doc: dict) -> bool:
    """Exact mode iff every numeric leaf is an int or a 'p/q' string."""

    def scan(node) -> bool:
        if isinstance(node, dict):
            return all(scan(v) for v in node.values())
        if isinstance(node, list):
            return all(scan(v) for v in node)
        if isinstance(node, float):
            return False
        return True

    keys = ("states", "povms", "extra_effects", "gpt_states", "gpt_effects",
            "gpt_unit")
    return all(scan(doc.get(k)) for k in keys if k in doc)


def _parse_matrix(entries, exact: bool, where: str) -> Matrix:
    try:
        re_rows = [[_parse_number(cell[0], exact) for cell in row] for row in entries]
        im_rows = [[_parse_number(cell[1], exact) for cell in row] for row in entries]
    except (TypeError, IndexError) as err:
        raise ScenarioError(f"{where}: malformed matrix entry ({err})")
    d = len(re_rows)
    for row in re_rows:
        if len(row) != d:
            raise ScenarioError(f"{where}: matrix is not square")
    return Matrix.from_parts(re_rows, im_rows, exact)


def serialize_matrix(m: Matrix) -> list:
    def num(x):
        if isinstance(x, Fraction):
            return str(x)
        return float(x)
    return [[[num(m.re[i, j]), num(m.im[i, j])] for j in range(m.dim)]
            for i in range(m.dim)]


def _ambient_coords(m: Matrix, gram) -> tuple:
    """Contravariant coordinates in the raw Gell-Mann chart."""
    raw = raw_coords(m)
    if m.exact:
        return tuple(Fraction(c) / g for c, g in zip(raw, gram))
    return tuple(float(c) / float(g) for c, g in zip(raw, gram))


@dataclass(frozen=True)
class Scenario:
    mode: str                         # "quantum" | "gpt"
    exact: bool
    space_dim: int                    # ambient coordinate dimension
    state_vectors: tuple              # contravariant ambient coords
    effect_vectors: tuple
    unit_vector: tuple
    unit_index: int
    zero_index: int
    povm_groups: tuple                # tuples of effect indices summing to unit
    ambient_gram: Optional[tuple]     # None means orthonormal chart
    hilbert_dim: Optional[int] = None
    state_matrices: tuple = ()
    effect_matrices: tuple = ()
    labels: dict = field(default_factory=dict)
    notes: tuple = ()

    @property
    def n_states(self) -> int:
        return len(self.state_vectors)

    @property
    def n_effects(self) -> int:
        return len(self.effect_vectors)

    def pair_probability(self, k: int, l: int):
        return wdot(self.state_vectors[k], self.effect_vectors[l],
                    self.ambient_gram)


def probability_table(sc: Scenario) -> np.ndarray:
    table = np.zeros((sc.n_states, sc.n_effects))
    for k in range(sc.n_states):
        for l in range(sc.n_effects):
            table[k, l] = float(sc.pair_probability(k, l))
    return table


# --- quantum construction ---------------------------------------------------

def _matrices_equal(a: Matrix, b: Matrix, tol: float) -> bool:
    if a.dim != b.dim:
        return False
    dr = np.abs(a.re.astype(float) - b.re.astype(float)).max()
    di = np.abs(a.im.astype(float) - b.im.astype(float)).max()
    return max(dr, di) <= tol


def quantum_scenario(states: Sequence[Matrix], povms: Sequence[Sequence[Matrix]],
                     extra_effects: Sequence[Matrix] = (),
                     labels: Optional[dict] = None,
                     tol: Tolerances = DEFAULT) -> Scenario:
    if not states:
        raise ScenarioError("a scenario needs at least one state")
    d = states[0].dim
    notes: List[str] = []
    for i, s in enumerate(states):
        if s.dim != d:
            raise ScenarioError(f"state {i}: dimension {s.dim} != {d}")
        rep = validate_state(s, tol)
        if not rep:
            raise ScenarioError(f"state {i}: " + "; ".join(rep.messages))

    exact = all(s.exact for s in states) and \
        all(e.exact for g in povms for e in g) and \
        all(e.exact for e in extra_effects)

    effects: List[Matrix] = []
    groups: List[List[int]] = []

    def add_effect(m: Matrix, where: str) -> int:
        rep = validate_effect(m, tol)
        if not rep:
            raise ScenarioError(f"{where}: " + "; ".join(rep.messages))
        for i, e in enumerate(effects):
            if _matrices_equal(e, m, tol.herm_tol):
                return i
        effects.append(m)
        return len(effects) - 1

    for gi, group in enumerate(povms):
        idxs = [add_effect(e, f"povm {gi} element {k}") for k, e in enumerate(group)]
        total = Matrix.zeros(d, exact)
        for e in group:
            total = total.add(e)
        ident = Matrix.identity(d, exact)
        defect = max(np.abs(total.re.astype(float) - ident.re.astype(float)).max(),
                     np.abs(total.im.astype(float)).max())
        if defect > tol.povm_tol:
            raise ScenarioError(f"povm {gi} does not sum to identity "
                                f"(defect {defect:.3e})")
        groups.append(idxs)

    ident = Matrix.identity(d, exact)
    zero = Matrix.zeros(d, exact)
    unit_index = next((i for i, e in enumerate(effects)
                       if _matrices_equal(e, ident, tol.herm_tol)), None)
    if unit_index is None:
        unit_index = add_effect(ident, "auto unit")
        notes.append("auto-inserted unit effect")
    zero_index = next((i for i, e in enumerate(effects)
                       if _matrices_equal(e, zero, tol.herm_tol)), None)
    if zero_index is None:
        zero_index = add_effect(zero, "auto zero")
        notes.append("auto-inserted zero effect")
    for auto in ([unit_index], [zero_index, unit_index]):
        if auto not in groups:
            groups.append(auto)

    for k, e in enumerate(extra_effects):
        idx = add_effect(e, f"extra effect {k}")
        if any(idx in g for g in groups):
            continue
        comp = ident.sub(e)
        rep = validate_effect(comp, tol)
        if not rep:
            raise ScenarioError(f"extra effect {k}: cannot complete to a POVM "
                                "(unit minus effect fails positivity: "
                                + "; ".join(rep.messages) + ")")
        cidx = add_effect(comp, f"auto complement of extra effect {k}")
        groups.append([idx, cidx])
        notes.append(f"auto-completed extra effect {k} with its complement "
                     "(coarse-graining augmentation)")

    grouped = set(i for g in groups for i in g)
    for i in range(len(effects)):
        if i not in grouped:
            raise ScenarioError(f"effect {i} belongs to no POVM group")

    gram = gram_diag(d, exact)
    state_vecs = tuple(_ambient_coords(s, gram) for s in states)
    effect_vecs = tuple(_ambient_coords(e, gram) for e in effects)
    ag = tuple(gram) if exact else None
    if not exact:
        # float chart is the orthonormal one: rescale contravariant coords
        scale = [math.sqrt(float(g)) for g in gram]
        state_vecs = tuple(tuple(c * s for c, s in zip(v, scale)) for v in state_vecs)
        effect_vecs = tuple(tuple(c * s for c, s in zip(v, scale)) for v in effect_vecs)

    return Scenario(
        mode="quantum", exact=exact, space_dim=d * d,
        state_vectors=state_vecs, effect_vectors=effect_vecs,
        unit_vector=effect_vecs[unit_index],
        unit_index=unit_index, zero_index=zero_index,
        povm_groups=tuple(tuple(g) for g in groups),
        ambient_gram=ag, hilbert_dim=d,
        state_matrices=tuple(states), effect_matrices=tuple(effects),
        labels=labels or {}, notes=tuple(notes),
    )


# --- GPT construction -------------------------------------------------------

def gpt_scenario(states: Sequence[Sequence], effects: Sequence[Sequence],
                 unit: Sequence, labels: Optional[dict] = None,
                 povm_groups: Optional[Sequence[Sequence[int]]] = None,
                 tol: Tolerances = DEFAULT) -> Scenario:
    if not states:
        raise ScenarioError("a scenario needs at least one state")
    n = len(unit)
    exact = all(isinstance(x, (int, Fraction)) for v in
                list(states) + list(effects) + [unit] for x in v)

    def vec(v):
        if exact:
            return tuple(Fraction(x) for x in v)
        return tuple(float(x) for x in v)

    unit_v = vec(unit)
    state_vecs = [vec(s) for s in states]
    effect_list: List[tuple] = []
    notes: List[str] = []

    def add_effect(v: tuple) -> int:
        for i, e in enumerate(effect_list):
            if exact and e == v:
                return i
            if not exact and max(abs(a - b) for a, b in zip(e, v)) <= tol.herm_tol:
                return i
        effect_list.append(v)
        return len(effect_list) - 1

    for e in effects:
        add_effect(vec(e))
    unit_index = add_effect(unit_v)
    zero_v = vec([0] * n)
    zero_index = add_effect(zero_v)
    if unit_index == len(effect_list) - 2 and unit_v not in [vec(e) for e in effects]:
        notes.append("auto-inserted unit effect")
    if zero_v not in [vec(e) for e in effects]:
        notes.append("auto-inserted zero effect")

    for k, s in enumerate(state_vecs):
        if len(s) != n:
            raise ScenarioError(f"gpt state {k}: dimension {len(s)} != {n}")
        p = wdot(s, unit_v)
        if abs(float(p) - 1.0) > tol.trace_tol:
            raise ScenarioError(f"gpt state {k}: <s, u> = {float(p):.6g} != 1")
    for l, e in enumerate(effect_list):
        if len(e) != n:
            raise ScenarioError(f"gpt effect {l}: dimension {len(e)} != {n}")
        for k, s in enumerate(state_vecs):
            p = float(wdot(s, e))
            if p < -tol.psd_tol or p > 1 + tol.psd_tol:
                raise ScenarioError(
                    f"gpt pair (state {k}, effect {l}): probability {p:.6g} "
                    "outside [0, 1]")

    groups: List[List[int]] = [list(g) for g in (povm_groups or [])]
    for auto in ([unit_index], [zero_index, unit_index]):
        if auto not in groups:
            groups.append(auto)
    for g in groups:
        total = [sum(effect_list[i][j] for i in g) for j in range(n)]
        defect = max(abs(float(a - b)) for a, b in zip(total, unit_v))
        if defect > tol.povm_tol:
            raise ScenarioError(f"gpt povm group {g} does not sum to the unit")
    grouped = set(i for g in groups for i in g)
    for i, e in enumerate(effect_list):
        if i in grouped:
            continue
        comp = tuple(u - x for u, x in zip(unit_v, e))
        for k, s in enumerate(state_vecs):
            p = float(wdot(s, comp))
            if p < -tol.psd_tol or p > 1 + tol.psd_tol:
                raise ScenarioError(f"gpt effect {i}: cannot complete to the unit")
        cidx = add_effect(comp)
        groups.append([i, cidx])
        grouped.update((i, cidx))
        notes.append(f"auto-completed gpt effect {i} with its complement")

    return Scenario(
        mode="gpt", exact=exact, space_dim=n,
        state_vectors=tuple(state_vecs), effect_vectors=tuple(effect_list),
        unit_vector=unit_v, unit_index=unit_index, zero_index=zero_index,
        povm_groups=tuple(tuple(g) for g in groups), ambient_gram=None,
        labels=labels or {}, notes=tuple(notes),
    )


# --- serialization ----------------------------------------------------------

def load_scenario(doc: Union[dict, str], tol: Tolerances = DEFAULT) -> Scenario:
    if isinstance(doc, str):
        doc = json.loads(doc)
    if not isinstance(doc, dict) or "mode" not in doc:
        raise ScenarioError("document must be an object with a 'mode' field")
    mode = doc["mode"]
    exact = _doc_is_exact(doc)
    labels = doc.get("labels") or {}
    if mode == "quantum":
        if "hilbert_dim" not in doc or "states" not in doc:
            raise ScenarioError("quantum document needs 'hilbert_dim' and 'states'")
        d = int(doc["hilbert_dim"])
        states = [_parse_matrix(m, exact, f"state {i}")
                  for i, m in enumerate(doc.get("states", []))]
        for i, s in enumerate(states):
            if s.dim != d:
                raise ScenarioError(f"state {i}: dim {s.dim} != hilbert_dim {d}")
        povms = [[_parse_matrix(m, exact, f"povm {gi} element {k}")
                  for k, m in enumerate(g)]
                 for gi, g in enumerate(doc.get("povms", []))]
        extra = [_parse_matrix(m, exact, f"extra effect {k}")
                 for k, m in enumerate(doc.get("extra_effects", []))]
        return quantum_scenario(states, povms, extra, labels, tol)
    if mode == "gpt":
        if "space_dim" not in doc or "gpt_unit" not in doc:
            raise ScenarioError("gpt document needs 'space_dim' and 'gpt_unit'")
        n = int(doc["space_dim"])
        unit = [_parse_number(x, exact) for x in doc["gpt_unit"]]
        if len(unit) != n:
            raise ScenarioError("gpt_unit length != space_dim")
        states = [[_parse_number(x, exact) for x in v]
                  for v in doc.get("gpt_states", [])]
        effects = [[_parse_number(x, exact) for x in v]
                   for v in doc.get("gpt_effects", [])]
        groups = doc.get("povm_groups")
        return gpt_scenario(states, effects, unit, labels,
                            povm_groups=groups, tol=tol)
    raise ScenarioError(f"unknown mode {mode!r}")


def serialize_scenario(sc: Scenario) -> dict:
    def num(x):
        if isinstance(x, Fraction):
            return str(x)
        return float(x)
    if sc.mode == "quantum":
        return {
            "mode": "quantum",
            "hilbert_dim": sc.hilbert_dim,
            "states": [serialize_matrix(m) for m in sc.state_matrices],
            "povms": [[serialize_matrix(sc.effect_matrices[i]) for i in g]
                      for g in sc.povm_groups],
            "labels": sc.labels,
        }
    return {
        "mode": "gpt",
        "space_dim": sc.space_dim,
        "gpt_states": [[num(x) for x in v] for v in sc.state_vectors],
        "gpt_effects": [[num(x) for x in v] for v in sc.effect_vectors],
        "gpt_unit": [num(x) for x in sc.unit_vector],
        "povm_groups": [list(g) for g in sc.povm_groups],
        "labels": sc.labels,
    }


def scenario_digest(sc: Scenario) -> str:
    blob = json.dumps(serialize_scenario(sc), sort_keys=True,
                      separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# --- transformations --------------------------------------------------------

def coarse_grain_augment(sc: Scenario, indices: Sequence[int],
                         tol: Tolerances = DEFAULT) -> Scenario:
    """Append the sum of the indicated effects (must stay below the unit)."""
    if not indices:
        return sc
    if sc.mode == "quantum":
        total = Matrix.zeros(sc.hilbert_dim, sc.exact)
        for i in indices:
            total = total.add(sc.effect_matrices[i])
        comp = Matrix.identity(sc.hilbert_dim, sc.exact).sub(total)
        rep = validate_effect(comp, tol)
        if not rep:
            raise ScenarioError("coarse graining exceeds the unit: "
                                + "; ".join(rep.messages))
        povms = [[sc.effect_matrices[i] for i in g] for g in sc.povm_groups
                 if g != (sc.unit_index,) and g != (sc.zero_index, sc.unit_index)]
        extra = [sc.effect_matrices[i] for i in range(sc.n_effects)] + [total]
        return quantum_scenario(list(sc.state_matrices), povms, extra,
                                sc.labels, tol)
    total = tuple(sum(sc.effect_vectors[i][j] for i in indices)
                  for j in range(sc.space_dim))
    comp = tuple(u - x for u, x in zip(sc.unit_vector, total))
    for k, s in enumerate(sc.state_vectors):
        p = float(wdot(s, comp))
        if p < -tol.psd_tol:
            raise ScenarioError("coarse graining exceeds the unit "
                                f"on state {k} (margin {p:.3g})")
    effects = list(sc.effect_vectors) + [total]
    groups = [list(g) for g in sc.povm_groups
              if tuple(g) != (sc.unit_index,)
              and tuple(g) != (sc.zero_index, sc.unit_index)]
    return gpt_scenario(list(sc.state_vectors), effects, sc.unit_vector,
                        sc.labels, povm_groups=None, tol=tol)


def ancilla_embed(sc: Scenario, ancilla_dim: int,
                  tol: Tolerances = DEFAULT) -> Scenario:
    """Tensor every state with a fixed pure ancilla and every effect with I."""
    if sc.mode != "quantum":
        raise ScenarioError("ancilla embedding requires a quantum scenario")
    if ancilla_dim < 1:
        raise ScenarioError("ancilla dimension must be >= 1")
    if ancilla_dim == 1:
        return sc
    phi = Matrix.zeros(ancilla_dim, sc.exact)
    phi.re[0, 0] = Fraction(1) if sc.exact else 1.0
    ident_anc = Matrix.identity(ancilla_dim, sc.exact)
    states = [s.kron(phi) for s in sc.state_matrices]
    povms = [[sc.effect_matrices[i].kron(ident_anc) for i in g]
             for g in sc.povm_groups
             if tuple(g) != (sc.unit_index,)
             and tuple(g) != (sc.zero_index, sc.unit_index)]
    extra = [sc.effect_matrices[i].kron(ident_anc) for i in range(sc.n_effects)]
    return quantum_scenario(states, povms, extra, sc.labels, tol)


def depolarize(sc: Scenario, eta, tol: Tolerances = DEFAULT) -> Scenario:
    """Replace every state by eta * rho + (1 - eta) * I/d."""
    if sc.mode != "quantum":
        raise ScenarioError("depolarization requires a quantum scenario")
    exact = sc.exact and isinstance(eta, (int, Fraction))
    d = sc.hilbert_dim
    if exact:
        eta = Fraction(eta)
        mixed = Matrix.identity(d, True).scale(Fraction(1, d))
    else:
        eta = float(eta)
        mixed = Matrix.identity(d, False).scale(1.0 / d)
    states = [s.scale(eta).add(mixed.scale(1 - eta)) for s in sc.state_matrices]
    povms = [[sc.effect_matrices[i] for i in g] for g in sc.povm_groups
             if tuple(g) != (sc.unit_index,)
             and tuple(g) != (sc.zero_index, sc.unit_index)]
    extra = list(sc.effect_matrices)
    labels = dict(sc.labels)
    labels["depolarized_eta"] = float(eta) * labels.get("depolarized_eta", 1.0)
    return quantum_scenario(states, povms, extra, labels, tol)


# --- builtin corpus ---------------------------------------------------------

def _fibonacci_sphere(n: int, seed: int = 0) -> List[tuple]:
    """Deterministic well-spread unit vectors on the 2-sphere."""
    golden = (1 + math.sqrt(5)) / 2
    pts = []
    offset = (seed * 0.618033988749895) % 1.0
    for i in range(n):
        z = 1 - 2 * (i + 0.5) / n
        r = math.sqrt(max(0.0, 1 - z * z))
        phi = 2 * math.pi * ((i / golden + offset) % 1.0)
        pts.append((r * math.cos(phi), r * math.sin(phi), z))
    return pts


def _bloch_state(nx, ny, nz, exact: bool) -> Matrix:
    if exact:
        h = Fraction(1, 2)
        re = [[h + h * Fraction(nz), h * Fraction(nx)],
              [h * Fraction(nx), h - h * Fraction(nz)]]
        im = [[0, -h * Fraction(ny)], [h * Fraction(ny), 0]]
        return Matrix.from_parts(re, im, True)
    re = [[(1 + nz) / 2, nx / 2], [nx / 2, (1 - nz) / 2]]
    im = [[0.0, -ny / 2], [ny / 2, 0.0]]
    return Matrix.from_parts(re, im, False)


def builtin_scenario(name: str, **params) -> Scenario:
    tol = params.pop("tol", DEFAULT)
    if name == "classical_simplex":
        d = int(params.pop("d", 2))
        _no_extra(name, params)
        if d < 2:
            raise ScenarioError("classical_simplex needs d >= 2")
        states, projs = [], []
        for k in range(d):
            m = Matrix.zeros(d, exact=True)
            m.re[k, k] = Fraction(1)
            states.append(m)
            projs.append(m)
        return quantum_scenario(states, [projs], labels={"name": name, "d": d},
                                tol=tol)
    if name == "qubit_six_state":
        _no_extra(name, params)
        axes = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
        states = [_bloch_state(*a, exact=True) for a in axes] + \
                 [_bloch_state(-a[0], -a[1], -a[2], exact=True) for a in axes]
        povms = [[_bloch_state(*a, exact=True),
                  _bloch_state(-a[0], -a[1], -a[2], exact=True)] for a in axes]
        return quantum_scenario(states, povms, labels={"name": name}, tol=tol)
    if name == "qubit_trine":
        _no_extra(name, params)
        angles = [2 * math.pi * k / 3 for k in range(3)]
        states = [_bloch_state(math.sin(t), 0.0, math.cos(t), exact=False)
                  for t in angles]
        povm = [s.scale(2.0 / 3.0) for s in states]
        return quantum_scenario(states, [povm], labels={"name": name}, tol=tol)
    if name == "qubit_full":
        ns = int(params.pop("n_state_rays", 12))
        ne = int(params.pop("n_effect_rays", 12))
        seed = int(params.pop("seed", 0))
        _no_extra(name, params)
        states = [_bloch_state(*n, exact=False) for n in _fibonacci_sphere(ns, seed)]
        povms = []
        for n in _fibonacci_sphere(ne, seed + 1):
            povms.append([_bloch_state(*n, exact=False),
                          _bloch_state(-n[0], -n[1], -n[2], exact=False)])
        return quantum_scenario(states, povms,
                                labels={"name": name, "ns": ns, "ne": ne}, tol=tol)
    if name == "gpt_square":
        _no_extra(name, params)
        h = Fraction(1, 2)
        states = [(1, x, y) for x in (1, -1) for y in (1, -1)]
        effects = [(h, h, 0), (h, -h, 0), (h, 0, h), (h, 0, -h)]
        groups = [[0, 1], [2, 3]]
        return gpt_scenario(states, effects, (1, 0, 0),
                            labels={"name": name}, povm_groups=groups, tol=tol)
    if name == "gpt_simplex":
        d = int(params.pop("d", 3))
        _no_extra(name, params)
        states = [tuple(int(i == k) for i in range(d)) for k in range(d)]
        effects = [tuple(int(i == k) for i in range(d)) for k in range(d)]
        groups = [list(range(d))]
        return gpt_scenario(states, effects, tuple([1] * d),
                            labels={"name": name, "d": d},
                            povm_groups=groups, tol=tol)
    if name == "depolarized":
        base = params.pop("base", None)
        eta = params.pop("eta", 1)
        _no_extra(name, params)
        if isinstance(base, str):
            base = builtin_scenario(base, tol=tol)
        if not isinstance(base, Scenario):
            raise ScenarioError("depolarized needs base=<scenario or name>")
        return depolarize(base, eta, tol)
    raise ScenarioError(f"unknown builtin scenario {name!r}")


def _no_extra(name: str, params: dict) -> None:
    if params:
        raise ScenarioError(f"{name}: unexpected parameters {sorted(params)}")
