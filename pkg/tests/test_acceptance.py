"""Acceptance gate: ten criteria, one test (and one PASS line) each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines alongside the pytest verdicts.  Every criterion carries its stated
tolerance and runtime budget as hard assertions.
"""

import json
import random
import time
from fractions import Fraction
from functools import lru_cache

import numpy as np

from conekit.cli import main as cli_main
from conekit.cones import (PositivityFunctional, cone_from_rays,
                           double_polar_check, cone_from_rays as _cfr,
                           is_pointed, is_spanning, membership,
                           vertex_enumeration)
from conekit.operators import Matrix
from conekit.oracle import brute_force_polar_rays, oracle_classify
from conekit.reduced import reduced_space
from conekit.scenario import (ancilla_embed, builtin_scenario,
                              coarse_grain_augment, depolarize,
                              quantum_scenario)
from conekit.sep import (build_setup, check_witness, classify, evaluate_model,
                         witness_set)

CORPUS = [
    ("classical_simplex", {"d": 2}),
    ("classical_simplex", {"d": 3}),
    ("classical_simplex", {"d": 4}),
    ("gpt_simplex", {"d": 3}),
    ("gpt_square", {}),
    ("qubit_six_state", {}),
    ("qubit_trine", {}),
]

ETAS = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4),
        Fraction(1)]


def _corpus_scenarios():
    out = [(f"{name}:{kw}", builtin_scenario(name, **kw))
           for name, kw in CORPUS]
    six = builtin_scenario("qubit_six_state")
    out += [(f"depolarized(six_state, {eta})", depolarize(six, eta))
            for eta in ETAS]
    return out


def _ok(num, desc):
    print(f"[PASS] criterion {num}: {desc}")


# --- criterion 1: reduced-scalar invariance ----------------------------------

def _random_density(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = a @ a.conj().T
    m /= np.trace(m).real
    return Matrix.from_complex(m)


def _random_povm(rng, d, k):
    blocks = []
    for _ in range(k):
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        blocks.append(a @ a.conj().T)
    total = sum(blocks)
    w, v = np.linalg.eigh(total)
    inv_sqrt = v @ np.diag(1.0 / np.sqrt(w)) @ v.conj().T
    return [Matrix.from_complex(inv_sqrt @ b @ inv_sqrt) for b in blocks]


def test_criterion_01_reduced_scalar_invariance():
    start = time.monotonic()
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(50):
        d = int(rng.integers(2, 4))
        states = [_random_density(rng, d)
                  for _ in range(int(rng.integers(1, 5)))]
        povm = _random_povm(rng, d, int(rng.integers(2, 4)))
        sc = quantum_scenario(states, [povm])
        rs = reduced_space(sc.state_vectors, sc.effect_vectors,
                           ambient_gram=sc.ambient_gram, exact=sc.exact)
        for sv in sc.state_vectors:
            rsv = rs.to_reduced(sv)
            for k in range(sc.n_effects):
                ambient = float(sc.pair_probability(
                    sc.state_vectors.index(sv), k))
                red = float(rs.inner(rsv, rs.to_reduced(sc.effect_vectors[k])))
                worst = max(worst, abs(ambient - red))
    elapsed = time.monotonic() - start
    assert worst <= 1e-9, worst
    assert elapsed < 10.0, elapsed
    _ok(1, f"reduced-scalar invariance, max deviation {worst:.2e} "
           f"on 50 random scenarios in {elapsed:.1f}s")


# --- criteria 2 and 3: shared random cone batch -------------------------------

def _good_cone(rng, d, n):
    while True:
        rays = [tuple(rng.randint(-3, 3) for _ in range(d)) for _ in range(n)]
        c = cone_from_rays(rays, exact=True)
        if c.rays and is_spanning(c) and \
                isinstance(is_pointed(c), PositivityFunctional):
            return c


@lru_cache(maxsize=1)
def _random_cone_batch():
    rng = random.Random(2024)
    cones = []
    while len(cones) < 200:
        d = rng.randint(2, 5)
        cones.append(_good_cone(rng, d, rng.randint(d, 12)))
    return tuple(cones)


def test_criterion_02_vertex_enumeration_matches_oracle():
    start = time.monotonic()
    for c in _random_cone_batch():
        d = c.ambient_dim
        dd = sorted(tuple(map(Fraction, r.coords))
                    for r in vertex_enumeration(c).rays)
        bf = sorted(tuple(map(Fraction, r))
                    for r in brute_force_polar_rays(c.ray_vectors(), d))
        assert dd == bf, (c.ray_vectors(), dd, bf)
    elapsed = time.monotonic() - start
    assert elapsed < 60.0, elapsed
    _ok(2, f"vertex enumeration set-equals the brute-force oracle on "
           f"200 random cones in {elapsed:.1f}s")


def test_criterion_03_double_polar_identity():
    failures = [c.ray_vectors() for c in _random_cone_batch()
                if not double_polar_check(c)]
    assert failures == []
    _ok(3, "double-polar identity holds on the same 200 cones, 0 failures")


# --- criterion 4: classical simplex corpus ------------------------------------

def test_criterion_04_classical_simplex_models():
    start = time.monotonic()
    for d in (2, 3, 4):
        v = classify(builtin_scenario("classical_simplex", d=d))
        assert v.kind == "Classical"
        assert v.dim_reduced == d
        assert v.model.cardinality == d
        rep = evaluate_model(v.setup, v.model)
        assert rep["ok"] and rep["table_error"] <= 1e-9, rep
    elapsed = time.monotonic() - start
    assert elapsed < 30.0, elapsed
    _ok(4, f"classical_simplex d=2,3,4: Classical, table error <= 1e-9, "
           f"cardinality = d = dim(R) in {elapsed:.1f}s")


# --- criterion 5: cardinality bounds -------------------------------------------

def test_criterion_05_cardinality_bounds_on_corpus():
    checked = 0
    for label, sc in _corpus_scenarios():
        v = classify(sc)
        if v.kind != "Classical":
            continue
        n = v.model.cardinality
        d = v.dim_reduced
        assert d <= n <= d * d, (label, d, n)
        checked += 1
    assert checked >= 8
    _ok(5, f"dim(R) <= cardinality <= dim(R)^2 on all {checked} "
           "Classical corpus verdicts")


# --- criterion 6: invariance suite ---------------------------------------------

def _polar_signature(sc):
    setup = build_setup(sc)
    return (setup.dim,
            tuple(r.coords for r in setup.state_polar.rays),
            tuple(r.coords for r in setup.effect_polar.rays))


def test_criterion_06_invariance_suite():
    start = time.monotonic()

    # coarse-graining augmentation: dim(R) and polar ray sets bit-identical
    for name, kw in CORPUS:
        sc = builtin_scenario(name, **kw)
        if sc.mode != "quantum":
            continue
        group = next(g for g in sc.povm_groups if len(g) >= 2)
        aug = coarse_grain_augment(sc, list(group[:2]))
        assert _polar_signature(sc) == _polar_signature(aug), name

    # ancilla embedding preserves verdict kind and dim(R)
    for name, kw in [("classical_simplex", {"d": 3}),
                     ("qubit_six_state", {})]:
        sc = builtin_scenario(name, **kw)
        base = classify(sc, with_model=False)
        for adim in (2, 3):
            emb = classify(ancilla_embed(sc, adim), with_model=False)
            assert emb.kind == base.kind, (name, adim)
            assert emb.dim_reduced == base.dim_reduced, (name, adim)

    # swapped reduced space: identical verdicts everywhere, equal witness
    # counts where enumeration is tractable
    tractable = {("classical_simplex", 2), ("classical_simplex", 3),
                 ("gpt_simplex", 3), ("gpt_square", None),
                 ("qubit_trine", None)}
    for label, sc in _corpus_scenarios():
        a = classify(sc, swap=False, with_model=False)
        b = classify(sc, swap=True, with_model=False)
        assert a.kind == b.kind, label
        assert a.dim_reduced == b.dim_reduced, label
    for name, kw in CORPUS:
        if (name, kw.get("d")) not in tractable:
            continue
        sc = builtin_scenario(name, **kw)
        na = len(witness_set(build_setup(sc, swap=False)))
        nb = len(witness_set(build_setup(sc, swap=True)))
        assert na == nb, (name, na, nb)

    elapsed = time.monotonic() - start
    assert elapsed < 120.0, elapsed
    _ok(6, f"coarse-grain/ancilla/swap invariances hold across the corpus "
           f"in {elapsed:.1f}s")


# --- criterion 7: main vs oracle, depolarization sweep --------------------------

def test_criterion_07_classify_matches_oracle():
    start = time.monotonic()
    for label, sc in _corpus_scenarios():
        v = classify(sc, with_model=False)
        if v.dim_reduced > 4:
            continue
        rep = oracle_classify(sc)
        assert rep.verdict == v.kind, label
        assert rep.dim_reduced == v.dim_reduced, label

    # depolarization sweep: verdict monotone in eta, cones conically nested
    six = builtin_scenario("qubit_six_state")
    sweep = [(eta, classify(depolarize(six, eta), with_model=False).kind)
             for eta in ETAS]
    seen_nonclassical = False
    for eta, kind in reversed(sweep):          # decreasing eta
        if kind == "NonClassical":
            seen_nonclassical = True
        else:
            assert not seen_nonclassical or kind == "NonClassical", sweep
    for (e1, _), (e2, _) in zip(sweep, sweep[1:]):     # e1 < e2
        small = depolarize(six, e1)
        big = cone_from_rays(depolarize(six, e2).state_vectors, exact=True)
        for vec in small.state_vectors:
            ok, _ = membership(vec, big)
            assert ok, (e1, e2)

    elapsed = time.monotonic() - start
    assert elapsed < 300.0, elapsed
    _ok(7, f"classify agrees with the oracle on the corpus and the "
           f"depolarization sweep is monotone/nested in {elapsed:.1f}s")


# --- criterion 8: witness soundness and mutation rejection ----------------------

def test_criterion_08_witness_soundness(tmp_path, capsys):
    v = classify(builtin_scenario("gpt_square"), with_witnesses=True)
    assert v.kind == "NonClassical"
    coords = v.witness.coords
    from conekit.reduced import wdot
    assert min(float(wdot(coords, p)) for p in v.setup.products) >= -1e-8
    assert float(wdot(coords, v.setup.choi)) < 0
    assert check_witness(v.setup, coords)["ok"]

    art = tmp_path / "wit.json"
    assert cli_main(["witness", "builtin:gpt_square",
                     "--out", str(art)]) == 1
    assert cli_main(["verify", str(art), "builtin:gpt_square"]) == 0

    doc = json.loads(art.read_text())
    wc = doc["witness"]["coords"]         # numbers, or "p/q" strings in exact mode

    def num(x):
        return Fraction(x) if isinstance(x, str) else x

    def ser(x, template):
        return str(x) if isinstance(template, str) else x

    def mutate(new_coords, fname):
        mut = json.loads(art.read_text())
        mut["witness"]["coords"] = new_coords
        f = tmp_path / fname
        f.write_text(json.dumps(mut))
        return cli_main(["verify", str(f), "builtin:gpt_square"])

    assert mutate([ser(-num(x), x) for x in wc], "flip.json") == 1
    k = max(range(len(wc)), key=lambda i: abs(float(num(wc[i]))))
    scaled = list(wc)
    scaled[k] = ser(-5 * num(wc[k]), wc[k])
    assert mutate(scaled, "scale.json") == 1
    capsys.readouterr()
    _ok(8, "emitted witness verifies; sign-flip and component-scaling "
           "mutations are rejected")


# --- criterion 9: entanglement recast -------------------------------------------

def test_criterion_09_bell_state_witnessed():
    from conekit.approx import _pauli_coords, entanglement_check
    start = time.monotonic()
    bell = np.zeros((4, 4), dtype=complex)
    bell[0, 0] = bell[0, 3] = bell[3, 0] = bell[3, 3] = 0.5
    v = entanglement_check(bell, max_level=3, seed=0)
    assert v.kind == "WitnessedNonClassical" and v.level <= 3
    direct = float(np.sum(_pauli_coords(bell) * v.witness))
    assert direct < 0

    rng = np.random.default_rng(7)
    n = 100_000
    a = rng.normal(size=(n, 3))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    b = rng.normal(size=(n, 3))
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    pa = np.hstack([np.ones((n, 1)), a]) / np.sqrt(2)
    pb = np.hstack([np.ones((n, 1)), b]) / np.sqrt(2)
    vals = np.einsum("ni,ij,nj->n", pa, v.witness, pb)
    elapsed = time.monotonic() - start
    assert vals.min() >= -1e-8, vals.min()
    assert elapsed < 120.0, elapsed
    _ok(9, f"Bell state witnessed at level {v.level} (value {direct:.3f}); "
           f"witness nonnegative on 10^5 product states in {elapsed:.1f}s")


# --- criterion 10: determinism ----------------------------------------------------

def test_criterion_10_byte_identical_reports(tmp_path, capsys):
    specs = ["builtin:classical_simplex:d=2", "builtin:classical_simplex:d=3",
             "builtin:classical_simplex:d=4", "builtin:gpt_simplex:d=3",
             "builtin:gpt_square", "builtin:qubit_six_state",
             "builtin:qubit_trine"]
    for i, spec in enumerate(specs):
        outs = []
        for threads in ("1", "8"):
            f = tmp_path / f"r{i}_{threads}.json"
            cli_main(["check", spec, "--seed", "0",
                      "--threads", threads, "--out", str(f)])
            outs.append(f.read_bytes())
        assert outs[0] == outs[1], spec
    capsys.readouterr()
    _ok(10, f"byte-identical JSON reports across thread counts on all "
            f"{len(specs)} corpus scenarios")
