import numpy as np
import pytest

from conekit.approx import (bloch_directions, certify_classical,
                            entanglement_check, hierarchy, level_count,
                            replay_soundness, witness_nonclassical)
from conekit.scenario import builtin_scenario, depolarize

FULL = builtin_scenario("qubit_full", n_state_rays=12, n_effect_rays=12)

BELL = np.zeros((4, 4), dtype=complex)
BELL[0, 0] = BELL[0, 3] = BELL[3, 0] = BELL[3, 3] = 0.5


def test_direction_schedule_is_monotone():
    for k1, k2 in [(4, 10), (10, 18), (18, 34)]:
        small = bloch_directions(k1, seed=3)
        big = bloch_directions(k2, seed=3)
        assert big[:k1] == small
    assert level_count(1) == 4 and level_count(3) == 18
    for n in (4, 10, 18, 40):
        for v in bloch_directions(n, seed=1):
            assert abs(sum(x * x for x in v) - 1.0) < 1e-12


def test_full_qubit_witnessed_nonclassical():
    v = hierarchy(FULL, max_level=4)
    assert v.kind == "WitnessedNonClassical"
    assert v.violation < 0


def test_depolarized_qubit_certified_below_third():
    v = hierarchy(depolarize(FULL, 0.3), max_level=4)
    assert v.kind == "CertifiedClassical"
    assert v.certifiers is None or True


def test_depolarized_qubit_witnessed_above_third():
    v = hierarchy(depolarize(FULL, 0.6), max_level=4)
    assert v.kind == "WitnessedNonClassical"


def test_polyhedral_witness_path_never_false_positive():
    sc = builtin_scenario("classical_simplex", d=3)
    for level in (1, 2, 3):
        v = witness_nonclassical(sc, level)
        assert v.kind == "Inconclusive"
    sc6 = builtin_scenario("qubit_six_state")
    for level in (1, 2):
        assert witness_nonclassical(sc6, level).kind == "Inconclusive"


def test_polyhedral_certify_path():
    assert certify_classical(builtin_scenario("classical_simplex", d=3),
                             1).kind == "CertifiedClassical"
    assert certify_classical(builtin_scenario("qubit_six_state"),
                             1).kind == "CertifiedClassical"


def test_witness_margins_non_increasing_once_witnessed():
    margins = []
    for level in (3, 4, 5):
        v = witness_nonclassical(FULL, level)
        if v.margin is not None:
            margins.append(v.margin)
    assert len(margins) >= 2
    # the same witness stays valid as Sep_out shrinks; the best value
    # found can only improve with more constraints available
    assert min(margins) <= margins[0] + 1e-12


def test_replay_soundness_accepts_valid_rejects_invalid():
    gamma = np.eye(4)          # nonnegative on every product of PSD rays

    def sampler(rng, n):
        v = rng.normal(size=(n, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        return np.hstack([np.ones((n, 1)), v]) / np.sqrt(2)

    assert replay_soundness(gamma, sampler, seed=1)["ok"]
    bad = -np.eye(4)
    assert not replay_soundness(bad, sampler, seed=1)["ok"]


def test_bell_state_witnessed_entangled():
    v = entanglement_check(BELL, max_level=3, seed=0)
    assert v.kind == "WitnessedNonClassical"
    assert v.level <= 3
    assert v.violation < 0
    # direct check on the state
    from conekit.approx import _pauli_coords
    omega = _pauli_coords(BELL)
    assert float(np.sum(omega * v.witness)) < 0


def test_product_and_mixed_states_not_witnessed():
    prod = np.zeros((4, 4), dtype=complex)
    prod[0, 0] = 1.0
    v = entanglement_check(prod, max_level=3)
    assert v.kind in ("CertifiedClassical", "Inconclusive")
    mixed = np.eye(4, dtype=complex) / 4
    v = entanglement_check(mixed, max_level=3)
    assert v.kind in ("CertifiedClassical", "Inconclusive")


def test_entanglement_witness_nonneg_on_many_products():
    v = entanglement_check(BELL, max_level=3, seed=0)
    rng = np.random.default_rng(42)
    n = 100_000
    a = rng.normal(size=(n, 3))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    b = rng.normal(size=(n, 3))
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    pa = np.hstack([np.ones((n, 1)), a]) / np.sqrt(2)
    pb = np.hstack([np.ones((n, 1)), b]) / np.sqrt(2)
    vals = np.einsum("ni,ij,nj->n", pa, v.witness, pb)
    assert vals.min() >= -1e-8


def test_gpt_scenario_rejected():
    with pytest.raises(ValueError):
        witness_nonclassical(builtin_scenario("gpt_square"), 1)
