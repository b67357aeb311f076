"""Classicality of prepare-and-measure scenarios via unit separability.

The pipeline: project states onto the span of the effects (the reduced
space R), take the polars of the two reduced cones, and ask whether the
tensor representative of the identity on R is a conic combination of
products of polar elements. Feasibility yields an explicit classical
ontological model with cardinality between dim(R) and dim(R)^2;
infeasibility yields a non-classicality witness. Round (non-polyhedral)
cones are handled by inner/outer polyhedral hierarchies, which also
decide two-qubit entanglement.
"""

from .approx import (ApproxVerdict, certify_classical, entanglement_check,
                     hierarchy, witness_nonclassical)
from .config import DEFAULT, Tolerances
from .cones import (ConeH, ConePreconditionError, ConeV, Ray,
                    cone_from_halfspaces, cone_from_rays, double_polar_check,
                    is_pointed, is_spanning, membership, vertex_enumeration)
from .operators import Matrix, NotHermitian, validate_effect, validate_state
from .oracle import OracleReport, oracle_classify
from .reduced import ReducedSpace, reduced_space, swapped_reduced_space
from .scenario import (Scenario, ScenarioError, ancilla_embed,
                       builtin_scenario, coarse_grain_augment, depolarize,
                       gpt_scenario, load_scenario, probability_table,
                       quantum_scenario, scenario_digest, serialize_scenario)
from .sep import (ClassicalModel, ResourceGuardError, SepSetup, Verdict,
                  Witness, build_setup, check_witness, classify,
                  evaluate_model, extract_model, witness_set)

__version__ = "0.1.0"

__all__ = [
    "ApproxVerdict", "ClassicalModel", "ConeH", "ConePreconditionError",
    "ConeV", "DEFAULT", "Matrix", "NotHermitian", "OracleReport", "Ray",
    "ReducedSpace", "ResourceGuardError", "Scenario", "ScenarioError",
    "SepSetup", "Tolerances", "Verdict", "Witness", "ancilla_embed",
    "build_setup", "builtin_scenario", "certify_classical", "check_witness",
    "classify", "coarse_grain_augment", "cone_from_halfspaces",
    "cone_from_rays", "depolarize", "double_polar_check",
    "entanglement_check", "evaluate_model", "extract_model", "gpt_scenario",
    "hierarchy", "is_pointed", "is_spanning", "load_scenario", "membership",
    "oracle_classify", "probability_table", "quantum_scenario",
    "reduced_space", "scenario_digest", "serialize_scenario",
    "swapped_reduced_space", "validate_effect", "validate_state",
    "vertex_enumeration", "witness_nonclassical", "witness_set",
]
