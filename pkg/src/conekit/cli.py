"""Command-line front end.

Human-readable progress goes to stderr; the machine-readable JSON
report goes to stdout (or --out). Exit codes: 0 classical / certified
separable / success, 1 non-classical / entangled / failed verification,
2 invalid input, 3 inconclusive, 4 resource guard, 5 artifact request
inconsistent with the verdict.

Reports are byte-identical across --threads values and repeated runs
with the same seed; wall-clock timings are only added under --timings
and are never part of the canonical report.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Optional

import numpy as np

from .approx import entanglement_check, hierarchy, replay_soundness
from .config import DEFAULT, Tolerances
from .cones import ConePreconditionError
from .oracle import oracle_classify
from .scenario import (Scenario, ScenarioError, builtin_scenario,
                       load_scenario, scenario_digest, serialize_scenario)
from .sep import (ResourceGuardError, build_setup, check_witness, classify,
                  evaluate_model, model_to_json, verdict_to_json,
                  witness_set, witness_to_json)

EXIT_CLASSICAL = 0
EXIT_NONCLASSICAL = 1
EXIT_INVALID = 2
EXIT_INCONCLUSIVE = 3
EXIT_RESOURCE = 4
EXIT_WRONG_KIND = 5


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(report: dict, out: Optional[str], timings: Optional[dict]) -> None:
    if timings is not None:
        report = dict(report)
        report["timings"] = timings
    blob = json.dumps(report, sort_keys=True, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(blob + "\n")
        _say(f"report written to {out}")
    else:
        print(blob)


def _parse_param(raw: str):
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    if "/" in raw:
        try:
            return Fraction(raw)
        except ValueError:
            pass
    return raw


def resolve_scenario(spec: str, tol: Tolerances) -> Scenario:
    """A path to a scenario JSON document, or `builtin:name[:k=v,...]`."""
    if spec.startswith("builtin:"):
        parts = spec.split(":")
        name = parts[1]
        params = {}
        for piece in parts[2:]:
            for kv in piece.split(","):
                if not kv:
                    continue
                k, _, v = kv.partition("=")
                params[k] = _parse_param(v)
        return builtin_scenario(name, tol=tol, **params)
    with open(spec) as fh:
        return load_scenario(json.load(fh), tol)


def _tolerances(args) -> Tolerances:
    if args.tol is None:
        return DEFAULT
    t = float(args.tol)
    return DEFAULT.with_overrides(psd_tol=t, trace_tol=t, povm_tol=t,
                                  polar_tol=t, recon_tol=max(t, 1e-8))


def _scenario_meta(sc: Scenario, args) -> dict:
    return {"digest": scenario_digest(sc), "mode": sc.mode,
            "exact": sc.exact, "n_states": sc.n_states,
            "n_effects": sc.n_effects, "seed": args.seed,
            "notes": list(sc.notes)}


def _force_mode(sc: Scenario, args) -> Scenario:
    if getattr(args, "float_mode", False) and sc.exact:
        doc = serialize_scenario(sc)

        def to_float(node):
            if isinstance(node, str) and "/" in node:
                return float(Fraction(node))
            if isinstance(node, list):
                return [to_float(x) for x in node]
            if isinstance(node, dict):
                return {k: to_float(v) for k, v in node.items()}
            if isinstance(node, int) and not isinstance(node, bool):
                return float(node)
            return node

        keys = ("states", "povms", "gpt_states", "gpt_effects", "gpt_unit")
        for k in keys:
            if k in doc:
                doc[k] = to_float(doc[k])
        return load_scenario(doc)
    if getattr(args, "exact_mode", False) and not sc.exact:
        raise ScenarioError("scenario has float entries; exact mode needs "
                            "integers or 'p/q' rationals throughout")
    return sc


# --- commands ----------------------------------------------------------------

def cmd_inspect(args) -> int:
    tol = _tolerances(args)
    sc = _force_mode(resolve_scenario(args.scenario, tol), args)
    setup = build_setup(sc, swap=False, tol=tol)
    report = {
        "command": "inspect",
        "scenario": _scenario_meta(sc, args),
        "dim_R": setup.dim,
        "stats": {
            "state_rays": len(setup.state_cone.rays),
            "effect_rays": len(setup.effect_cone.rays),
            "state_polar_rays": len(setup.state_polar.rays),
            "effect_polar_rays": len(setup.effect_polar.rays),
            "sep_generators": len(setup.products),
        },
    }
    if args.swap_reduced:
        report["dim_R_swapped"] = build_setup(sc, swap=True, tol=tol).dim
    _emit(report, args.out, None)
    _say(f"scenario ok: dim(R) = {setup.dim}")
    return EXIT_CLASSICAL


def _run_classify(sc: Scenario, args, tol: Tolerances,
                  with_model: bool, with_witnesses: bool):
    verdict = classify(sc, swap=args.swap_reduced, tol=tol,
                       with_model=with_model, with_witnesses=with_witnesses)
    report = verdict_to_json(verdict)
    report["scenario"] = _scenario_meta(sc, args)
    if args.oracle:
        oracle = oracle_classify(sc, swap=args.swap_reduced, tol=tol)
        report["oracle"] = {"verdict": oracle.verdict,
                            "dim_R": oracle.dim_reduced,
                            "agrees": oracle.verdict == verdict.kind}
        if not report["oracle"]["agrees"]:
            _say("WARNING: oracle disagrees with the main engine")
    return verdict, report


def cmd_check(args) -> int:
    tol = _tolerances(args)
    sc = _force_mode(resolve_scenario(args.scenario, tol), args)
    t0 = time.perf_counter()
    verdict, report = _run_classify(sc, args, tol, with_model=True,
                                    with_witnesses=args.witnesses)
    report["command"] = "check"
    timings = {"classify_s": time.perf_counter() - t0} if args.timings else None
    _emit(report, args.out, timings)
    _say(f"verdict: {verdict.kind} (dim R = {verdict.dim_reduced})")
    return EXIT_CLASSICAL if verdict.kind == "Classical" else EXIT_NONCLASSICAL


def cmd_model(args) -> int:
    tol = _tolerances(args)
    sc = _force_mode(resolve_scenario(args.scenario, tol), args)
    verdict, report = _run_classify(sc, args, tol, with_model=True,
                                    with_witnesses=False)
    if verdict.kind != "Classical":
        _say("scenario is NonClassical; no classical model exists (exit 5)")
        return EXIT_WRONG_KIND
    quality = evaluate_model(verdict.setup, verdict.model, tol)
    artifact = {
        "command": "model", "kind": "model",
        "scenario": _scenario_meta(sc, args),
        "swap": args.swap_reduced, "dim_R": verdict.dim_reduced,
        "model": model_to_json(verdict.model),
        "evaluation": quality,
    }
    _emit(artifact, args.out, None)
    _say(f"classical model with {verdict.model.cardinality} ontic states "
         f"(table error {quality['table_error']:.2e})")
    return EXIT_CLASSICAL


def cmd_witness(args) -> int:
    tol = _tolerances(args)
    sc = _force_mode(resolve_scenario(args.scenario, tol), args)
    verdict, report = _run_classify(sc, args, tol, with_model=False,
                                    with_witnesses=args.witnesses)
    if verdict.kind != "NonClassical":
        _say("scenario is Classical; no non-classicality witness (exit 5)")
        return EXIT_WRONG_KIND
    soundness = check_witness(verdict.setup, verdict.witness.coords, tol)
    artifact = {
        "command": "witness", "kind": "witness",
        "scenario": _scenario_meta(sc, args),
        "swap": args.swap_reduced, "dim_R": verdict.dim_reduced,
        "witness": witness_to_json(verdict.witness),
        "violation": float(verdict.violation),
        "soundness": soundness,
    }
    _emit(artifact, args.out, None)
    _say(f"witness with normalized violation {verdict.violation:.6g}")
    return EXIT_NONCLASSICAL


def cmd_approx(args) -> int:
    tol = _tolerances(args)
    sc = _force_mode(resolve_scenario(args.scenario, tol), args)
    v = hierarchy(sc, max_level=args.max_level, mode=args.mode,
                  seed=args.seed, inner_rays=args.inner_rays,
                  outer_faces=args.outer_faces, tol=tol)
    report = {
        "command": "approx", "scenario": _scenario_meta(sc, args),
        "kind": v.kind, "level": v.level, "mode": args.mode,
        "max_level": args.max_level,
    }
    if v.violation is not None:
        report["violation"] = v.violation
        report["witness"] = [list(map(float, row)) for row in v.witness]
    if v.margin is not None:
        report["margin"] = v.margin
    if v.reason:
        report["reason"] = v.reason
    _emit(report, args.out, None)
    _say(f"approximation verdict: {v.kind} at level {v.level}")
    if v.kind == "CertifiedClassical":
        return EXIT_CLASSICAL
    if v.kind == "WitnessedNonClassical":
        return EXIT_NONCLASSICAL
    return EXIT_INCONCLUSIVE


_BUILTIN_STATES = {
    "bell": [[0.5, 0, 0, 0.5], [0, 0, 0, 0], [0, 0, 0, 0], [0.5, 0, 0, 0.5]],
    "product00": [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
    "mixed": [[0.25, 0, 0, 0], [0, 0.25, 0, 0], [0, 0, 0.25, 0],
              [0, 0, 0, 0.25]],
}


def cmd_entangle(args) -> int:
    if args.state in _BUILTIN_STATES:
        rho = np.array(_BUILTIN_STATES[args.state], dtype=complex)
    else:
        with open(args.state) as fh:
            doc = json.load(fh)
        entries = doc["rho"] if isinstance(doc, dict) else doc
        rho = np.array([[complex(c[0], c[1]) for c in row] for row in entries])
    v = entanglement_check(rho, max_level=args.max_level, seed=args.seed,
                           inner_rays=args.inner_rays,
                           outer_faces=args.outer_faces)
    report = {"command": "entangle", "state": args.state, "kind": v.kind,
              "level": v.level, "seed": args.seed}
    if v.violation is not None:
        report["violation"] = v.violation
        report["witness"] = [list(map(float, row)) for row in v.witness]
    _emit(report, args.out, None)
    if v.kind == "WitnessedNonClassical":
        _say(f"entangled: witness value {v.violation:.6g} at level {v.level}")
        return EXIT_NONCLASSICAL
    if v.kind == "CertifiedClassical":
        _say("certified separable")
        return EXIT_CLASSICAL
    _say("inconclusive")
    return EXIT_INCONCLUSIVE


def cmd_verify(args) -> int:
    tol = _tolerances(args)
    with open(args.artifact) as fh:
        art = json.load(fh)
    kind = art.get("kind")
    if kind not in ("model", "witness"):
        _say("artifact must contain kind: model or witness")
        return EXIT_INVALID
    sc = _force_mode(resolve_scenario(args.scenario, tol), args)
    digest = scenario_digest(sc)
    if art.get("scenario", {}).get("digest") not in (None, digest):
        _say("artifact digest does not match the scenario")
        return EXIT_NONCLASSICAL
    setup = build_setup(sc, swap=bool(art.get("swap", False)), tol=tol)

    def parse_num(x):
        return Fraction(x) if isinstance(x, str) else \
            (Fraction(x) if setup.exact and isinstance(x, int) else float(x))

    if kind == "witness":
        coords = tuple(parse_num(x) for x in art["witness"]["coords"])
        res = check_witness(setup, coords, tol)
        report = {"command": "verify", "kind": "witness", "ok": res["ok"],
                  "detail": res, "scenario": _scenario_meta(sc, args)}
        _emit(report, args.out, None)
        _say("witness verification " + ("PASSED" if res["ok"] else "FAILED"))
        return EXIT_CLASSICAL if res["ok"] else EXIT_NONCLASSICAL

    from .sep import ClassicalModel
    sigmas = tuple(tuple(parse_num(x) for x in row)
                   for row in art["model"]["sigma"])
    funcs = tuple(tuple(parse_num(x) for x in row)
                  for row in art["model"]["F"])
    model = ClassicalModel(sigmas, funcs, setup.exact)
    res = evaluate_model(setup, model, tol)
    report = {"command": "verify", "kind": "model", "ok": res["ok"],
              "detail": res, "scenario": _scenario_meta(sc, args)}
    _emit(report, args.out, None)
    _say("model verification " + ("PASSED" if res["ok"] else "FAILED"))
    return EXIT_CLASSICAL if res["ok"] else EXIT_NONCLASSICAL


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="conekit",
        description="Decide classicality of prepare-and-measure scenarios.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scenario=True):
        if scenario:
            sp.add_argument("scenario",
                            help="scenario JSON path or builtin:<name>[:k=v,...]")
        sp.add_argument("--exact", dest="exact_mode", action="store_true",
                        help="require the exact rational pipeline")
        sp.add_argument("--float", dest="float_mode", action="store_true",
                        help="force the floating-point pipeline")
        sp.add_argument("--tol", type=float, default=None,
                        help="override the main numerical tolerances")
        sp.add_argument("--swap-reduced", action="store_true",
                        help="run on the swapped reduced space R'")
        sp.add_argument("--oracle", action="store_true",
                        help="cross-check against the brute-force oracle")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1,
                        help="accepted for interface stability; results are "
                             "independent of the value")
        sp.add_argument("--out", default=None, help="write the JSON report here")
        sp.add_argument("--timings", action="store_true",
                        help="append wall-clock timings (report is no longer "
                             "byte-reproducible)")

    sp = sub.add_parser("inspect", help="validate and summarize a scenario")
    common(sp)
    sp.set_defaults(func=cmd_inspect)

    sp = sub.add_parser("check", help="decide classicality")
    common(sp)
    sp.add_argument("--witnesses", action="store_true",
                    help="also enumerate the full witness set")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("model", help="extract an explicit classical model")
    common(sp)
    sp.set_defaults(func=cmd_model)

    sp = sub.add_parser("witness", help="extract a non-classicality witness")
    common(sp)
    sp.add_argument("--witnesses", action="store_true",
                    help="pick the witness from the full extremal set")
    sp.set_defaults(func=cmd_witness)

    sp = sub.add_parser("approx", help="run the approximation hierarchy")
    common(sp)
    sp.add_argument("--max-level", type=int, default=4)
    sp.add_argument("--inner-rays", type=int, default=None)
    sp.add_argument("--outer-faces", type=int, default=None)
    sp.add_argument("--mode", choices=["auto", "certify", "witness"],
                    default="auto")
    sp.set_defaults(func=cmd_approx)

    sp = sub.add_parser("entangle",
                        help="two-qubit entanglement via the same hierarchy")
    sp.add_argument("state", help="density-matrix JSON path or one of: "
                                  + ", ".join(sorted(_BUILTIN_STATES)))
    sp.add_argument("--max-level", type=int, default=3)
    sp.add_argument("--inner-rays", type=int, default=None)
    sp.add_argument("--outer-faces", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", default=None)
    sp.add_argument("--timings", action="store_true")
    sp.set_defaults(func=cmd_entangle)

    sp = sub.add_parser("verify", help="re-check a model or witness artifact")
    sp.add_argument("artifact", help="model/witness JSON produced by this tool")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceGuardError as err:
        _say(f"resource guard: {err}")
        return EXIT_RESOURCE
    except (ScenarioError, ConePreconditionError, FileNotFoundError,
            json.JSONDecodeError, KeyError, ValueError) as err:
        _say(f"invalid input: {err}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
