"""Batch JSON command line front end.

One verb per invocation, JSON in, JSON out. Output is deterministic for
fixed inputs and seed: keys are sorted and rationals are serialized as
"p/q" strings. Exit codes: 0 success (an "unstable"/false verdict is
data, not a failure), 2 parse or usage error, 3 domain error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import hntheta, quotmodel, strata
from .errors import ToolkitError
from .hntheta import SheafProfile, ThetaParam
from .quotmodel import HNType, QuotPoint
from .ratpoly import rat, rat_str
from .strata import WeightSystem
from .convexgeo import vec_json, vector

VERBS = (
    "index-set",
    "stratum",
    "z-member",
    "y-member",
    "retract",
    "epsilon",
    "refine-check",
    "hm",
    "beta-tau",
    "verify-min",
    "char-identity",
    "graded-weight",
    "hn-sum",
    "theta-check",
    "cross",
    "perturbed-hm",
    "gamma",
    "s-equiv",
)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="stratkit",
        description="exact stratification and sheaf-stability calculations",
    )
    p.add_argument("verb", choices=VERBS)
    p.add_argument("--input", required=True, help="input JSON file")
    p.add_argument("--output", help="output path (default: standard output)")
    p.add_argument("--seed", type=int, help="seed for randomized verbs")
    p.add_argument("--n", type=int, help="twist n")
    p.add_argument("--m", type=int, help="twist m")
    p.add_argument("--cap", type=int, help="enumeration cap / sample count")
    p.add_argument("--mode", choices=["asymptotic", "at-n"], default="at-n")
    p.add_argument("--epsilon", help="perturbation scale as p/q")
    return p


def _require(args, *names) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name} is required for this verb")


class UsageError(Exception):
    pass


def _support(data) -> frozenset:
    return frozenset(int(i) for i in data)


def _blocks(data):
    return [[(int(i), int(j)) for i, j in block] for block in data]


def _run(args) -> dict:
    with open(args.input) as fh:
        data = json.load(fh)
    verb = args.verb

    if verb == "index-set":
        ws = WeightSystem.from_json(data)
        out = strata.index_set(ws, cap=args.cap or 20).to_json()
        out["formula"] = "B = { closest point to 0 of conv(S) : S a nonempty weight subset }"
        return out

    if verb == "stratum":
        ws = WeightSystem.from_json(data["system"])
        beta = strata.torus_stratum(ws, _support(data["support"]))
        return {
            "beta": vec_json(beta),
            "formula": "beta = closest point to 0 of conv{alpha_i : i in supp(x)}",
        }

    if verb == "z-member":
        ws = WeightSystem.from_json(data["system"])
        ok = strata.z_membership(ws, vector(data["beta"]), _support(data["support"]))
        return {"result": ok, "formula": "alpha_i . beta = ||beta||^2 for all i in supp(x)"}

    if verb == "y-member":
        ws = WeightSystem.from_json(data["system"])
        ok = strata.y_membership(ws, vector(data["beta"]), _support(data["support"]))
        return {
            "result": ok,
            "formula": "alpha_i . beta >= ||beta||^2 on supp(x), with equality somewhere",
        }

    if verb == "retract":
        ws = WeightSystem.from_json(data["system"])
        out = strata.p_beta_retraction(
            ws, vector(data["beta"]), _support(data["support"])
        )
        return {
            "support": sorted(out),
            "formula": "p_beta(x): keep i with alpha_i . beta = ||beta||^2",
        }

    if verb == "epsilon":
        ws = WeightSystem.from_json(data)
        out = strata.epsilon_bounds(ws, cap=args.cap or 20).to_json()
        out["formula"] = "epsilon = min{1, epsilon0/(4M+1), epsilon1/3}"
        return out

    if verb == "refine-check":
        ws = WeightSystem.from_json(data["system"])
        wsp = WeightSystem.from_json(data["perturbed"])
        out = strata.check_refinement(ws, wsp, cap=args.cap or 12).to_json()
        out["formula"] = (
            "per support: stratum label of the perturbed system determines "
            "the original label"
        )
        return out

    if verb == "hm":
        _require(args, "m")
        rho = QuotPoint.from_json(data)
        value = quotmodel.hm_function(rho, args.m)
        return {
            "value": rat_str(value),
            "forms_agree": True,
            "formula": "sum_{i<s} (k_i - k_{i+1}) (P(F^(i),m) - dim V^(i) P(m)/P(n))",
        }

    if verb == "beta-tau":
        _require(args, "n", "m")
        bt = quotmodel.beta_of_tau(HNType.from_json(data), args.n, args.m)
        out = bt.to_json()
        out["formula"] = "beta_i = P(m)/P(n) - P_i(m)/P_i(n)"
        return out

    if verb == "verify-min":
        _require(args, "n", "m", "seed")
        tau = HNType.from_json(data["tau"] if "tau" in data else data)
        bt = quotmodel.beta_of_tau(tau, args.n, args.m)
        point = None
        if isinstance(data, dict) and data.get("point") is not None:
            point = [rat(x) for x in data["point"]]
        ok = quotmodel.verify_beta_minimizer(
            bt, samples=args.cap or 100, seed=args.seed, point=point
        )
        return {
            "result": ok,
            "samples": args.cap or 100,
            "seed": args.seed,
            "formula": "f(b) = sum (b_i - b_{i+1}) (P(F^(i),m) - P(F^(i),n) P(m)/P(n)) / ||b||",
        }

    if verb == "char-identity":
        _require(args, "n", "m")
        tau = HNType.from_json(data["tau"] if "tau" in data else data)
        bt = quotmodel.beta_of_tau(tau, args.n, args.m)
        beta = None
        if isinstance(data, dict) and data.get("beta") is not None:
            beta = [rat(x) for x in data["beta"]]
        ok = quotmodel.central_character_identity(bt, beta=beta)
        return {
            "result": ok,
            "formula": "(P_i(m))_i = (-beta_i P_i(n))_i + c (P_i(n))_i for rational c",
        }

    if verb == "graded-weight":
        _require(args, "n", "m")
        bt = quotmodel.beta_of_tau(HNType.from_json(data), args.n, args.m)
        value = quotmodel.graded_limit_weight(bt)
        return {
            "value": rat_str(value),
            "equals_norm_sq": True,
            "formula": "sum P_i(m)^2/P_i(n) - P(m)^2/P(n) = ||beta||^2",
        }

    if verb == "hn-sum":
        a = SheafProfile.from_json(data["a"])
        b = SheafProfile.from_json(data["b"])
        cases: dict = {}
        out = hntheta.direct_sum_hn(a, b, case_log=cases)
        return {
            "profile": out.to_json(),
            "cases": cases,
            "formula": "merge layers by strictly decreasing reduced Hilbert polynomial",
        }

    if verb == "theta-check":
        _require(args, "n")
        profile = SheafProfile.from_json(data["profile"])
        tp = ThetaParam(data["theta"], args.n, hntheta.hn_type(profile))
        mode = hntheta.AT_N if args.mode == "at-n" else hntheta.ASYMPTOTIC
        out = hntheta.theta_semistable(profile, tp, mode=mode, cap=args.cap or 16).to_json()
        out["beta_prime"] = [rat_str(b) for b in tp.beta_prime]
        out["formula"] = "sum theta_i P(F'_i)/P(F') >= sum theta_i P(F_i)/P(F)"
        return out

    if verb == "cross":
        _require(args, "n", "m")
        tau = HNType.from_json(data["tau"])
        tp = ThetaParam(data["theta"], args.n, tau)
        ok = hntheta.cross_condition(tp, tau, args.m)
        return {
            "result": ok,
            "formula": "sum theta_i P_i(n)/P(n) >= sum theta_i P_i(m)/P(m)",
        }

    if verb == "perturbed-hm":
        _require(args, "n", "epsilon")
        profile = SheafProfile.from_json(data["profile"])
        tp = ThetaParam(data["theta"], args.n, hntheta.hn_type(profile))
        value = hntheta.perturbed_hm(
            profile,
            _blocks(data["blocks"]),
            [int(k) for k in data["weights"]],
            tp,
            rat(args.epsilon),
        )
        return {
            "value": rat_str(value),
            "formula": "epsilon sum_j sum_i k_j beta'_i P(F_i^j, n)",
        }

    if verb == "gamma":
        _require(args, "n", "epsilon")
        profile = SheafProfile.from_json(data["profile"])
        tp = ThetaParam(data["theta"], args.n, hntheta.hn_type(profile))
        gammas = hntheta.gamma_of_destabilizing(
            profile, _blocks(data["blocks"]), tp, rat(args.epsilon)
        )
        return {
            "gamma": [rat_str(g) for g in gammas],
            "formula": "gamma_j = -epsilon sum_i beta'_i P(F_i^j,n) / P(F^j,n)",
        }

    if verb == "s-equiv":
        a = SheafProfile.from_json(data["a"])
        b = SheafProfile.from_json(data["b"])
        return {
            "result": hntheta.s_equivalent(a, b),
            "formula": "layerwise equality of atom polynomial multisets",
        }

    raise UsageError(f"unhandled verb {verb}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        report = _run(args)
    except ToolkitError as exc:
        print(
            json.dumps(
                {"error": type(exc).__name__, "message": str(exc)}, sort_keys=True
            ),
            file=sys.stderr,
        )
        return 3
    except (UsageError, json.JSONDecodeError, OSError, KeyError, TypeError,
            ValueError, IndexError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
