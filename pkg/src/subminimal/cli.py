"""Command line front end.

Each subcommand writes one JSON document to stdout and encodes its
verdict in the exit code: 0 for clean outcomes, 1 when something was
refuted or violated, 2 for usage and input problems. Refutation
witnesses are re-verified against the library evaluators before they
are printed, and every search takes explicit bounds, so output for
fixed inputs is deterministic.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any, Mapping, Sequence

from subminimal.algebra import (
    TopFrame,
    admissible_algebra,
    algebra_from_dict,
    algebra_to_dict,
    check_nalgebra,
    check_topframe,
    dual_frame,
    subdirectly_irreducible,
    sublattice_filtration,
    topframe_to_dict,
)
from subminimal.antichain import comparison_matrix
from subminimal.filtration import (
    DEFAULT_MAX_WORLDS,
    ResourceLimitError,
    Verdict,
    close_sigma,
    decide,
    greatest_filtration,
)
from subminimal.frames import (
    NModel,
    SearchTimeout,
    check_nframe,
    countermodel_search,
    eval_formula,
    frame_class,
    frame_from_dict,
    model_from_dict,
    model_to_dict,
    poset_from_dict,
)
from subminimal.modal import (
    COS4_AXIOMS,
    NS4_AXIOMS,
    NS4Model,
    en_check,
    modal_nframe_from_dict,
    ns4_check_frame,
    ns4_eval,
    ns4_from_dict,
    ns4_refuting_valuation,
    proof_from_list,
    check_proof,
    rn_validity,
)
from subminimal.syntax import (
    LOGICS,
    Formula,
    ParseError,
    depth,
    godel_translate,
    parse,
    show,
    variables,
)


def _load_json(path: str) -> Any:
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _parse_sigma(text: str) -> frozenset[Formula]:
    parts = [chunk.strip() for chunk in text.split(";")]
    formulas = [parse(chunk) for chunk in parts if chunk]
    if not formulas:
        raise ValueError("sigma holds no formula")
    return close_sigma(formulas)


def _assert_refutes(m: NModel, f: Formula, world: int) -> None:
    """Re-check a countermodel before it leaves the process."""
    if check_nframe(m.frame.poset, m.frame.ntable) is not None:
        raise RuntimeError("witness frame fails the locality law")
    if (eval_formula(m, f) >> world) & 1:
        raise RuntimeError("witness does not refute the formula")


def _verdict_payload(v: Verdict) -> dict:
    out: dict[str, Any] = {
        "status": v.status,
        "logic": v.logic,
        "formula": show(v.formula),
    }
    if v.bound is not None:
        out["bound"] = v.bound
    if v.model is not None:
        assert v.world is not None
        _assert_refutes(v.model, v.formula, v.world)
        out["model"] = model_to_dict(v.model)
        out["world"] = v.world
    return out


def _cmd_parse(args: argparse.Namespace) -> tuple[dict, int]:
    f = parse(args.formula, args.language)
    payload = {
        "status": "ok",
        "language": args.language,
        "formula": show(f),
        "variables": list(variables(f)),
        "depth": depth(f),
    }
    return payload, 0


def _cmd_decide(args: argparse.Namespace) -> tuple[dict, int]:
    f = parse(args.formula)
    v = decide(LOGICS[args.logic], f, args.max_worlds, args.timeout_ms)
    return _verdict_payload(v), 1 if v.status == "refuted" else 0


def _cmd_countermodel(args: argparse.Namespace) -> tuple[dict, int]:
    f = parse(args.formula)
    deadline = None
    if args.timeout_ms is not None:
        deadline = time.time() + args.timeout_ms / 1000
    hit = countermodel_search(LOGICS[args.logic], f, args.max_worlds, deadline)
    if hit is None:
        payload = {
            "status": "no-countermodel-up-to-bound",
            "logic": args.logic,
            "formula": show(f),
            "bound": args.max_worlds,
        }
        return payload, 0
    model, world = hit
    _assert_refutes(model, f, world)
    payload = {
        "status": "refuted",
        "logic": args.logic,
        "formula": show(f),
        "bound": args.max_worlds,
        "model": model_to_dict(model),
        "world": world,
    }
    return payload, 1


def _cmd_check_frame(args: argparse.Namespace) -> tuple[dict, int]:
    fr = frame_from_dict(_load_json(args.frame))
    witness = check_nframe(fr.poset, fr.ntable)
    if witness is not None:
        x, y = witness
        if fr.ntable[x] & y == fr.ntable[x & y] & y:
            raise RuntimeError("witness does not break the locality law")
        return {"status": "violation", "witness": {"x": x, "y": y}}, 1
    classes = {name: frame_class(fr, logic) for name, logic in LOGICS.items()}
    return {"status": "ok", "worlds": fr.n, "classes": classes}, 0


def _cmd_filtrate(args: argparse.Namespace) -> tuple[dict, int]:
    m = model_from_dict(_load_json(args.model))
    sigma = _parse_sigma(args.sigma)
    res = greatest_filtration(m, sigma)
    payload = model_to_dict(res.quotient)
    payload["status"] = "ok"
    payload["pi"] = list(res.pi)
    payload["sigma"] = sorted(show(g) for g in res.sigma)
    return payload, 0


def _load_topframe(d: Mapping) -> TopFrame:
    raw = d.get("N")
    if not isinstance(raw, Mapping):
        raise ValueError("top frame JSON needs an N table")
    table = {int(k): int(v) for k, v in raw.items()}
    if table.get(0) == 0:
        del table[0]
    p = poset_from_dict(d)
    flat = [-1] * (1 << p.n)
    for k, v in table.items():
        flat[k] = v
    return TopFrame(p, tuple(flat))


def _cmd_algebra_dual(args: argparse.Namespace) -> tuple[dict, int]:
    d = _load_json(args.source)
    if "meet" in d:
        tf = dual_frame(algebra_from_dict(d))
        payload = topframe_to_dict(tf)
    else:
        payload = algebra_to_dict(admissible_algebra(_load_topframe(d)))
    payload["status"] = "ok"
    return payload, 0


def _cmd_algebra_check(args: argparse.Namespace) -> tuple[dict, int]:
    d = _load_json(args.source)
    if "meet" in d:
        a = algebra_from_dict(d)
        hit = check_nalgebra(a)
        if hit is not None:
            law, witness = hit
            return {"status": "violation", "law": law, "witness": list(witness)}, 1
        payload = {
            "status": "ok",
            "size": a.size,
            "subdirectly_irreducible": subdirectly_irreducible(a),
        }
        return payload, 0
    tf = _load_topframe(d)
    pair = check_topframe(tf)
    if pair is not None:
        x, y = pair
        return {"status": "violation", "witness": {"x": x, "y": y}}, 1
    return {"status": "ok", "worlds": tf.n, "top": tf.top}, 0


def _cmd_algebra_filtrate(args: argparse.Namespace) -> tuple[dict, int]:
    a = algebra_from_dict(_load_json(args.algebra))
    mu_raw = json.loads(args.assign)
    if not isinstance(mu_raw, dict):
        raise ValueError("--assign must be a JSON object")
    mu = {str(k): int(v) for k, v in mu_raw.items()}
    sigma = _parse_sigma(args.sigma)
    filt = sublattice_filtration(a, mu, sigma)
    payload = {
        "status": "ok",
        "size": filt.algebra.size,
        "carrier": list(filt.carrier),
        "assign": dict(filt.mu),
        "algebra": algebra_to_dict(filt.algebra),
    }
    return payload, 0


def _cmd_antichain(args: argparse.Namespace) -> tuple[dict, int]:
    if args.max_n < 0:
        raise ValueError("--max-n must be nonnegative")
    payload = dict(comparison_matrix(args.max_n))
    payload["status"] = "ok"
    return payload, 0


def _cmd_translate(args: argparse.Namespace) -> tuple[dict, int]:
    f = parse(args.formula)
    payload = {
        "status": "ok",
        "source": show(f),
        "translation": show(godel_translate(f)),
    }
    return payload, 0


def _cmd_ns4_valid(args: argparse.Namespace) -> tuple[dict, int]:
    fr = ns4_from_dict(_load_json(args.frame))
    broken = ns4_check_frame(fr)
    if broken is not None:
        kind, x = broken
        return {"status": "violation", "condition": kind, "witness": x}, 1
    axioms = COS4_AXIOMS if args.system == "cos4" else NS4_AXIOMS
    if args.formulas:
        targets = [(show(f), f) for f in (parse(t, "modal") for t in args.formulas)]
    else:
        targets = list(axioms.items())
    for name, f in targets:
        hit = ns4_refuting_valuation(fr, f)
        if hit is not None:
            valuation, world = hit
            if (ns4_eval(NS4Model(fr, valuation), f) >> world) & 1:
                raise RuntimeError("witness does not refute the formula")
            payload = {
                "status": "refuted",
                "formula": name,
                "valuation": valuation,
                "world": world,
            }
            return payload, 1
    return {"status": "ok", "checked": [name for name, _ in targets]}, 0


def _cmd_ns4_check_proof(args: argparse.Namespace) -> tuple[dict, int]:
    items = _load_json(args.proof)
    if not isinstance(items, list):
        raise ValueError("proof JSON must be a list of lines")
    proof = proof_from_list(items, args.system)
    hit = check_proof(proof)
    if hit is not None:
        line, reason = hit
        return {"status": "violation", "line": line, "reason": reason}, 1
    return {"status": "ok", "system": args.system, "lines": len(proof.lines)}, 0


def _cmd_ns4_en(args: argparse.Namespace) -> tuple[dict, int]:
    fr = modal_nframe_from_dict(_load_json(args.frame))
    holds = en_check(fr, args.k)
    status = "ok" if holds else "violation"
    return {"status": status, "k": args.k, "holds": holds}, 0 if holds else 1


def _cmd_ns4_rn(args: argparse.Namespace) -> tuple[dict, int]:
    fr = modal_nframe_from_dict(_load_json(args.frame))
    holds = rn_validity(fr, args.k)
    status = "ok" if holds else "violation"
    return {"status": status, "k": args.k, "holds": holds}, 0 if holds else 1


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--pretty", action="store_true", help="indent the JSON output"
    )

    parser = argparse.ArgumentParser(
        prog="subminimal",
        description="Subminimal logics of negation: semantics, filtration, "
        "duality and bimodal companions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse and reprint a formula")
    p.add_argument("formula")
    p.add_argument("--language", choices=("prop", "modal"), default="prop")
    p.set_defaults(handler=_cmd_parse)

    p = sub.add_parser(
        "decide", parents=[common], help="decide a formula against a logic"
    )
    p.add_argument("formula")
    p.add_argument("--logic", choices=sorted(LOGICS), required=True)
    p.add_argument("--max-worlds", type=int, default=DEFAULT_MAX_WORLDS)
    p.add_argument("--timeout-ms", type=int, default=None)
    p.set_defaults(handler=_cmd_decide)

    p = sub.add_parser(
        "countermodel",
        parents=[common],
        help="search frames of a logic's class for a countermodel",
    )
    p.add_argument("formula")
    p.add_argument("--logic", choices=sorted(LOGICS), required=True)
    p.add_argument("--max-worlds", type=int, default=DEFAULT_MAX_WORLDS)
    p.add_argument("--timeout-ms", type=int, default=None)
    p.set_defaults(handler=_cmd_countermodel)

    p = sub.add_parser(
        "check-frame",
        parents=[common],
        help="validate a frame JSON file against the locality law",
    )
    p.add_argument("frame", help="frame JSON path, - for stdin")
    p.set_defaults(handler=_cmd_check_frame)

    p = sub.add_parser(
        "filtrate", parents=[common], help="greatest filtration of a model"
    )
    p.add_argument("--model", required=True, help="model JSON path, - for stdin")
    p.add_argument(
        "--sigma",
        required=True,
        help="formulas separated by ';', closed under subformulas automatically",
    )
    p.set_defaults(handler=_cmd_filtrate)

    p = sub.add_parser("algebra", parents=[], help="algebra and duality commands")
    asub = p.add_subparsers(dest="algebra_command", required=True)

    q = asub.add_parser(
        "dual",
        parents=[common],
        help="dual top frame of an algebra, or algebra of a top frame",
    )
    q.add_argument("source", help="algebra or top-frame JSON path, - for stdin")
    q.set_defaults(handler=_cmd_algebra_dual)

    q = asub.add_parser(
        "check", parents=[common], help="validate an algebra or top frame"
    )
    q.add_argument("source", help="algebra or top-frame JSON path, - for stdin")
    q.set_defaults(handler=_cmd_algebra_check)

    q = asub.add_parser(
        "filtrate", parents=[common], help="least algebraic filtration"
    )
    q.add_argument("--algebra", required=True, help="algebra JSON path, - for stdin")
    q.add_argument(
        "--assign", required=True, help='JSON object, e.g. \'{"p": 1}\''
    )
    q.add_argument("--sigma", required=True, help="formulas separated by ';'")
    q.set_defaults(handler=_cmd_algebra_filtrate)

    p = sub.add_parser(
        "antichain",
        parents=[common],
        help="pairwise onto / positive-morphism matrix of the ladder posets",
    )
    p.add_argument("--max-n", type=int, required=True)
    p.set_defaults(handler=_cmd_antichain)

    p = sub.add_parser(
        "translate", parents=[common], help="modal translation of a formula"
    )
    p.add_argument("formula")
    p.set_defaults(handler=_cmd_translate)

    p = sub.add_parser("ns4", parents=[], help="bimodal companion commands")
    nsub = p.add_subparsers(dest="ns4_command", required=True)

    q = nsub.add_parser(
        "valid",
        parents=[common],
        help="check formulas (default: the system's axioms) on a frame",
    )
    q.add_argument("--frame", required=True, help="frame JSON path, - for stdin")
    q.add_argument("--system", choices=("ns4", "cos4"), default="ns4")
    q.add_argument("formulas", nargs="*")
    q.set_defaults(handler=_cmd_ns4_valid)

    q = nsub.add_parser("check-proof", parents=[common], help="verify a proof file")
    q.add_argument("proof", help="proof JSON path, - for stdin")
    q.add_argument("--system", choices=("ns4", "cos4"), required=True)
    q.set_defaults(handler=_cmd_ns4_check_proof)

    q = nsub.add_parser(
        "en", parents=[common], help="k-ary locality identity on a total table"
    )
    q.add_argument("--frame", required=True, help="frame JSON path, - for stdin")
    q.add_argument("-k", type=int, required=True)
    q.set_defaults(handler=_cmd_ns4_en)

    q = nsub.add_parser(
        "rn", parents=[common], help="k-premise replacement rule on a total table"
    )
    q.add_argument("--frame", required=True, help="frame JSON path, - for stdin")
    q.add_argument("-k", type=int, required=True)
    q.set_defaults(handler=_cmd_ns4_rn)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        payload, code = args.handler(args)
    except KeyError as exc:
        payload, code = {"status": "error", "error": f"missing key {exc}"}, 2
    except (ParseError, ValueError, OSError) as exc:
        payload, code = {"status": "error", "error": str(exc)}, 2
    except (ResourceLimitError, SearchTimeout) as exc:
        payload, code = {"status": "error", "error": str(exc)}, 2
    print(json.dumps(payload, sort_keys=True, indent=2 if args.pretty else None))
    return code


if __name__ == "__main__":
    sys.exit(main())
