"""Command-line interface: ``definetti <command> ...``.

Every command prints one JSON document (``--output json``, the default) or
a plain-text rendering of it.  Exit codes: 0 for ok or a YES verdict, 1 for
a NO verdict, 2 for invalid input, 3 when a size guard is exceeded.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from . import __version__
from ._rational import fmt, fmt_matrix, to_fraction
from .binary import (
    BinaryLawX,
    MomentVectorY,
    binary_law_from_json,
    binary_law_to_json,
    counterexample,
    hankel_pair,
    reinforcement_check,
    true_mixture_verdict,
    x_to_y,
    y_to_x,
)
from .errors import GuardExceeded, InfeasibleMoments
from .groups import check_permutation, classify, parse_cycles
from .laws import law_from_json, validate
from .necessary import (
    BoxTestSpec,
    ClassSpec,
    necessary_condition_check,
    necessary_matrix,
    parse_class_spec,
    scan_specs,
)
from .semidefinite import is_psd_float
from .signed import negative_mass, signed_mixture, verify_representation

EXIT_OK, EXIT_NO, EXIT_INVALID, EXIT_OVERFLOW = 0, 1, 2, 3


@dataclass(frozen=True)
class CommandResult:
    status: str
    payload: dict
    exit_code: int


def _ok(payload: dict) -> CommandResult:
    return CommandResult("ok", payload, EXIT_OK)


def _verdict(payload: dict, yes: bool) -> CommandResult:
    return CommandResult("ok" if yes else "verdict-no", payload, EXIT_OK if yes else EXIT_NO)


def _read_json(path: str):
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed JSON: {exc}") from exc


def _read_valid_law(path: str):
    law = law_from_json(_read_json(path))
    report = validate(law)
    if not report.valid:
        raise ValueError(f"not a valid class-exchangeable law: {_validation_payload(report)}")
    return law


def _psd_payload(v) -> dict:
    out = {"psd": v.is_psd}
    if v.minor is not None:
        out["minor"] = list(v.minor)
        out["det"] = fmt(v.minor_det)
    if v.vector is not None:
        out["vector"] = [float(c) for c in v.vector]
        out["quadratic_form"] = float(v.quadratic_form)
    return out


def _validation_payload(report) -> dict:
    return {
        "valid": report.valid,
        "total": fmt(report.total),
        "negative_points": [",".join(p) for p, _ in report.negative],
        "orbit_violations": [
            {
                "class": v.class_index,
                "swap": list(v.coordinates),
                "point": ",".join(v.point),
                "value": fmt(v.value),
                "swapped_value": fmt(v.swapped_value),
            }
            for v in report.orbit_violations
        ],
    }


# -- commands ---------------------------------------------------------------

def cmd_check_mixture(args) -> CommandResult:
    law = binary_law_from_json(_read_json(args.file), normalize=args.normalize)
    if args.float:
        pair = hankel_pair(law)
        hc, kc = is_psd_float(pair.H), is_psd_float(pair.K)
        yes = hc.is_psd and kc.is_psd
        payload = {
            "n": law.n,
            "mode": "float",
            "H": fmt_matrix(pair.H),
            "K": fmt_matrix(pair.K),
            "verdict": "YES" if yes else "NO",
            "H_check": _psd_payload(hc),
            "K_check": _psd_payload(kc),
        }
        return _verdict(payload, yes)
    try:
        v = true_mixture_verdict(law, recover=args.witness, tol=args.tol)
        recovery_error = None
    except InfeasibleMoments as exc:
        v = true_mixture_verdict(law, recover=False)
        recovery_error = str(exc)
    payload = {
        "n": law.n,
        "mode": "exact",
        "H": fmt_matrix(v.hankel.H),
        "K": fmt_matrix(v.hankel.K),
        "verdict": "YES" if v.verdict else "NO",
    }
    if args.witness:
        if v.verdict:
            payload["measure"] = None if v.measure is None else v.measure.to_json()["atoms"]
            if recovery_error:
                payload["recovery_error"] = recovery_error
        else:
            payload["witness"] = {
                "matrix": v.witness_matrix,
                "minor": list(v.witness_minor),
                "det": fmt(v.witness_det),
            }
    return _verdict(payload, v.verdict)


def cmd_represent(args) -> CommandResult:
    law = _read_valid_law(args.file)
    mix = signed_mixture(law)
    payload = {
        "mixture": mix.to_json(),
        "verified": verify_representation(law, mix),
        "negative_mass": fmt(negative_mass(mix)),
    }
    return _ok(payload)


def _group_from_args(args) -> tuple:
    """Generators from cycle strings, or from ``{"n", "generators"}`` JSON in image form."""
    if args.file is not None:
        if args.generators:
            raise ValueError("give generators either as cycles or in --file, not both")
        doc = _read_json(args.file)
        if not isinstance(doc, dict) or "n" not in doc or "generators" not in doc:
            raise ValueError('group document needs "n" and "generators"')
        n = int(doc["n"])
        gens = [check_permutation(g) for g in doc["generators"]]
        if any(len(g) != n for g in gens):
            raise ValueError(f"every generator must permute 1..{n}")
        return n, gens
    if args.n is None:
        raise ValueError("--n is required with cycle generators")
    return args.n, [parse_cycles(g, args.n) for g in args.generators]


def cmd_reduce_group(args) -> CommandResult:
    n, gens = _group_from_args(args)
    report = classify(gens, n, cap=args.cap)
    payload = {
        "n": n,
        "partition": [list(c) for c in report.orbit_partition.classes],
        "group_order": report.group_order,
        "is_product": report.is_product,
        "product_order": report.product_order,
    }
    if report.overflow:
        payload["overflow"] = True
        return CommandResult("overflow", payload, EXIT_OVERFLOW)
    return _ok(payload)


def _spec_from_args(law, args) -> BoxTestSpec:
    k = law.partition.k
    given = args.cls or []
    ms, As, Bs = args.m or [], args.A or [], args.B or []
    if not (len(given) == len(ms) == len(As) == len(Bs)):
        raise ValueError("each --class needs exactly one --m, --A and --B")
    specs = [ClassSpec(0, frozenset(), None)] * k
    seen = set()
    for j, m, a, b in zip(given, ms, As, Bs):
        if not 1 <= j <= k:
            raise ValueError(f"class index {j} outside 1..{k}")
        if j in seen:
            raise ValueError(f"class {j} given twice")
        seen.add(j)
        specs[j - 1] = parse_class_spec(m, a, b)
    return BoxTestSpec(tuple(specs))


def cmd_necessary(args) -> CommandResult:
    law = _read_valid_law(args.file)
    if args.scan:
        result = scan_specs(law, args.max_tail_points)
        rows = [{"spec": s.describe(), **_psd_payload(v)} for s, v in result.entries]
        payload = {"specs_scanned": len(rows), "any_failure": result.any_failure, "results": rows}
        return _verdict(payload, not result.any_failure)
    spec = _spec_from_args(law, args)
    M = necessary_matrix(law, spec)
    v = necessary_condition_check(law, spec)
    payload = {"spec": spec.describe(), "matrix": fmt_matrix(M), **_psd_payload(v)}
    return _verdict(payload, v.is_psd)


def cmd_counterexample(args) -> CommandResult:
    law = counterexample(args.n)
    checks = reinforcement_check(law)
    v = true_mixture_verdict(law, recover=False)
    payload = {
        "law": binary_law_to_json(law),
        "reinforcement": [{"i": i, "holds": ok} for i, ok in checks],
        "verdict": "YES" if v.verdict else "NO",
        "witness": None
        if v.verdict
        else {"matrix": v.witness_matrix, "minor": list(v.witness_minor), "det": fmt(v.witness_det)},
    }
    return _ok(payload)


def cmd_moments(args) -> CommandResult:
    doc = _read_json(args.file)
    if not isinstance(doc, dict) or args.source not in doc or not isinstance(doc[args.source], list):
        raise ValueError(f"document needs a list '{args.source}'")
    values = tuple(to_fraction(v) for v in doc[args.source])
    if not values:
        raise ValueError("empty vector")
    if args.source == "x":
        y = x_to_y(BinaryLawX(values))
        payload = {"n": y.n, "y": [fmt(v) for v in y.y], "moments": [fmt(v) for v in y.moments()]}
    else:
        x = y_to_x(MomentVectorY(values))
        payload = {"n": x.n, "x": [fmt(v) for v in x.x]}
    return _ok(payload)


def cmd_reinforcement(args) -> CommandResult:
    law = binary_law_from_json(_read_json(args.file), normalize=args.normalize)
    x = law.x
    checks = [
        {"i": i, "lhs": fmt(x[i] ** 2), "rhs": fmt(x[i - 1] * x[i + 1]), "holds": ok}
        for i, ok in reinforcement_check(law)
    ]
    all_pass = all(c["holds"] for c in checks)
    return _verdict({"n": law.n, "checks": checks, "all_pass": all_pass}, all_pass)


def cmd_validate(args) -> CommandResult:
    law = law_from_json(_read_json(args.file))
    report = validate(law)
    return _verdict(_validation_payload(report), report.valid)


def cmd_random_law(args) -> CommandResult:
    """Random binary law: a mixture of up to four rational atoms, or uniform x."""
    rng = random.Random(args.seed)
    n = args.n
    if args.kind == "mixture":
        k = rng.randint(1, 4)
        ps = [Fraction(rng.randint(0, 20), 20) for _ in range(k)]
        ws = [rng.randint(1, 10) for _ in range(k)]
        tot = sum(ws)
        x = tuple(sum(Fraction(w, tot) * p ** (n - i) * (1 - p) ** i for p, w in zip(ps, ws)) for i in range(n + 1))
    else:
        raw = [rng.randint(0, 50) for _ in range(n + 1)]
        if not any(raw):
            raw[0] = 1
        tot = sum(comb(n, i) * v for i, v in enumerate(raw))
        x = tuple(Fraction(v, tot) for v in raw)
    return _ok(binary_law_to_json(BinaryLawX(x)))


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="definetti", description="Finite exchangeability toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--output", choices=("json", "text"), default="json")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized helpers")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-mixture", help="is a binary law a true mixture of i.i.d. laws")
    s.add_argument("file")
    s.add_argument("--normalize", action="store_true", help="rescale x to total mass 1")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="float", action="store_false", help="exact test (default)")
    mode.add_argument("--float", dest="float", action="store_true", help="eigenvalue test")
    s.add_argument("--no-witness", dest="witness", action="store_false")
    s.add_argument("--tol", type=float, default=1e-9, help="moment tolerance for recovery")
    s.set_defaults(func=cmd_check_mixture, float=False)

    s = sub.add_parser("represent", help="signed directing measure of a law")
    s.add_argument("file")
    s.set_defaults(func=cmd_represent)

    s = sub.add_parser("reduce-group", help="orbit partition of a permutation group")
    s.add_argument("--n", type=int)
    s.add_argument("generators", nargs="*", help='cycle notation such as "(1 2)(3 4)"')
    s.add_argument("--file", help='JSON {"n": 4, "generators": [[2, 1, 3, 4]]} in image form, or "-"')
    s.add_argument("--cap", type=int, default=10**6)
    s.set_defaults(func=cmd_reduce_group)

    s = sub.add_parser("necessary", help="necessary-condition PSD test")
    s.add_argument("file")
    s.add_argument("--class", dest="cls", type=int, action="append")
    s.add_argument("--m", type=int, action="append")
    s.add_argument("--A", action="append")
    s.add_argument("--B", action="append")
    s.add_argument("--scan", action="store_true")
    s.add_argument("--max-tail-points", type=int, default=1)
    s.set_defaults(func=cmd_necessary)

    s = sub.add_parser("counterexample", help="log-convex binary law that is not a mixture")
    s.add_argument("n", type=int)
    s.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("moments", help="convert between x and y vectors")
    s.add_argument("file")
    s.add_argument("--from", dest="source", choices=("x", "y"), default="x")
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("reinforcement", help="check x_i^2 <= x_{i-1} x_{i+1}")
    s.add_argument("file")
    s.add_argument("--normalize", action="store_true")
    s.set_defaults(func=cmd_reinforcement)

    s = sub.add_parser("validate", help="check a general law")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("random-law", help="random rational binary law (uses --seed)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--kind", choices=("mixture", "uniform"), default="mixture")
    s.set_defaults(func=cmd_random_law)
    return p


def run(argv=None) -> CommandResult:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GuardExceeded as exc:
        return CommandResult("overflow", {"error": str(exc)}, EXIT_OVERFLOW)
    except (ValueError, KeyError, TypeError, IndexError, OSError) as exc:
        return CommandResult("invalid-input", {"error": str(exc)}, EXIT_INVALID)


def _render_text(value, indent=0) -> list:
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for key, v in value.items():
            if isinstance(v, (dict, list)) and v and not _is_flat(v):
                lines.append(f"{pad}{key}:")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_inline(v)}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, (dict, list)) and not _is_flat(v):
                lines.append(f"{pad}-")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(f"{pad}{_inline(value)}")
    return lines


def _is_flat(v) -> bool:
    if isinstance(v, dict):
        return False
    return all(not isinstance(e, (dict, list)) or (isinstance(e, list) and _is_flat(e)) for e in v)


def _inline(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_inline(e) for e in v) + "]"
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def dumps(value, indent=0) -> str:
    """JSON with lists of scalars kept on one line."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        body = ",\n".join(f"{inner}{json.dumps(k)}: {dumps(v, indent + 1)}" for k, v in value.items())
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(value, list) and any(isinstance(v, (dict, list)) for v in value):
        if all(isinstance(v, list) and not any(isinstance(e, (dict, list)) for e in v) for v in value):
            return "[" + ", ".join(json.dumps(v) for v in value) + "]"
        body = ",\n".join(f"{inner}{dumps(v, indent + 1)}" for v in value)
        return "[\n" + body + "\n" + pad + "]"
    return json.dumps(value)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    result = run(argv)
    doc = {"status": result.status, **result.payload}
    if args.output == "json":
        print(dumps(doc))
    else:
        print("\n".join(_render_text(doc)))
    return result.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
