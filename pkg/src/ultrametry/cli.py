"""Batch command-line front end.

Exit codes: 0 for an affirmative outcome (valid, found, extended), 1 for a
definite negative with a certificate (invalid with witness, blocked with
regime, nothing found), 2 for usage or input errors.  All numbers print as
exact rationals; --approx adds a clearly marked decimal rendering.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import extension, generators, preserving, wsim
from .distsets import (
    classify,
    components,
    descriptor_to_json,
    from_finite,
    is_totally_bounded_distance_set,
    load_descriptor,
    supremum,
)
from .errors import UltrametryError
from .rationals import approx_decimal, format_bound, format_rational, parse_rational
from .spaces import (
    Verdict,
    distance_set,
    load_space,
    space_to_json,
    validate,
)


def _print_value(label: str, value: Fraction, args) -> None:
    text = f"{label} = {format_rational(value)}"
    if args.approx:
        text += f"  (≈ {approx_decimal(value, args.approx)})"
    print(text)


def _emit(args, obj: dict, human: str) -> None:
    if args.json:
        print(json.dumps(obj, indent=2))
    else:
        print(human)


def _cmd_validate(args) -> int:
    space = load_space(args.space, require_valid=False)
    report = validate(space)
    obj = {"verdict": report.verdict.value}
    if report.witness is not None:
        obj["witness"] = list(report.witness)
        obj["reason"] = report.reason
    _emit(args, obj, str(report))
    return 0 if report.verdict is not Verdict.NOT_PSEUDOULTRAMETRIC else 1


def _cmd_distset(args) -> int:
    space = load_space(args.space)
    ds = distance_set(space)
    descriptor = from_finite(ds.values)
    human = "{" + ", ".join(format_rational(v) for v in ds.values) + "}"
    _emit(args, descriptor_to_json(descriptor), human)
    return 0


def _cmd_components(args) -> int:
    descriptor = load_descriptor(args.descriptor)
    decomp = components(descriptor)
    entries = []
    lines = []
    for entry in decomp.entries:
        if hasattr(entry, "shape"):
            entries.append({"kind": "interval", "interval": str(entry), "shape": entry.shape.value})
            lines.append(f"{str(entry):<16} {entry.shape.value}")
        else:
            entries.append(
                {
                    "kind": "gap_family",
                    "sequence_index": entry.sequence_index,
                    "excluded_gaps": list(entry.excluded_gaps),
                }
            )
            lines.append(str(entry))
    _emit(args, {"components": entries}, "\n".join(lines))
    return 0


def _cmd_classify(args) -> int:
    descriptor = load_descriptor(args.descriptor)
    regime = classify(descriptor)
    obj = {"tag": regime.tag.value}
    if regime.witness is not None:
        obj["witness"] = str(regime.witness)
    _emit(args, obj, str(regime))
    return 0


def _cmd_tb_check(args) -> int:
    descriptor = load_descriptor(args.descriptor)
    ok = is_totally_bounded_distance_set(descriptor)
    sup, attained = supremum(descriptor)
    obj = {"totally_bounded": ok, "supremum": format_bound(sup, ascii_inf=True), "attained": attained}
    _emit(args, obj, "totally bounded" if ok else "not totally bounded")
    return 0 if ok else 1


def _scaling_table(psi: wsim.ScalingFunction, args) -> str:
    width = max(len(format_rational(t)) for t, _ in psi.pairs)
    rows = []
    for t, v in psi.pairs:
        row = f"{format_rational(t):>{width}}  ↦  {format_rational(v)}"
        if args.approx:
            row += f"  (≈ {approx_decimal(v, args.approx)})"
        rows.append(row)
    return "\n".join(rows)


def _cmd_wsim_check(args) -> int:
    x = load_space(args.space_x)
    y = load_space(args.space_y)
    phi = wsim.load_bijection(args.bijection)
    result = wsim.check_weak_similarity(x, y, phi)
    if isinstance(result, wsim.ScalingFunction):
        obj = {
            "weak_similarity": True,
            "scaling": {format_rational(t): format_rational(v) for t, v in result.pairs},
        }
        _emit(args, obj, _scaling_table(result, args))
        return 0
    _emit(args, {"weak_similarity": False, "witness": str(result)}, f"not a weak similarity\n{result}")
    return 1


def _cmd_wsim_find(args) -> int:
    x = load_space(args.space_x)
    y = load_space(args.space_y)
    found = wsim.find_weak_similarities(x, y, limit=args.limit)
    if args.json:
        obj = {
            "count": len(found),
            "weak_similarities": [
                {"bijection": {s: t for s, t in phi.pairs},
                 "scaling": {format_rational(t): format_rational(v) for t, v in psi.pairs}}
                for phi, psi in found
            ],
        }
        print(json.dumps(obj, indent=2))
    else:
        if found:
            _, psi = found[0]
            print(f"{len(found)} weak similarit{'y' if len(found) == 1 else 'ies'} found")
            for phi, _ in found:
                print(f"  {phi}")
            print("shared scaling function:")
            print(_scaling_table(psi, args))
        else:
            print("no weak similarity exists")
    return 0 if found else 1


def _verified(x, y, phi) -> wsim.WeakSimilarity:
    result = wsim.check_weak_similarity(x, y, phi)
    if not isinstance(result, wsim.ScalingFunction):
        raise UltrametryError(f"not a weak similarity: {result}")
    return phi, result


def _cmd_wsim_compose(args) -> int:
    x = load_space(args.space_x)
    y = load_space(args.space_y)
    z = load_space(args.space_z)
    try:
        ws1 = _verified(x, y, wsim.load_bijection(args.phi1))
        ws2 = _verified(y, z, wsim.load_bijection(args.phi2))
    except UltrametryError as exc:
        _emit(args, {"weak_similarity": False, "witness": str(exc)}, str(exc))
        return 1
    phi, psi = wsim.compose(ws1, ws2)
    obj = {
        "bijection": {s: t for s, t in phi.pairs},
        "scaling": {format_rational(t): format_rational(v) for t, v in psi.pairs},
    }
    _emit(args, obj, f"{phi}\n{_scaling_table(psi, args)}")
    return 0


def _cmd_scaling_invert(args) -> int:
    x = load_space(args.space_x)
    y = load_space(args.space_y)
    try:
        ws = _verified(x, y, wsim.load_bijection(args.bijection))
    except UltrametryError as exc:
        _emit(args, {"weak_similarity": False, "witness": str(exc)}, str(exc))
        return 1
    phi, psi = wsim.invert(ws)
    obj = {
        "bijection": {s: t for s, t in phi.pairs},
        "scaling": {format_rational(t): format_rational(v) for t, v in psi.pairs},
    }
    _emit(args, obj, f"{phi}\n{_scaling_table(psi, args)}")
    return 0


def _cmd_preserve_classify(args) -> int:
    f = preserving.load_function(args.function)
    verdict = preserving.classify_preserving(f)
    obj = {
        "tag": verdict.tag.value,
        "strictly_increasing": verdict.strictly_increasing,
    }
    if verdict.witness is not None:
        obj["witness"] = str(verdict.witness)
    _emit(args, obj, str(verdict))
    return 1 if verdict.tag is preserving.PreservingTag.NOT_PRESERVING else 0


def _cmd_preserve_falsify(args) -> int:
    f = preserving.load_function(args.function)
    hit = preserving.empirical_falsify(f, args.trials, args.seed, threads=args.threads)
    if hit is None:
        _emit(args, {"counterexample": None, "trials": args.trials},
              f"no counterexample in {args.trials} trials")
        return 1
    obj = {
        "counterexample": space_to_json(hit.space),
        "composed": space_to_json(hit.composed),
        "violation": str(hit.report),
        "trial": hit.trial,
    }
    human = (
        f"counterexample on trial {hit.trial}: space {list(hit.space.labels)}\n"
        f"composed matrix verdict: {hit.report}"
    )
    _emit(args, obj, human)
    return 0


def _cmd_transform(args, *, bound: bool) -> int:
    space = load_space(args.space)
    d_star = parse_rational(args.dstar)
    if bound:
        result = preserving.bounded_transform(space, d_star)
    else:
        result = preserving.unbounded_transform(space, d_star)
    print(json.dumps(space_to_json(result), indent=2))
    return 0


def _cmd_extend(args) -> int:
    psi = extension.load_scaling(args.scaling)
    mode = {
        "strict": extension.extend_strict,
        "ultra": extension.extend_ultra,
        "pseudo": extension.extend_pseudo,
    }[args.mode]
    result = mode(psi)
    points = [parse_rational(t) for t in args.at.split(",")] if args.at else []
    if isinstance(result, extension.Blocked):
        obj = {
            "outcome": "Blocked",
            "regime": result.regime.tag.value,
            "witness": str(result.regime.witness),
            "reason": result.reason,
        }
        _emit(args, obj, str(result))
        return 1
    values = {format_rational(t): format_rational(result.g.eval(t)) for t in points}
    if args.json:
        print(json.dumps({"outcome": "Extended", "values": values}, indent=2))
    else:
        print("Extended")
        for t in points:
            _print_value(f"g({format_rational(t)})", result.g.eval(t), args)
    return 0


def _cmd_gap_collapse(args) -> int:
    descriptor = load_descriptor(args.descriptor)
    psi = extension.gap_collapse_scaling(descriptor, parse_rational(args.a), parse_rational(args.b))
    print(json.dumps(extension.scaling_to_json(psi), indent=2))
    return 0


def _cmd_generate(args) -> int:
    if args.kind == "random":
        pool = [parse_rational(v) for v in args.pool.split(",")] if args.pool else [
            Fraction(1), Fraction(2), Fraction(3), Fraction(4)
        ]
        space = generators.random_space(args.n, args.seed, pool)
    elif args.kind == "max":
        if not args.values:
            raise UltrametryError("--values is required for the max construction")
        space = generators.max_space([parse_rational(v) for v in args.values.split(",")])
    elif args.kind == "p532":
        space = generators.p532_counterexample(parse_rational(args.a), parse_rational(args.b))
    else:  # dendrogram
        if not args.file:
            raise UltrametryError("--file is required for dendrogram input")
        space = generators.dendrogram_to_space(generators.load_dendrogram(args.file))
    print(json.dumps(space_to_json(space), indent=2))
    return 0


def _cmd_ex530(args) -> int:
    space_d, space_delta = generators.ex530_pair(args.n)
    obj = {"d": space_to_json(space_d), "delta": space_to_json(space_delta)}
    print(json.dumps(obj, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ultrametry", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--approx", type=int, default=0, metavar="K",
                       help="append a K-digit decimal rendering (approximate)")
        return p

    p = add("validate", help="check the axioms of a space file")
    p.add_argument("space")

    p = add("distset", help="distance set of a space (JSON form is a descriptor)")
    p.add_argument("space")

    p = add("components", help="components of the complement of a descriptor")
    p.add_argument("descriptor")

    p = add("classify", help="extension regime of a descriptor")
    p.add_argument("descriptor")

    p = add("tb-check", help="totally-bounded shape test for a descriptor")
    p.add_argument("descriptor")

    p = add("wsim-check", help="verify a bijection as a weak similarity")
    p.add_argument("space_x")
    p.add_argument("space_y")
    p.add_argument("bijection")

    p = add("wsim-find", help="enumerate weak similarities between two spaces")
    p.add_argument("space_x")
    p.add_argument("space_y")
    p.add_argument("--limit", type=int, default=1000)

    p = add("wsim-compose", help="compose two verified weak similarities")
    p.add_argument("space_x")
    p.add_argument("space_y")
    p.add_argument("space_z")
    p.add_argument("phi1")
    p.add_argument("phi2")

    p = add("scaling-invert", help="invert a verified weak similarity")
    p.add_argument("space_x")
    p.add_argument("space_y")
    p.add_argument("bijection")

    p = add("preserve-classify", help="classify a piecewise function")
    p.add_argument("function")

    p = add("preserve-falsify", help="hunt a counterexample space for a function")
    p.add_argument("function")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)

    p = add("transform-bound", help="rescale distances below a bound d*")
    p.add_argument("space")
    p.add_argument("--dstar", required=True)

    p = add("transform-unbound", help="invert the bounded rescaling")
    p.add_argument("space")
    p.add_argument("--dstar", required=True)

    p = add("extend", help="extend a scaling beyond its distance set")
    p.add_argument("scaling")
    p.add_argument("--mode", choices=["strict", "ultra", "pseudo"], required=True)
    p.add_argument("--at", default="", help="comma-separated evaluation points")

    p = add("gap-collapse", help="build the scaling collapsing a half-open gap")
    p.add_argument("descriptor")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)

    p = add("generate", help="construct a space")
    p.add_argument("--kind", choices=["random", "max", "p532", "dendrogram"], default="random")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pool", default="", help="comma-separated levels for random spaces")
    p.add_argument("--values", default="", help="comma-separated values for the max construction")
    p.add_argument("--a", default="1")
    p.add_argument("--b", default="2")
    p.add_argument("--file", default="", help="dendrogram JSON file")

    p = add("ex530", help="emit the weakly similar example pair on 1, 1/2, ..., 1/n")
    p.add_argument("--n", type=int, default=4)

    return parser


_HANDLERS = {
    "validate": _cmd_validate,
    "distset": _cmd_distset,
    "components": _cmd_components,
    "classify": _cmd_classify,
    "tb-check": _cmd_tb_check,
    "wsim-check": _cmd_wsim_check,
    "wsim-find": _cmd_wsim_find,
    "wsim-compose": _cmd_wsim_compose,
    "scaling-invert": _cmd_scaling_invert,
    "preserve-classify": _cmd_preserve_classify,
    "preserve-falsify": _cmd_preserve_falsify,
    "transform-bound": lambda args: _cmd_transform(args, bound=True),
    "transform-unbound": lambda args: _cmd_transform(args, bound=False),
    "extend": _cmd_extend,
    "gap-collapse": _cmd_gap_collapse,
    "generate": _cmd_generate,
    "ex530": _cmd_ex530,
}


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _HANDLERS[args.command](args)
    except UltrametryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
