"""Command-line front end.

Subcommands: generate, run, verify, trace, inspect. Exit codes: 0 success /
verification pass, 1 verification failure, 2 malformed input, 3 precondition
failure, 4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import sys

from .augment import aug_sort_key, format_aug
from .chains import check_instance
from .errors import InternalInvariantError, MalformedInputError, PreconditionError
from .generators import KINDS, SPACE_KINDS, gen_instance
from .instance_io import (
    instance_to_doc,
    load_instance,
    load_output,
    parse_subsets,
    write_canonical,
)
from .rational import format_rational
from .tailor import classify, run_pipeline
from .verify import verify_certificate, verify_naive


def _format_chain(chain) -> str:
    return " ".join(f"{format_aug(p)}:{chain[p]}" for p in sorted(chain, key=aug_sort_key))


def _gen_params(args) -> dict:
    params = {}
    simple = {
        "count": args.count,
        "step": args.step,
        "rows": args.rows,
        "cols": args.cols,
        "min_len": args.min_len,
        "max_len": args.max_len,
        "gap": args.gap,
        "n": args.n,
        "folner_radius": args.folner_radius,
    }
    for key, value in simple.items():
        if value is not None:
            params[key] = value
    if args.radii is not None:
        params["radii"] = [r.strip() for r in args.radii.split(",") if r.strip()]
    if args.generators is not None:
        params["generators"] = [int(g) for g in args.generators.split(",") if g.strip()]
    if args.unbounded:
        params["unbounded"] = True
    if args.no_emulate_unbounded:
        params["emulate_unbounded"] = False
    params["R"] = args.R
    params["epsilon"] = args.epsilon
    if args.kind == "weighted_ball":
        space_kind = args.space_kind or "disjoint_union_paths"
        inner = {k: v for k, v in params.items() if k not in ("radii", "R", "epsilon")}
        params = {
            "space": {"kind": space_kind, "params": inner},
            "R": args.R,
            "epsilon": args.epsilon,
        }
        if args.radii is not None:
            params["radii"] = [r.strip() for r in args.radii.split(",") if r.strip()]
    return params


def cmd_generate(args) -> int:
    space, family, params = gen_instance(args.kind, _gen_params(args), args.seed)
    doc = instance_to_doc(space, family, params)
    write_canonical(args.out, doc)
    print(f"wrote {args.out}: {len(space.points)} points, S={format_rational(params.S)}")
    return 0


def cmd_run(args) -> int:
    instance = load_instance(args.instance)
    trace_lines = []
    tracer = None
    if args.trace:
        tracer = lambda x, n, chain: trace_lines.append(f"{x} {n} {_format_chain(chain)}")
    subsets, certificate = run_pipeline(
        instance.space,
        instance.family,
        instance.params.R,
        instance.params.epsilon,
        instance.params.S,
        jobs=args.jobs,
        tracer=tracer,
    )
    from .instance_io import output_to_jsonable

    write_canonical(args.out, output_to_jsonable(subsets, certificate))
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write("\n".join(trace_lines) + ("\n" if trace_lines else ""))
    print(
        f"wrote {args.out}: worst ratio {certificate.to_jsonable()['worst_ratio']}, "
        f"worst radius {format_rational(certificate.worst_radius)}"
    )
    return 0


def cmd_verify(args) -> int:
    instance = load_instance(args.instance)
    subsets_raw, certificate_raw = load_output(args.output)
    subsets = parse_subsets(subsets_raw)
    anchors = {h.ray[-1] for h in instance.space.hints}
    naive = verify_naive(
        instance.space,
        subsets,
        instance.params.R,
        instance.params.epsilon,
        tail_spacing=instance.params.S,
        hint_anchors=anchors,
    )
    cert = verify_certificate(
        instance.space, instance.family, instance.params, subsets_raw, certificate_raw
    )
    ok = naive.ok and cert.ok
    print(f"naive check: {'PASS' if naive.ok else 'FAIL'} {naive.stats}")
    if not naive.ok:
        for v in naive.violations[:10]:
            print(f"  {v}")
    print(f"certificate check: {'PASS' if cert.ok else 'FAIL'}")
    if not cert.ok:
        for v in cert.violations[:10]:
            print(f"  {v}")
    return 0 if ok else 1


def cmd_trace(args) -> int:
    from .augment import augment
    from .flow import build_flow, stabilize
    from .space import rips_components

    instance = load_instance(args.instance)
    if args.point not in instance.space.point_set:
        raise MalformedInputError(f"unknown point {args.point!r}")
    report = check_instance(
        instance.space,
        instance.family,
        instance.params.R,
        instance.params.epsilon,
        instance.params.S,
    )
    if not report.ok:
        raise PreconditionError("instance fails admission", report=report)
    decomp, _ = classify(
        instance.space, rips_components(instance.space, report.params.S), report.params
    )
    flow_map = build_flow(augment(instance.space, decomp, report.params))
    chain = instance.family.chains[args.point]
    lines = [f"0 {_format_chain(chain)}"]
    stabilize(flow_map, chain, on_iterate=lambda n, c: lines.append(f"{n} {_format_chain(c)}"))
    for line in lines:
        print(line)
    return 0


def cmd_inspect(args) -> int:
    from .space import rips_components

    instance = load_instance(args.instance)
    report = check_instance(
        instance.space,
        instance.family,
        instance.params.R,
        instance.params.epsilon,
        instance.params.S,
    )
    params = report.params
    print(f"points: {len(instance.space.points)}")
    print(
        f"params: R={format_rational(params.R)} epsilon={format_rational(params.epsilon)} "
        f"S={format_rational(params.S)} L={params.L} N={params.N}"
    )
    print(f"admission: {'PASS' if report.ok else 'FAIL'} ({len(report.violations)} violations)")
    decomp, plan = classify(instance.space, rips_components(instance.space, params.S), params)
    print(f"components: {len(decomp.components)}")
    for comp in decomp.components:
        extra = ""
        if comp.ray:
            extra = f" ray_length={len(comp.ray)}"
        if comp.index in plan.z_points:
            extra += f" markers={len(plan.z_points[comp.index])}"
        print(
            f"  [{comp.index}] size={len(comp.points)} basepoint={comp.basepoint} "
            f"class={comp.cls}{extra}"
        )
    for warning in plan.warnings:
        print(f"warning: {warning}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="naivea",
        description="Convert weighted covering witnesses into certified subset families.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a seeded instance file")
    gen.add_argument("kind", choices=KINDS)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--count", "--length", dest="count", type=int)
    gen.add_argument("--paths", dest="count", type=int, help="alias for --count")
    gen.add_argument("--step")
    gen.add_argument("--rows", type=int)
    gen.add_argument("--cols", type=int)
    gen.add_argument("--min-len", dest="min_len", type=int)
    gen.add_argument("--max-len", dest="max_len", type=int)
    gen.add_argument("--gap", type=int)
    gen.add_argument("--n", type=int)
    gen.add_argument("--k", "--folner-radius", dest="folner_radius", type=int)
    gen.add_argument("--generators")
    gen.add_argument("--radii", help="comma-separated, non-increasing")
    gen.add_argument("--unbounded", action="store_true")
    gen.add_argument("--no-emulate-unbounded", action="store_true")
    gen.add_argument("--space-kind", choices=SPACE_KINDS)
    gen.add_argument("--R", default="1")
    gen.add_argument("--epsilon", default="1")
    gen.set_defaults(func=cmd_generate)

    run = sub.add_parser("run", help="run the pipeline on an instance file")
    run.add_argument("instance")
    run.add_argument("--out", required=True)
    run.add_argument("--trace", help="write per-iteration flow traces to this file")
    run.add_argument("--jobs", type=int, default=1)
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="verify an output file against its instance")
    ver.add_argument("instance")
    ver.add_argument("output")
    ver.set_defaults(func=cmd_verify)

    tr = sub.add_parser("trace", help="print the flow iterations for one point")
    tr.add_argument("instance")
    tr.add_argument("--point", required=True)
    tr.set_defaults(func=cmd_trace)

    ins = sub.add_parser("inspect", help="summarize an instance")
    ins.add_argument("instance")
    ins.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except MalformedInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        if exc.report is not None:
            for v in exc.report.to_jsonable()["violations"][:20]:
                print(f"  {v}", file=sys.stderr)
        return 3
    except InternalInvariantError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
