"""Command-line front door: flagdesic check|canonicalize|closedness|curve|examples|roots.

Exit codes: 0 affirmative, 1 negative, 2 usage or parse error, 3 undetermined.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .closure import (
    AllZeroSpectrum,
    Closedness,
    is_killing_closed,
    spectral_data,
)
from .documents import (
    DocumentError,
    fixture_document,
    fixture_names,
    parse_metric_document,
    parse_vector_document,
    serialize_vector,
)
from .equigeo import (
    NotEquigeodesic,
    canonicalize,
    equigeodesic_certificate,
    is_equigeodesic,
    is_geodesic_vector,
)
from .flag import FlagPartition, TangentVector, build_roots, off_block_positions, t_roots
from .linalg import ExactSpectrumUnavailable, Mode, unitary_exp


class _CliError(Exception):
    def __init__(self, message, code=2):
        super().__init__(message)
        self.code = code


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _CliError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise _CliError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}")


def _load_vector(path: str, requested_mode: str):
    x = parse_vector_document(_load_json(path))
    if requested_mode == "exact":
        if x.mode is not Mode.EXACT:
            raise _CliError(
                f"{path}: document is in float mode; exact computation needs an exact document"
            )
        return x
    return x.to_float()


def _write_out(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_check(args) -> int:
    x = _load_vector(args.vector, args.mode)
    if args.metric is not None:
        g = parse_metric_document(_load_json(args.metric), x.partition)
        ok, residual = is_geodesic_vector(x, g, args.tol)
        print(f"geodesic (fixed metric): {str(ok).lower()}  residual {residual:.3e}")
        return 0 if ok else 1
    block = is_equigeodesic(x, args.tol)
    cert = equigeodesic_certificate(x, args.tol)
    for v in (block, cert):
        line = f"equigeodesic ({v.method}): {str(v.is_equigeodesic).lower()}"
        line += f"  worst residual {v.worst_residual:.3e}"
        if v.violating_triple is not None:
            line += f"  violating triple {v.violating_triple}"
        print(line)
    return 0 if (block.is_equigeodesic and cert.is_equigeodesic) else 1


def _cmd_canonicalize(args) -> int:
    x = _load_vector(args.vector, "float")
    try:
        form = canonicalize(x)
    except NotEquigeodesic as exc:
        print(f"not equigeodesic: {exc}", file=sys.stderr)
        return 1
    print("pairs (row, col, value):")
    for r, c, a in form.pairs:
        print(f"  ({r}, {c})  {a:.12g}")
    print(f"residual {form.residual:.3e}")
    doc = serialize_vector_with_canonical(x, form)
    _write_out(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def serialize_vector_with_canonical(x, form) -> dict:
    j_doc = serialize_vector(TangentVector(x.partition, form.J))
    u_data = [
        [[float(v.real), float(v.imag)] for v in row] for row in form.U.data
    ]
    return {
        "J": j_doc,
        "U": u_data,
        "pairs": [[r, c, a] for r, c, a in form.pairs],
        "residual": form.residual,
    }


def _cmd_closedness(args) -> int:
    x = _load_vector(args.vector, args.mode)
    try:
        sd = spectral_data(x)
    except ExactSpectrumUnavailable as exc:
        raise _CliError(f"{exc}; rerun with --mode float")
    try:
        verdict = is_killing_closed(x, args.bound)
    except AllZeroSpectrum:
        raise _CliError("the zero vector has no period (constant curve)")
    thetas = "  ".join(f"{t:.12g}" for t in sd.thetas)
    print(f"spectrum (i * theta): {thetas}")
    print(f"status: {verdict.status.value}")
    if verdict.status is Closedness.COMMENSURATE:
        print(f"base frequency: {verdict.base_frequency:.12g}")
        print(f"period: {verdict.period:.12g}")
        print("multipliers: " + " ".join(str(m) for m in verdict.multipliers))
        return 0
    if verdict.status is Closedness.UNDETERMINED:
        if verdict.bound_used is not None:
            print(f"denominator bound: {verdict.bound_used}")
        return 3
    if verdict.bound_used is not None:
        print(f"denominator bound: {verdict.bound_used}")
    return 1


def _cmd_curve(args) -> int:
    x = _load_vector(args.vector, "float")
    p = x.partition
    positions = off_block_positions(p)
    if args.t_max < 0:
        raise _CliError("--t-max must be nonnegative")
    if args.t_max == 0:
        ts = [0.0]
    else:
        if args.samples < 1:
            raise _CliError("--samples must be at least 1")
        ts = [args.t_max * k / args.samples for k in range(args.samples + 1)]
    header = ["t"]
    for r, c in positions:
        header.extend([f"re_{r + 1}_{c + 1}", f"im_{r + 1}_{c + 1}"])
    header.append("dist_k")

    rows = []
    for t in ts:
        u = unitary_exp(x.matrix, t).data
        row = [f"{t:.12g}"]
        dist = 0.0
        for r, c in positions:
            v = u[r, c]
            row.extend([f"{v.real:.15g}", f"{v.imag:.15g}"])
            dist += abs(v) ** 2
        row.append(f"{math.sqrt(dist):.15g}")
        rows.append(row)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _write_out(buf.getvalue(), args.out)
    return 0


def _cmd_examples(args) -> int:
    if args.list:
        for name in fixture_names():
            print(name)
        return 0
    if args.name is None:
        raise _CliError("give a fixture name or --list")
    try:
        doc = fixture_document(args.name, args.mode)
    except KeyError:
        raise _CliError(
            f"unknown example {args.name!r}; available: {', '.join(fixture_names())}"
        )
    _write_out(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def _cmd_roots(args) -> int:
    try:
        p = FlagPartition(tuple(args.parts))
    except ValueError as exc:
        raise _CliError(str(exc))
    k_pos, m_pos = build_roots(p)
    troots = t_roots(p)
    print(f"partition: {p.parts}  n = {p.total}")
    print(f"positive K-roots: {len(k_pos)}")
    print(f"positive M-roots: {len(m_pos)}")
    print(f"isotropy modules s(s-1)/2: {len(troots)}")
    print("positive T-roots: " + " ".join(f"({t.i},{t.j})" for t in troots))
    print(f"dim m: {p.dim_m()}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flagdesic",
        description="Equigeodesic vectors on flag manifolds: certification, "
        "canonical forms, and Killing-field closedness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, mode=True, tol=False, bound=False, out=False):
        if mode:
            sp.add_argument("--mode", choices=["float", "exact"], default="float")
        if tol:
            sp.add_argument("--tol", type=float, default=1e-8)
        if bound:
            sp.add_argument("--bound", type=int, default=1000000)
        if out:
            sp.add_argument("--out", default=None, help="output file (default stdout)")

    sp = sub.add_parser("check", help="equigeodesic / geodesic verdicts for a vector file")
    sp.add_argument("vector")
    sp.add_argument("metric", nargs="?", default=None, help="optional metric file")
    add_common(sp, tol=True)
    sp.set_defaults(func=_cmd_check)

    sp = sub.add_parser("canonicalize", help="block-unitary essentially diagonal form")
    sp.add_argument("vector")
    add_common(sp, mode=False, out=True)
    sp.set_defaults(func=_cmd_canonicalize)

    sp = sub.add_parser("closedness", help="Killing-field closedness via the spectrum")
    sp.add_argument("vector")
    add_common(sp, bound=True)
    sp.set_defaults(func=_cmd_closedness)

    sp = sub.add_parser("curve", help="sample exp(tA) along the curve into CSV")
    sp.add_argument("vector")
    sp.add_argument("--t-max", type=float, required=True, dest="t_max")
    sp.add_argument("--samples", type=int, default=200)
    add_common(sp, mode=False, out=True)
    sp.set_defaults(func=_cmd_curve)

    sp = sub.add_parser("examples", help="emit a built-in example document")
    sp.add_argument("name", nargs="?", default=None)
    sp.add_argument("--list", action="store_true")
    add_common(sp, out=True)
    sp.set_defaults(func=_cmd_examples)

    sp = sub.add_parser("roots", help="root and module counts for a partition")
    sp.add_argument("parts", nargs="+", type=int)
    add_common(sp, mode=False)
    sp.set_defaults(func=_cmd_roots)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
