"""Command-line front end.

Subcommands:

  build     construct the code from two check matrices and print the report
  params    print just the [[n, k; c]] parameters and rates
  verify    build, then run the four-part verification; exit 4 on failure
  examples  run the two bundled single-generator examples end to end

Check matrices are given with --h1/--h2 as either a file path or an inline
matrix (rows separated by ';', entries by ',', polynomial grammar for the
entries).  Exit codes: 0 success, 2 parse error, 3 validation error, 4
verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .construct import build_code, code_params
from .errors import EaqconvError, PolyParseError, ValidationError
from .gates import format_gate
from .polymat import format_matrix, parse_matrix
from .simulate import verify_code

SCHEMA_VERSION = 1

EXAMPLES = {
    "finite-depth": ("1+D^2, 1+D+D^2", "1+D^2, 1+D+D^2"),
    "infinite-depth": ("1, 1+D", "1, 1+D"),
}


def _load_matrix(arg: str):
    if os.path.exists(arg):
        with open(arg, "r", encoding="utf-8") as fh:
            return parse_matrix(fh.read())
    return parse_matrix(arg.replace(";", "\n"))


def _qcm_lines(qcm):
    zs = format_matrix(qcm.z).splitlines()
    xs = format_matrix(qcm.x).splitlines()
    labels = qcm.row_labels or tuple("" for _ in zs)
    out = []
    for z, x, lab in zip(zs, xs, labels):
        tag = f"  [{lab}]" if lab else ""
        out.append(f"  ( {z} | {x} ){tag}")
    return out or ["  (empty)"]


def _qcm_json(qcm):
    return {
        "bob_cols": qcm.bob_cols,
        "z": format_matrix(qcm.z).splitlines(),
        "x": format_matrix(qcm.x).splitlines(),
        "row_labels": list(qcm.row_labels),
    }


def _spec_report_text(spec):
    lines = []
    lines.append(f"[[{spec.n}, {spec.k}; {spec.c}]] entanglement-assisted quantum convolutional code")
    lines.append(f"class: {spec.class_tag} (unit invariant factors: {spec.s} of {spec.c})")
    lines.append(f"invariant factors of H1*H2~: {', '.join(str(g) for g in spec.record.product_factors) or '(none)'}")
    lines.append(
        "rates: entanglement-assisted "
        f"{spec.rates.entanglement_assisted}, trade-off ({spec.rates.tradeoff[0]}, {spec.rates.tradeoff[1]}), "
        f"catalytic {spec.rates.catalytic}"
    )
    lines.append(f"encoder ({len(spec.encoder)} gates):")
    lines.extend(f"  {format_gate(g)}" for g in spec.encoder)
    lines.append(f"decoder ({len(spec.decoder)} gates):")
    lines.extend(f"  {format_gate(g)}" for g in spec.decoder)
    lines.append("final stabilizer (Z | X), receiver columns first:")
    lines.extend(_qcm_lines(spec.final_stabilizer))
    lines.append("measurable stabilizer (denominators cleared):")
    lines.extend(_qcm_lines(spec.measurable_stabilizer))
    lines.append(f"  row multipliers: {', '.join(str(m) for m in spec.measurement_multipliers) or '(none)'}")
    lines.append("logical operators (unencoded):")
    lines.extend(_qcm_lines(spec.bare.info))
    cols = ", ".join(str(c + 1) for c in spec.logical_cols) or "(none)"
    dcols = ", ".join(str(c + 1) for c in spec.decoded_cols) or "(none)"
    offs = ", ".join("?" if o is None else str(o) for o in spec.decoded_offsets) or "(none)"
    lines.append(f"information columns: {cols}; decoded to: {dcols}; frame offsets: {offs}")
    return "\n".join(lines)


def _spec_report_json(spec):
    return {
        "schema": SCHEMA_VERSION,
        "n": spec.n,
        "k": spec.k,
        "c": spec.c,
        "s": spec.s,
        "class": spec.class_tag,
        "invariant_factors": [str(g) for g in spec.record.product_factors],
        "rates": {
            "entanglement_assisted": str(spec.rates.entanglement_assisted),
            "tradeoff": [str(spec.rates.tradeoff[0]), str(spec.rates.tradeoff[1])],
            "catalytic": str(spec.rates.catalytic),
        },
        "encoder": [format_gate(g) for g in spec.encoder],
        "decoder": [format_gate(g) for g in spec.decoder],
        "final_stabilizer": _qcm_json(spec.final_stabilizer),
        "measurable_stabilizer": _qcm_json(spec.measurable_stabilizer),
        "measurement_multipliers": [str(m) for m in spec.measurement_multipliers],
        "logical_columns": [c + 1 for c in spec.logical_cols],
        "decoded_columns": [c + 1 for c in spec.decoded_cols],
        "decoded_offsets": list(spec.decoded_offsets),
    }


def _params_json(spec):
    p = code_params(spec)
    return {
        "schema": SCHEMA_VERSION,
        "n": p["n"],
        "k": p["k"],
        "c": p["c"],
        "s": p["s"],
        "class": p["class"],
        "rates": {
            "entanglement_assisted": str(p["entanglement_assisted_rate"]),
            "tradeoff": [str(r) for r in p["tradeoff_rate"]],
            "catalytic": str(p["catalytic_rate"]),
        },
    }


def cmd_build(args) -> int:
    h1 = _load_matrix(args.h1)
    h2 = _load_matrix(args.h2)
    spec = build_code(h1, h2)
    if args.format == "json":
        print(json.dumps(_spec_report_json(spec), indent=2))
    else:
        print(_spec_report_text(spec))
    return 0


def cmd_params(args) -> int:
    spec = build_code(_load_matrix(args.h1), _load_matrix(args.h2))
    if args.format == "json":
        print(json.dumps(_params_json(spec), indent=2))
    else:
        p = code_params(spec)
        print(f"[[{p['n']}, {p['k']}; {p['c']}]] class={p['class']}")
        print(
            f"rates: entanglement-assisted {p['entanglement_assisted_rate']}, "
            f"trade-off ({p['tradeoff_rate'][0]}, {p['tradeoff_rate'][1]}), "
            f"catalytic {p['catalytic_rate']}"
        )
    return 0


def cmd_verify(args) -> int:
    spec = build_code(_load_matrix(args.h1), _load_matrix(args.h2))
    report = verify_code(spec, window=args.window, scratch=args.scratch)
    if args.format == "json":
        payload = {"schema": SCHEMA_VERSION, "params": _params_json(spec), **report.to_json_dict()}
        print(json.dumps(payload, indent=2))
    else:
        print(report.to_text())
    return 0 if report.passed else 4


def cmd_examples(args) -> int:
    payloads = []
    for name, (h1_text, h2_text) in EXAMPLES.items():
        spec = build_code(parse_matrix(h1_text), parse_matrix(h2_text))
        report = verify_code(spec, window=args.window, scratch=args.scratch)
        if args.format == "json":
            payloads.append(
                {
                    "name": name,
                    "h1": h1_text,
                    "h2": h2_text,
                    "report": _spec_report_json(spec),
                    "verification": report.to_json_dict(),
                }
            )
        else:
            print(f"=== example: {name} ===")
            print(f"H1 = [{h1_text}]   H2 = [{h2_text}]")
            print(_spec_report_text(spec))
            print(report.to_text())
            print()
        if not report.passed:
            return 4
    if args.format == "json":
        print(json.dumps({"schema": SCHEMA_VERSION, "examples": payloads}, indent=2))
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eaqconv",
        description="CSS entanglement-assisted quantum convolutional codes from classical check matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, matrices=True):
        if matrices:
            p.add_argument("--h1", required=True, help="first check matrix (file or inline, rows ';'-separated)")
            p.add_argument("--h2", required=True, help="second check matrix (file or inline)")
        p.add_argument("--format", choices=("text", "json"), default="text")

    p_build = sub.add_parser("build", help="construct the code and print the full report")
    add_common(p_build)
    p_build.set_defaults(func=cmd_build)

    p_params = sub.add_parser("params", help="print just the code parameters and rates")
    add_common(p_params)
    p_params.set_defaults(func=cmd_params)

    p_verify = sub.add_parser("verify", help="construct and verify the code")
    add_common(p_verify)
    p_verify.add_argument("--window", type=int, default=32, help="simulation window in frames")
    p_verify.add_argument("--scratch", type=int, default=None, help="leading scratch frames")
    p_verify.set_defaults(func=cmd_verify)

    p_ex = sub.add_parser("examples", help="run the bundled examples end to end")
    p_ex.add_argument("--format", choices=("text", "json"), default="text")
    p_ex.add_argument("--window", type=int, default=32)
    p_ex.add_argument("--scratch", type=int, default=None)
    p_ex.set_defaults(func=cmd_examples)

    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PolyParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    except EaqconvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
