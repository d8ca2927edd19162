"""Command-line front end.

Subcommands: field, kgroup, invariants, decompose, euler, verify.
Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 bad
input, 3 precision exhausted.  Reports go to stdout, human-readable by
default and as a JSON document with --json.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InputError, KnormError, MathCheckError, PrecisionError
from .euler import (
    chi,
    corollary_checks,
    enumerate_extension_classes,
    profile_from_field,
    profile_from_manual,
    theorem3_check,
)
from .milnor import (
    class_of,
    get_extension,
    k_group,
    projection_formula_check,
    verify_hilbert90,
    verify_voevodsky_seq,
)
from .padic import LocalField, PadicElement
from .presets import FIELD_PRESETS
from .structure import check_canonical, check_lemma_VW, check_theorem_items, decompose_knE

EXIT_PASS = 0
EXIT_MATH_FAIL = 1
EXIT_INPUT = 2
EXIT_PRECISION = 3

COMPLEMENT_RULE = "echelon-pivot-v1"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="knorm",
        description="Galois module structure of mod-p Milnor K-groups of local fields",
    )
    parser.add_argument("--version", action="version", version=f"knorm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, a_flag=True, n_flag=True):
        p.add_argument("--spec", help="field spec: a JSON file path or inline JSON")
        p.add_argument("--preset", choices=sorted(FIELD_PRESETS), help="named field")
        p.add_argument("--precision", type=int, help="working precision override")
        p.add_argument("--json", action="store_true", help="emit a JSON report")
        if a_flag:
            p.add_argument(
                "--a",
                help="extension element: an integer, 'uniformizer', 'zeta', "
                "or a JSON digit list",
            )
        if n_flag:
            p.add_argument("--n", type=int, nargs="+", help="degrees to process")

    common(sub.add_parser("field", help="field summary"), a_flag=False, n_flag=False)
    common(sub.add_parser("kgroup", help="K-group dimensions and bases"), a_flag=False)
    common(sub.add_parser("invariants", help="the six invariants per degree"))
    common(sub.add_parser("decompose", help="module decomposition report"))
    euler_p = sub.add_parser("euler", help="Euler-characteristic identities")
    common(euler_p)
    euler_p.add_argument("--manual", help="manual cohomology profile (inline JSON)")
    verify_p = sub.add_parser("verify", help="run a verification suite")
    common(verify_p)
    verify_p.add_argument(
        "--suite",
        choices=["canonical", "sequences", "euler", "all"],
        default="all",
    )
    verify_p.add_argument("--manual", help="manual cohomology profile (inline JSON)")
    return parser


def _load_field(args) -> LocalField:
    if getattr(args, "preset", None) and getattr(args, "spec", None):
        raise InputError("give either --preset or --spec, not both")
    if getattr(args, "preset", None):
        spec = dict(FIELD_PRESETS[args.preset])
    elif getattr(args, "spec", None):
        text = args.spec
        path = Path(text)
        if path.is_file():
            text = path.read_text()
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"unparseable field spec: {exc}") from exc
    else:
        raise InputError("a field is required: --preset NAME or --spec JSON")
    if getattr(args, "precision", None):
        spec = dict(spec)
        spec["precision"] = args.precision
    return LocalField.from_spec(spec)


def _resolve_a(field: LocalField, text: str) -> PadicElement:
    if text is None:
        raise InputError("this command needs an extension element: --a VALUE")
    if text == "uniformizer":
        return field.pi
    if text == "zeta":
        if not field.has_mu_p:
            raise InputError("the field has no primitive p-th root of unity")
        return field.zeta
    try:
        return field.element(int(text))
    except ValueError:
        pass
    try:
        digits = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"cannot parse the extension element {text!r}: {exc}") from exc
    if not isinstance(digits, list):
        raise InputError("a JSON extension element must be a digit list")
    return field.element(digits)


def _degrees(args, default=(1, 2, 3)) -> list[int]:
    degrees = getattr(args, "n", None) or list(default)
    for n in degrees:
        if not 0 <= n <= 4:
            raise InputError(f"degree {n} outside the supported range 0..4")
    return list(degrees)


def _field_summary(field: LocalField) -> dict:
    info = field.describe()
    if not field.has_mu_p:
        raise InputError("primitive p-th root of unity required")
    grp = k_group(field, 1)
    info["dim_k1"] = grp.dim
    info["k1_basis"] = grp.labels
    info["ramified"] = field.e > 1
    return info


def _report_skeleton(field_info: dict) -> dict:
    return {
        "version": __version__,
        "complement_rule": COMPLEMENT_RULE,
        "field": field_info,
        "results": [],
        "status": "pass",
    }


def _emit(report: dict, as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps(_jsonable(report), indent=2))
    else:
        for line in lines:
            print(line)


def cmd_field(args) -> int:
    field = _load_field(args)
    info = _field_summary(field)
    report = _report_skeleton(info)
    lines = [
        f"p = {info['p']}, degree {info['degree']} over Q{info['p']} "
        f"(e = {info['e']}, f = {info['f']})",
        f"precision: {info['precision']} uniformizer digits",
        f"contains mu_p: {info['has_mu_p']}",
        f"dim k1 = {info['dim_k1']}, basis [{', '.join(info['k1_basis'])}]",
    ]
    _emit(report, args.json, lines)
    return EXIT_PASS


def cmd_kgroup(args) -> int:
    field = _load_field(args)
    info = _field_summary(field)
    report = _report_skeleton(info)
    lines = []
    for n in _degrees(args, default=(0, 1, 2, 3)):
        grp = k_group(field, n)
        entry = {"n": n, "dim": grp.dim, "basis": grp.labels}
        report["results"].append(entry)
        lines.append(f"k{n}: dim {grp.dim}" + (f", basis [{', '.join(grp.labels)}]" if grp.labels else ""))
    _emit(report, args.json, lines)
    return EXIT_PASS


def cmd_invariants(args) -> int:
    from .structure import compute_invariants

    field = _load_field(args)
    info = _field_summary(field)
    a = _resolve_a(field, args.a)
    ext = get_extension(field, a)
    report = _report_skeleton(info)
    lines = [f"extension by {ext.label}"]
    for n in _degrees(args):
        inv = compute_invariants(ext, n)
        report["results"].append({"a": ext.label, **inv.as_dict()})
        d, e, u1, u2, y, z = inv.as_tuple()
        lines.append(f"n={n}: (d, e, u1, u2, y, z) = ({d}, {e}, {u1}, {u2}, {y}, {z})")
    _emit(report, args.json, lines)
    return EXIT_PASS


def cmd_decompose(args) -> int:
    field = _load_field(args)
    info = _field_summary(field)
    a = _resolve_a(field, args.a)
    ext = get_extension(field, a)
    report = _report_skeleton(info)
    lines = [f"extension by {ext.label}"]
    ok = True
    for n in _degrees(args):
        rep = decompose_knE(ext, n)
        check_theorem_items(rep)
        entry = {"a": ext.label, **rep.as_dict()}
        report["results"].append(entry)
        ok = ok and rep.checklist.all_passed
        dims = rep.summand_dims()
        lines.append(
            f"n={n}: X1 dim {dims['X1']}, X2 summands {dims['X2_summands']}, "
            f"Y rank {dims['Y_rank']}, Z dim {dims['Z']}"
            f" | checks {'pass' if rep.checklist.all_passed else 'FAIL'}"
        )
        for item in rep.checklist.failures():
            lines.append(f"   FAILED: {item.name} {item.detail}")
    report["status"] = "pass" if ok else "fail"
    lines.append(f"status: {report['status']}")
    _emit(report, args.json, lines)
    return EXIT_PASS if ok else EXIT_MATH_FAIL


def cmd_euler(args) -> int:
    report_entries: list[dict] = []
    lines: list[str] = []
    ok = True
    if getattr(args, "manual", None):
        try:
            spec = json.loads(args.manual)
        except json.JSONDecodeError as exc:
            raise InputError(f"unparseable manual profile: {exc}") from exc
        prof = profile_from_manual(spec)
        rep = theorem3_check(prof)
        report_entries.append(rep.as_dict())
        ok = rep.ok
        lines.append(
            f"manual profile: chi_T = {rep.chi_T}, chi_N = {rep.chi_N}, "
            f"status {'pass' if rep.ok else 'FAIL'}"
        )
        report = {
            "version": __version__,
            "complement_rule": COMPLEMENT_RULE,
            "field": None,
            "results": report_entries,
            "status": "pass" if ok else "fail",
        }
        _emit(report, args.json, lines)
        return EXIT_PASS if ok else EXIT_MATH_FAIL
    field = _load_field(args)
    info = _field_summary(field)
    report = _report_skeleton(info)
    degrees = _degrees(args, default=(2,))
    exts = (
        [get_extension(field, _resolve_a(field, args.a))]
        if args.a
        else enumerate_extension_classes(field)
    )
    for n in degrees:
        profs = [profile_from_field(ext, n) for ext in exts]
        for prof in profs:
            rep = theorem3_check(prof)
            report["results"].append(rep.as_dict())
            ok = ok and rep.ok
            lines.append(
                f"n={n} a={prof.label}: chi_T = {rep.chi_T}, chi_N = {rep.chi_N}, "
                f"{'pass' if rep.ok else 'FAIL'}"
            )
        if len(profs) > 1:
            crep = corollary_checks(profs)
            report["results"].append({"corollary": crep.as_dict()})
            ok = ok and crep.ok
            lines.append(
                f"n={n}: chi doubles for {sum(r['chi_doubles'] for r in crep.rows)}"
                f"/{crep.count} subgroups"
                + ("  (consistent with cd <= n)" if crep.all_doubling else "")
            )
    report["status"] = "pass" if ok else "fail"
    lines.append(f"status: {report['status']}")
    _emit(report, args.json, lines)
    return EXIT_PASS if ok else EXIT_MATH_FAIL


def _verify_canonical(ext, degrees, results, lines) -> bool:
    ok = True
    for n in degrees:
        rep = decompose_knE(ext, n)
        items = check_theorem_items(rep)
        canonical = check_canonical(ext, n)
        vw = check_lemma_VW(ext, n)
        entry = {
            "a": ext.label,
            "n": n,
            "decomposition": items.as_dict(),
            "canonical": canonical.as_dict(),
            "complements": vw.as_dict(),
        }
        results.append(entry)
        good = items.all_passed and canonical.all_passed and vw.all_passed
        ok = ok and good
        lines.append(f"canonical a={ext.label} n={n}: {'pass' if good else 'FAIL'}")
        for cl in (items, canonical, vw):
            for item in cl.failures():
                lines.append(f"   FAILED: {item.name} {item.detail}")
    return ok


def _verify_sequences(ext, degrees, results, lines) -> bool:
    ok = True
    for n in sorted(set(min(n, 3) for n in degrees) | {0}):
        h90 = verify_hilbert90(ext, n)
        results.append({"a": ext.label, "hilbert90": h90.as_dict()})
        ok = ok and h90.ok
        lines.append(f"twisted-norm a={ext.label} n={n}: {'pass' if h90.ok else 'FAIL'}")
    for m in (1, 2, 3):
        rep = verify_voevodsky_seq(ext, m)
        results.append({"a": ext.label, "four_term": rep.as_dict()})
        ok = ok and rep.ok
        lines.append(f"four-term a={ext.label} m={m}: {'pass' if rep.ok else 'FAIL'}")
    proj = projection_formula_check(ext)
    results.append({"a": ext.label, "projection_formula": proj})
    ok = ok and all(proj.values())
    lines.append(f"projection formula a={ext.label}: {'pass' if all(proj.values()) else 'FAIL'}")
    return ok


def _verify_euler(field, exts, degrees, results, lines) -> bool:
    ok = True
    for n in degrees:
        profs = [profile_from_field(ext, n) for ext in exts]
        for prof in profs:
            rep = theorem3_check(prof)
            results.append({"euler": rep.as_dict()})
            ok = ok and rep.ok
        expected = None
        if len(exts) > 1:
            grp = k_group(field, 1)
            expected = (field.p**grp.dim - 1) // (field.p - 1)
        crep = corollary_checks(profs, expected_count=expected)
        results.append({"corollary": crep.as_dict()})
        ok = ok and crep.ok
        doubling = sum(r["chi_doubles"] for r in crep.rows)
        lines.append(
            f"euler n={n}: identities {'pass' if ok else 'FAIL'}; "
            f"chi doubles for {doubling}/{crep.count} subgroups"
            + ("  (consistent with cd <= n)" if crep.all_doubling else "")
        )
    return ok


def cmd_verify(args) -> int:
    if getattr(args, "manual", None):
        return cmd_euler(args)
    field = _load_field(args)
    info = _field_summary(field)
    report = _report_skeleton(info)
    lines: list[str] = []
    degrees = _degrees(args)
    exts = (
        [get_extension(field, _resolve_a(field, args.a))]
        if args.a
        else enumerate_extension_classes(field)
    )
    lines.append(f"verifying {len(exts)} extension(s), degrees {degrees}, suite {args.suite}")
    ok = True
    if args.suite in ("canonical", "all"):
        for ext in exts:
            ok = _verify_canonical(ext, degrees, report["results"], lines) and ok
    if args.suite in ("sequences", "all"):
        for ext in exts:
            ok = _verify_sequences(ext, degrees, report["results"], lines) and ok
    if args.suite in ("euler", "all"):
        ok = _verify_euler(field, exts, degrees, report["results"], lines) and ok
    report["status"] = "pass" if ok else "fail"
    lines.append(f"status: {report['status']}")
    _emit(report, args.json, lines)
    return EXIT_PASS if ok else EXIT_MATH_FAIL


_COMMANDS = {
    "field": cmd_field,
    "kgroup": cmd_kgroup,
    "invariants": cmd_invariants,
    "decompose": cmd_decompose,
    "euler": cmd_euler,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, matching the input-error code
        return int(exc.code) if exc.code else 0
    try:
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PrecisionError as exc:
        print(f"precision error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except MathCheckError as exc:
        print(f"mathematical check failed: {exc}", file=sys.stderr)
        return EXIT_MATH_FAIL
    except KnormError as exc:  # pragma: no cover
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
