"""Command-line interface.

Exit status: 0 success, 1 a verification check failed, 2 bad input or an
unsatisfiable request, 3 the rational map is not injective (see
``--allow-noninjective``).
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from fractions import Fraction
from pathlib import Path

from .automorphism import GroupError, InfiniteGroupError
from .divisor import canonical_divisor
from .formats import ParseError, parse_divisor, parse_fraction, parse_group, parse_model
from .graph import ModelError
from .linear_system import (
    EmptyLinearSystemError,
    GranularityWarning,
    LinearSystem,
    NotInvariantError,
)
from .realization import MODES, NonInjectiveError, RealizationError, realize, realize_canonical
from .samples import write_examples
from .tropical import is_permutation_matrix

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_NONINJECTIVE = 0, 1, 2, 3


class InputError(Exception):
    pass


# -- loading ------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _graph(args):
    return parse_model(_read(args.graph), args.graph)


def _divisor(m, args):
    if args.canonical and args.divisor:
        raise InputError("give either --divisor or --canonical, not both")
    if args.canonical:
        return canonical_divisor(m)
    if args.divisor:
        return parse_divisor(m, _read(args.divisor), args.divisor)
    raise InputError("a divisor is required: --divisor FILE or --canonical")


def _group(m, args, required: bool):
    if args.aut and args.group:
        raise InputError("give either --aut or --group, not both")
    if args.aut:
        return parse_group(m, "auto\n", "--aut")
    if args.group:
        return parse_group(m, _read(args.group), args.group)
    if required:
        raise InputError("a group is required: --aut or --group FILE")
    return None


def _granularity(args):
    if args.granularity is None:
        return None
    try:
        h = parse_fraction(args.granularity)
    except ValueError as exc:
        raise InputError(f"--granularity: {exc}") from None
    if h <= 0:
        raise InputError("--granularity must be positive")
    return h


# -- rendering ----------------------------------------------------------------


def _q(x: Fraction) -> str:
    # Fraction renders as p/q (or an integer), never as a decimal
    return str(x)


def _rows(rows) -> str:
    return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in rows) + "]"


def _emit(report: dict, args, text_lines: list[str]):
    if args.json:
        print(json.dumps(report, indent=2, ensure_ascii=False))
    else:
        print("\n".join(text_lines))


# -- commands -----------------------------------------------------------------


def cmd_info(args) -> int:
    m = _graph(args)
    K = canonical_divisor(m)
    valences = {v: len(m.ends(v)) for v in m.vertices}
    report = {
        "vertices": len(m.vertices),
        "edges": len(m.edges),
        "total_length": _q(m.total_length),
        "genus": m.genus,
        "canonical_divisor": str(K),
        "valences": valences,
        "circle": m.is_circle(),
    }
    lines = [
        f"vertices: {len(m.vertices)}  edges: {len(m.edges)}  total length: {m.total_length}",
        f"genus: {m.genus}",
        f"canonical divisor: {K}",
        "valences: " + " ".join(f"{v}={k}" for v, k in valences.items()),
        f"circle: {'yes' if m.is_circle() else 'no'}",
    ]
    _emit(report, args, lines)
    return EXIT_OK


def _generators_report(gs):
    return [{"function": f.serialize(), "divisor": str(E)} for f, E in zip(gs.functions, gs.divisors)]


def cmd_extremals(args) -> int:
    m = _graph(args)
    D = _divisor(m, args)
    G = _group(m, args, required=False)
    ctx = LinearSystem(m, D, _granularity(args), args.refine, group=G)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GranularityWarning)
        gs = ctx.enumerate_extremals()
    report = {
        "divisor": str(D),
        "granularity": _q(ctx.h),
        "count": len(gs),
        "generators": _generators_report(gs),
        "generation_check": {
            "members": gs.members_checked,
            "not_generated": gs.check_failures,
            "passed": gs.check_passed,
        },
    }
    lines = [f"D = {D}   granularity h = {ctx.h}", f"{len(gs)} extremal generator(s), normalized to maximum 0:"]
    for k, (f, E) in enumerate(zip(gs.functions, gs.divisors), 1):
        lines.append(f"  f{k}: {f.serialize()}")
        lines.append(f"       D + div(f{k}) = {E}")
    if gs.check_passed:
        lines.append(f"generation check: all {gs.members_checked} lattice members of |D| are generated")
    else:
        lines.append(
            f"generation check FAILED: {gs.check_failures} of {gs.members_checked} members not generated; "
            "rerun with a larger --refine"
        )
    _emit(report, args, lines)
    return EXIT_OK if gs.check_passed else EXIT_VERIFY


def _matrix_rows(M):
    return [[int(x) for x in row] for row in M]


def cmd_realize(args) -> int:
    m = _graph(args)
    D = _divisor(m, args)
    modes = MODES if args.mode == "all" else (args.mode,)
    phi_mode = "projective" if "projective" in modes else "affine"
    if args.canonical and args.aut and args.granularity is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", GranularityWarning)
            real = realize_canonical(m, refine=args.refine, mode=phi_mode)
    else:
        G = _group(m, args, required=True)
        ctx = LinearSystem(m, D, _granularity(args), args.refine)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", GranularityWarning)
            real = realize(ctx, G, require_injective=False, mode=phi_mode)
    inj = real.injectivity
    if not inj and not args.allow_noninjective:
        p, q = inj.witness
        print(
            f"error: the rational map is not injective: {p} and {q} have the same image "
            "(pass --allow-noninjective to realize anyway)",
            file=sys.stderr,
        )
        return EXIT_NONINJECTIVE
    names = [im.name or f"#{i}" for i, im in enumerate(real.images)]
    elements = []
    for im, name in zip(real.images, names):
        el = {"name": name, "permutation": [k + 1 for k in im.perm]}
        if "projective" in modes:
            el["A"] = _matrix_rows(im.A)
            el["det_A"] = im.det
            el["PGL"] = im.pgl.to_rows()
        if "affine" in modes:
            el["P"] = im.P.to_rows()
        if "euclidean" in modes:
            el["Q"] = _matrix_rows(im.Q)
        el["commutes"] = {k: r.ok for k, r in im.commutes.items()}
        fails = {k: str(r.failure) for k, r in im.commutes.items() if not r.ok}
        if fails:
            el["commutation_failures"] = fails
        elements.append(el)
    checks = {
        "homomorphism": not real.homomorphism_failures,
        "det_pm1": real.det_ok,
        "permutation_matrices": all(is_permutation_matrix(im.P) for im in real.images),
        "commutation": real.commutation_ok,
        "psi_injective": real.psi_injective,
        "collisions": [[names[i], names[j]] for i, j in real.collisions],
    }
    report = {
        "divisor": str(D),
        "invariant_divisor": str(real.divisor),
        "granularity": _q(real.context.h),
        "group_order": real.group.order,
        "n": real.n,
        "generators": _generators_report(real.generators),
        "generation_check_passed": real.generators.check_passed,
        "phi": {
            "mode": phi_mode,
            "injective": inj.injective,
            "witness": [str(p) for p in inj.witness] if inj.witness else None,
        },
        "elements": elements,
        "checks": checks,
    }
    lines = [
        f"D = {D}   invariant representative D' = {real.divisor}   granularity h = {real.context.h}",
        f"group order {real.group.order}; {real.n + 1} generators of R(D'):",
    ]
    for k, f in enumerate(real.generators.functions, 1):
        lines.append(f"  f{k}: {f.serialize()}")
    lines.append(
        "phi injective" if inj else f"phi NOT injective: {inj.witness[0]} and {inj.witness[1]} share an image"
    )
    for el in elements:
        lines.append(f"{el['name']}: permutation {el['permutation']}")
        if "A" in el:
            lines.append(f"  A = {_rows(el['A'])}  det {el['det_A']}")
            lines.append(f"  [P] = {_rows(el['PGL'])}")
        if "P" in el:
            lines.append(f"  P = {_rows(el['P'])}")
        if "Q" in el:
            lines.append(f"  Q = {_rows(el['Q'])}")
    for key in ("homomorphism", "det_pm1", "permutation_matrices", "commutation"):
        lines.append(f"check {key}: {'pass' if checks[key] else 'FAIL'}")
    if real.collisions:
        lines.append("Psi is NOT injective; equal images: " + ", ".join(f"{a}={b}" for a, b in checks["collisions"]))
    else:
        lines.append("Psi injective")
    _emit(report, args, lines)
    ok = all(checks[k] for k in ("homomorphism", "det_pm1", "permutation_matrices", "commutation"))
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_examples(args) -> int:
    for p in write_examples(args.directory):
        print(p)
    return EXIT_OK


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tropaut", description="Divisors, linear systems and automorphism realizations on metric graphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, divisor=True, group=True):
        p.add_argument("graph", help="graph file")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if divisor:
            p.add_argument("--divisor", help="divisor file")
            p.add_argument("--canonical", action="store_true", help="use the canonical divisor")
            p.add_argument("--granularity", help="lattice step p/q")
            p.add_argument("--refine", type=int, default=1, help="divide the default lattice step by N")
        if group:
            p.add_argument("--aut", action="store_true", help="full automorphism group")
            p.add_argument("--group", help="group spec file")

    p = sub.add_parser("info", help="genus, canonical divisor, valences")
    common(p, divisor=False, group=False)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("extremals", help="minimal generating set of R(D)")
    common(p)
    p.set_defaults(func=cmd_extremals)

    p = sub.add_parser("realize", help="matrix realization of a finite group")
    common(p)
    p.add_argument("--mode", choices=(*MODES, "all"), default="all")
    p.add_argument("--allow-noninjective", action="store_true", help="report instead of failing when phi is not injective")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("examples", help="write the built-in example inputs")
    p.add_argument("directory")
    p.set_defaults(func=cmd_examples)
    return ap


_HINTS = {
    EmptyLinearSystemError: "D is not equivalent to an effective divisor",
    InfiniteGroupError: "supply a finite subgroup with --group (rotate/reflect lines)",
    NotInvariantError: "choose a G-invariant divisor or refine the lattice",
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "refine", 1) < 1:
        print("error: --refine must be a positive integer", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except NonInjectiveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONINJECTIVE
    except (InputError, ParseError, ModelError, GroupError, RealizationError, ValueError) as exc:
        hint = next((h for cls, h in _HINTS.items() if isinstance(exc, cls)), None)
        print(f"error: {exc}", file=sys.stderr)
        if hint:
            print(f"hint: {hint}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
