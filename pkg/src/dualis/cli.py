"""Command-line batch interface: ``dualis compute`` and ``dualis verify``.

Exit codes: 0 success, 2 invalid specification, 3 internal invariant
violated (for instance a boundary that does not square to zero), 4 a
requested check does not apply to the model family.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .complex import ComplexError, validate_complex
from .duality import pairing_matrix, verify_duality, verify_stokes
from .groups import GroupElement, GroupError
from .hecke import (
    HeckeError,
    VARIANTS,
    hecke_operator,
    verify_adjointness,
    verify_coset_independence,
    verify_double_coset,
    verify_hecke_h0,
    verify_transfer_identities,
)
from .linalg import LinAlgError, Matrix, charpoly, format_fraction, format_poly
from .models import SpecError, build_model, finite_quotient_oracle, koszul_cohomology, translation
from .report import CheckReport

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_INVARIANT = 3
EXIT_INAPPLICABLE = 4

CHECKS = (
    "duality",
    "grothendieck",
    "finite_quotient",
    "transfer",
    "hecke_h0",
    "double_coset",
    "adjointness",
    "coset_independence",
)
HECKE_CHECKS = {"hecke_h0", "double_coset", "adjointness", "coset_independence"}
INVARIANT_AXIOMS = {"boundary of boundary nonzero", "coboundary squared nonzero"}
DEFAULT_MAX_CELLS = 20000


class CliFailure(Exception):
    def __init__(self, code: int, message: str, witnesses: Optional[list] = None):
        super().__init__(message)
        self.code = code
        self.witnesses = witnesses or []


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    if isinstance(obj, Matrix):
        return obj.to_strings()
    if isinstance(obj, GroupElement):
        return obj.to_json()
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_jsonable) + "\n"


def parse_degrees(text: Optional[str], top: int) -> list:
    if text is None:
        return list(range(top + 1))
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise CliFailure(EXIT_SPEC, f"degree range {text!r} is not of the form a..b") from None
    if a > b or a < 0:
        raise CliFailure(EXIT_SPEC, f"empty or negative degree range {text!r}")
    return [m for m in range(a, b + 1) if m <= top]


def parse_list(text: Optional[str], allowed: Sequence[str], what: str) -> list:
    if text is None:
        return list(allowed)
    items = [t.strip() for t in text.split(",") if t.strip()]
    bad = [t for t in items if t not in allowed]
    if bad or not items:
        raise CliFailure(EXIT_SPEC, f"unknown {what}: {', '.join(bad) or '(none given)'}")
    return list(dict.fromkeys(items))


def max_cells() -> int:
    raw = os.environ.get("DUALIS_MAX_CELLS", str(DEFAULT_MAX_CELLS))
    try:
        return int(raw)
    except ValueError:
        raise CliFailure(EXIT_SPEC, f"DUALIS_MAX_CELLS={raw!r} is not an integer") from None


def load_model(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliFailure(EXIT_SPEC, f"cannot read specification: {exc}") from None
    try:
        model = build_model(spec)
    except (SpecError, GroupError, ComplexError, KeyError, TypeError) as exc:
        raise CliFailure(EXIT_SPEC, f"invalid specification: {exc}") from None
    total = sum(model.complex.cell_counts())
    cap = max_cells()
    if total > cap:
        raise CliFailure(EXIT_SPEC, f"complex has {total} orbit cells, above the cap {cap}")
    return model


def check_structure(model) -> None:
    rpt = validate_complex(model.complex, model.rep)
    if rpt.passed:
        return
    invariant = [w for w in rpt.witnesses if w.get("axiom") in INVARIANT_AXIOMS]
    if invariant:
        raise CliFailure(EXIT_INVARIANT, "boundary maps do not square to zero", invariant + [
            w for w in rpt.witnesses if w not in invariant
        ])
    raise CliFailure(EXIT_SPEC, "complex violates structural axioms", rpt.witnesses)


def _header(model) -> dict:
    return {
        "model": model.name,
        "family": model.family,
        "parameters": model.params,
        "coefficients": {"name": model.rep.name, "dim": model.rep.dim},
        "cells": model.complex.cell_counts(),
    }


def _dims(model, degrees, variants) -> dict:
    out = {}
    for label, rep in (("E", model.rep), ("E*", model.rep.dual())):
        cc = model.complex.model(rep)
        out[label] = {v: {str(m): cc.cohomology(m, v).dim for m in degrees} for v in variants}
    return out


def _pairings(model, degrees, variants) -> dict:
    out = {}
    for v in ("compact", "interior"):
        if v not in variants:
            continue
        out[v] = {str(m): pairing_matrix(model.complex, model.rep, m, v).matrix.to_strings() for m in degrees}
    return out


def _hecke(model, degrees, variants) -> dict:
    out = {}
    allowed = set(model.hecke_degrees())
    for spec in model.hecke_specs:
        hd = model.hecke(spec.name)
        ops = {}
        for v in variants:
            per = {}
            for m in degrees:
                if m not in allowed:
                    continue
                T = hecke_operator(model.complex, model.rep, hd, m, v)
                cp = charpoly(T)
                per[str(m)] = {
                    "matrix": T.to_strings(),
                    "charpoly": [format_fraction(c) for c in cp],
                    "charpoly_text": format_poly(cp),
                }
            ops[v] = per
        out[spec.name] = {"g": spec.g.to_json(), "cosets": hd.index, "operators": ops}
    return out


def cmd_compute(model, degrees, variants) -> tuple:
    report = _header(model)
    report["degrees"] = degrees
    report["variants"] = variants
    report["dims"] = _dims(model, degrees, variants)
    report["pairings"] = _pairings(model, degrees, variants)
    report["hecke"] = _hecke(model, degrees, variants)
    report["checks"] = []
    return report, EXIT_OK


# -- checks -------------------------------------------------------------------------


def applicable(model, check: str) -> Optional[str]:
    """None when the check applies, else the reason it does not."""
    if check == "grothendieck" and model.family != "torus":
        return "the Koszul comparison needs a torus model"
    if check == "finite_quotient" and model.family != "finite_rotation":
        return "the finite-quotient oracle needs a finite rotation model"
    if check == "transfer" and model.transfer_sub is None:
        return "no finite-index subgroup is available for this family"
    if check in HECKE_CHECKS and not model.hecke_specs:
        return "the specification lists no Hecke elements"
    return None


def run_duality(model, seed: int) -> CheckReport:
    rpt = verify_duality(model.complex, model.rep, seed)
    rpt.merge(verify_stokes(model.complex, samples=20, seed=seed))
    return rpt


def run_grothendieck(model, seed: int) -> CheckReport:
    rpt = CheckReport("grothendieck")
    K = model.complex
    n = K.dimension
    basis = [translation([1 if i == j else 0 for i in range(n)]) for j in range(n)]
    for label, rep in (("E", model.rep), ("E*", model.rep.dual())):
        oracle = koszul_cohomology([rep(t) for t in basis])
        got = [K.model(rep).cohomology(m, "ordinary").dim for m in range(n + 1)]
        rpt.info[label] = {"complex": got, "koszul": oracle}
        if got != oracle:
            rpt.fail(coefficients=label, complex=got, koszul=oracle)
    return rpt


def run_finite_quotient(model, seed: int) -> CheckReport:
    rpt = CheckReport("finite_quotient")
    K = model.complex
    r = model.params["order"]
    gen = K.group.generators[0]
    for label, rep in (("E", model.rep), ("E*", model.rep.dual())):
        oracle = finite_quotient_oracle(r, rep(gen))
        got = [K.model(rep).cohomology(m, "compact").dim for m in range(K.dimension + 1)]
        rpt.info[label] = {"complex": got, "oracle": oracle}
        if got != oracle:
            rpt.fail(coefficients=label, complex=got, oracle=oracle)
    return rpt


def run_transfer(model, seed: int) -> CheckReport:
    return verify_transfer_identities(model.complex, model.rep, model.transfer_sub, seed=seed)


def run_hecke_h0(model, seed: int) -> CheckReport:
    rpt = CheckReport("hecke_h0")
    for spec in model.hecke_specs:
        sub = verify_hecke_h0(model.complex, model.rep, model.hecke(spec.name))
        sub.name = spec.name
        rpt.merge(sub)
        rpt.info[spec.name] = sub.info
    return rpt


def run_adjointness(model, seed: int) -> CheckReport:
    rpt = CheckReport("adjointness")
    n = model.complex.dimension
    allowed = set(model.hecke_degrees())
    for spec in model.hecke_specs:
        hd = model.hecke(spec.name)
        done = []
        for m in sorted(allowed):
            if n - m not in allowed:
                continue
            sub = verify_adjointness(model.complex, model.rep, hd, m)
            sub.name = f"{spec.name}@{m}"
            rpt.merge(sub)
            done.append(m)
        rpt.info[spec.name] = {"degrees": done}
    return rpt


def run_double_coset(model, seed: int, pairs: int = 3) -> CheckReport:
    rng = random.Random(seed)
    rpt = CheckReport("double_coset")
    degrees = model.hecke_degrees()
    for spec in model.hecke_specs:
        hd = model.hecke(spec.name)
        tried = []
        for _ in range(pairs):
            a, b = model.random_element(rng), model.random_element(rng)
            other = model.hecke_for(a * spec.g * b)
            sub = verify_double_coset(model.complex, model.rep, hd, other, degrees)
            sub.name = spec.name
            rpt.merge(sub)
            tried.append([a.to_json(), b.to_json()])
        rpt.info[spec.name] = {"pairs": tried}
    return rpt


def run_coset_independence(model, seed: int, trials: int = 10) -> CheckReport:
    rpt = CheckReport("coset_independence", info={"trials": trials})
    for spec in model.hecke_specs:
        sub = verify_coset_independence(
            model.complex, model.rep, model.hecke(spec.name), model.hecke_degrees(), trials=trials, seed=seed
        )
        sub.name = spec.name
        rpt.merge(sub)
    return rpt


RUNNERS = {
    "duality": run_duality,
    "grothendieck": run_grothendieck,
    "finite_quotient": run_finite_quotient,
    "transfer": run_transfer,
    "hecke_h0": run_hecke_h0,
    "double_coset": run_double_coset,
    "adjointness": run_adjointness,
    "coset_independence": run_coset_independence,
}


def cmd_verify(model, checks: Sequence[str], seed: int) -> tuple:
    report = _header(model)
    report["seed"] = seed
    skipped = {c: why for c in checks if (why := applicable(model, c)) is not None}
    if skipped:
        report["inapplicable"] = skipped
        report["checks"] = []
        return report, EXIT_INAPPLICABLE
    results = []
    for c in checks:
        results.append(RUNNERS[c](model, seed).as_dict())
    report["checks"] = results
    return report, EXIT_OK if all(r["passed"] for r in results) else 1


# -- entry point ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dualis", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("compute", help="cohomology tables, pairings and Hecke matrices")
    c.add_argument("spec")
    c.add_argument("--degrees", help="inclusive range a..b")
    c.add_argument("--variants", help="comma list from ordinary,compact,interior")
    v = sub.add_parser("verify", help="run named checks")
    v.add_argument("spec")
    v.add_argument("--checks", required=True, help="comma list from " + ",".join(CHECKS))
    for q in (c, v):
        q.add_argument("-o", "--output", help="report path (default: standard output)")
        q.add_argument("--seed", type=int, default=0)
    return p


def _write(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    report: dict = {"command": args.command}
    try:
        if args.command == "verify":
            checks = parse_list(args.checks, CHECKS, "checks")
        else:
            variants = parse_list(args.variants, VARIANTS, "variants")
        model = load_model(args.spec)
        check_structure(model)
        if args.command == "compute":
            degrees = parse_degrees(args.degrees, model.complex.dimension)
            body, code = cmd_compute(model, degrees, variants)
        else:
            body, code = cmd_verify(model, checks, args.seed)
        report.update(body)
    except CliFailure as exc:
        report.update({"error": str(exc), "witnesses": exc.witnesses})
        code = exc.code
    except (ComplexError, HeckeError, LinAlgError, GroupError) as exc:
        report.update({"error": f"internal invariant violated: {exc}", "witnesses": []})
        code = EXIT_INVARIANT
    report["exit_code"] = code
    _write(dumps(report), args.output)
    if code not in (EXIT_OK, 1) and "error" in report:
        print(f"dualis: {report['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
