"""Command-line reports.

Exit codes: 0 success, 1 internal failure, 2 validation failure,
3 sign certification failure, 4 parse error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from . import __version__
from .cmtype import (CMType, find_polarization_element, is_weil_type, parse_algebra,
                     parse_embeddings, shioda_cm_type, twist_cm_type,
                     validate_cm_type, weil_invariant)
from .cyclo import CyclotomicElement, _mp, find_sign_unit, real_basis
from .errors import (CannotCertifySign, CMError, InvalidCMType, ParseError,
                     StageError)
from .mtrep import (WeightMatrix, canonical_form, hodge_class_count,
                    hodge_group_rank, is_mumford_type, rank_bounds_from_class_counts,
                    sym2_substructures, sym2_totals, weight_matrix,
                    weight_matrix_equivalent)
from .periods import (eigenbasis_gram, gram_twist, integral_basis, mumford_period_data,
                      period_matrix, polarization_matrix, riemann_relations_check)

EXIT_OK, EXIT_INTERNAL, EXIT_VALIDATION, EXIT_CERTIFY, EXIT_PARSE = 0, 1, 2, 3, 4

RHO_S = WeightMatrix(((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)))
RHO_M = WeightMatrix(((-1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)))


class CLIFailure(Exception):
    def __init__(self, code, message, payload=None):
        super().__init__(message)
        self.code = code
        self.payload = payload or {}


def _complex_pair(z, ctx):
    return [ctx.nstr(ctx.re(z), ctx.dps), ctx.nstr(ctx.im(z), ctx.dps)]


def _sym2_block(W, cm):
    reports = sym2_substructures(W, cm)
    six = sorted(tuple(r.hodge_numbers) for r in reports if r.dimension == 6)
    return reports, {
        "sym2_substructures": [r.to_json() for r in reports],
        "sym2_totals": list(sym2_totals(reports)),
        "sym2_six_dim_hodge_numbers": [list(h) for h in six],
    }


def _invariants(cm: CMType, quad, precision):
    """Shared invariant suite for a valid CM type."""
    W = weight_matrix(cm)
    g = cm.algebra.g
    res = {
        "cm_type": cm.to_string(),
        "hodge_group_rank": hodge_group_rank(cm),
        "weight_matrix": W.to_json(),
        "canonical_form": [list(r) for r in canonical_form(W)] if g <= 8 else None,
    }
    for k in range(1, g + 1):
        res[f"hodge_class_count_k{k}"] = hodge_class_count(W, k)
    if quad is not None:
        wi = weil_invariant(cm, quad)
        res["weil_invariant"] = list(wi.pair)
        if g == 4:
            res["is_weil_type"] = is_weil_type(cm, quad)
    if g == 4 and W.r == 3:
        res["equivalent_to_u_v_w_uvw"] = weight_matrix_equivalent(W, RHO_S)
        res["equivalent_to_twisted_form"] = weight_matrix_equivalent(W, RHO_M)
    if g == 4:
        res["is_mumford_type"] = is_mumford_type(W)
        if quad is not None:
            res["is_cm_mumford"] = res["is_mumford_type"] and res["is_weil_type"]
    reports, block = _sym2_block(W, cm)
    res.update(block)
    pol = find_polarization_element(cm, 2)
    Pi = period_matrix(cm, precision)
    E = polarization_matrix(pol, integral_basis(cm.algebra))
    res["polarization_element"] = str(pol.t)
    res["polarization_scale"] = str(E.scale)
    res["riemann"] = riemann_relations_check(Pi, E, precision).to_json()
    return res, W, reports


def cmd_shioda_report(args):
    cm = shioda_cm_type()
    res, W, _ = _invariants(cm, 3, args.precision)
    res["rank_bounds_from_class_counts"] = list(rank_bounds_from_class_counts(cm))
    notes = [
        "weight matrix rows are (1,0)-weights in the HNF basis of the saturated "
        "Galois-orbit lattice of the Hodge cocharacter",
        "is_mumford_type tests the weight-level W_{1,1,1} form only; is_cm_mumford "
        "additionally requires the Weil invariant {2,2}",
    ]
    return {"input": {"cm_type": cm.to_string(), "quad": 3}, "results": res, "notes": notes}


def cmd_mumford_report(args):
    try:
        data = mumford_period_data(args.precision)
    except StageError as exc:
        code = EXIT_CERTIFY if isinstance(exc.cause, CannotCertifySign) else EXIT_INTERNAL
        raise CLIFailure(code, str(exc), {"failed_stage": exc.stage})
    cm = data.cm_type
    res, W, reports = _invariants(cm, 3, args.precision)
    k3 = [r for r in reports if r.dimension == 6 and r.hodge_numbers[0] == 1]
    res["sym2_k3_orbit"] = list(k3[0].hodge_numbers) if k3 else None
    ctx = _mp(args.precision)
    res["twist_unit"] = str(data.unit)
    res["source_cm_type"] = data.source.cm_type.to_string()
    res["source_polarization_element"] = str(data.source.t)
    res["polarization_element"] = str(data.polarization.t)
    res["riemann"] = data.riemann.to_json()
    res["period_matrix"] = [[_complex_pair(z, ctx) for z in row]
                            for row in data.period_matrix.entries]
    res["polarization_matrix"] = {"scale": str(data.polarization_matrix.scale),
                                  "entries": [list(r) for r in data.polarization_matrix.entries]}
    gram = eigenbasis_gram(data.source.t, args.precision)
    gt = gram_twist(gram, None, args.precision)
    res["gram_twist"] = gt.to_json()
    res["threefold_twist"] = {"flipped_eigenlines": [4], "cm_type": cm.to_string(),
                              "weil_invariant": list(weil_invariant(cm, 3).pair)}
    notes = [
        "gram_twist scales every eigenline i = 1..4 by zeta_9^i + zeta_9^-i and so "
        "flips eigenlines 3 and 4 (Weil invariant {1,3})",
        "a unit supported on the Q(zeta_9) factor alone flips eigenline 4 only "
        "(Weil invariant {2,2}); see threefold_twist",
        "gram_twist acts on the stand-in pairing diag(2 Im sigma_v(t)) of the "
        "source polarization element",
    ]
    return {"input": {"source_cm_type": data.source.cm_type.to_string(), "quad": 3,
                      "twist_signs": "++-"},
            "results": res, "notes": notes}


def parse_twist_unit(spec: str, algebra):
    """``F:++-`` searches for a unit with those signs in factor F;
    ``F:c0,c1,...`` takes coefficients on 1, zeta+zeta^-1, ... of factor F."""
    m = re.fullmatch(r"\s*(\d+)\s*:\s*(.+?)\s*", spec)
    if not m:
        raise ParseError("expected 'factor:signs' or 'factor:c0,c1,...'", spec, 0)
    j = int(m.group(1))
    if j >= len(algebra.conductors):
        raise ParseError(f"factor {j} out of range", spec, m.start(1))
    body = m.group(2)
    if re.fullmatch(r"[+-]+", body):
        return find_sign_unit(algebra, j, body)
    n = algebra.conductors[j]
    basis = real_basis(n)
    try:
        coeffs = [int(x) for x in body.split(",")]
    except ValueError:
        raise ParseError("coefficients must be integers", spec, m.start(2)) from None
    if len(coeffs) != len(basis):
        raise ParseError(f"factor {j} needs {len(basis)} coefficients", spec, m.start(2))
    u = CyclotomicElement.scalar(n, 0)
    for c, b in zip(coeffs, basis):
        u = u + b * c
    return algebra.element(*[u if i == j else 1 for i in range(len(algebra.conductors))])


def cmd_analyze(args):
    algebra = parse_algebra(args.algebra)
    chosen = parse_embeddings(args.cmtype, algebra)
    cm = CMType(algebra, chosen)
    report = validate_cm_type(cm)
    if not report:
        raise CLIFailure(EXIT_VALIDATION, "invalid CM type",
                         {"cm_type": cm.to_string(), "violations": list(report.violations)})
    extra = {}
    if args.twist_unit:
        u = parse_twist_unit(args.twist_unit, algebra)
        extra["twisted_from"] = cm.to_string()
        extra["twist_unit"] = str(u)
        cm = twist_cm_type(cm, u)
    res, _, _ = _invariants(cm, args.quad, args.precision)
    res.update(extra)
    return {"results": res, "notes": []}


def build_parser():
    p = argparse.ArgumentParser(prog="cmfourfold",
                                description="Hodge invariants of CM abelian varieties "
                                            "over products of cyclotomic fields")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--precision", type=int, default=128, help="working bits (default 128)")
        sp.add_argument("--json", action="store_true", help="emit JSON")

    common(sub.add_parser("shioda-report", help="invariants of the Shioda CM type"))
    common(sub.add_parser("mumford-report", help="twisted CM Mumford period datum"))
    a = sub.add_parser("analyze", help="invariants of an arbitrary CM type")
    a.add_argument("--algebra", required=True, help="conductors, e.g. 9,3")
    a.add_argument("--cmtype", required=True, help="factor:exponent pairs, e.g. 0:1,0:2,1:1")
    a.add_argument("--twist-unit", default=None,
                   help="F:++- (search by signs) or F:c0,c1,... (real-basis coefficients)")
    a.add_argument("--quad", type=int, default=None,
                   help="conductor of the imaginary quadratic subfield, e.g. 3")
    common(a)
    return p


COMMANDS = {"shioda-report": cmd_shioda_report, "mumford-report": cmd_mumford_report,
            "analyze": cmd_analyze}


def _emit(doc, as_json, out):
    if as_json:
        out.write(json.dumps(doc, indent=2) + "\n")
        return
    for section in ("input", "results"):
        out.write(f"[{section}]\n")
        for k, v in doc.get(section, {}).items():
            out.write(f"{k}: {json.dumps(v)}\n")
    for k in ("error", "failed_stage", "violations"):
        if k in doc:
            out.write(f"{k}: {json.dumps(doc[k])}\n")
    for note in doc.get("notes", []):
        out.write(f"note: {note}\n")
    out.write(f"precision: {doc['precision']}\nversion: {doc['version']}\n")


def _raw_input(args):
    if args.command == "analyze":
        return {"algebra": args.algebra, "cmtype": args.cmtype, "quad": args.quad,
                "twist_unit": args.twist_unit}
    return {}


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.precision < 64:
        parser.error("--precision must be at least 64")
    doc = {"command": args.command, "input": _raw_input(args)}
    code = EXIT_OK
    try:
        doc.update(COMMANDS[args.command](args))
    except CLIFailure as exc:
        code = exc.code
        doc["error"] = str(exc)
        doc.update(exc.payload)
    except ParseError as exc:
        code = EXIT_PARSE
        doc["error"] = str(exc)
    except InvalidCMType as exc:
        code = EXIT_VALIDATION
        doc["error"] = str(exc)
        doc["violations"] = list(exc.report.violations)
    except CannotCertifySign as exc:
        code = EXIT_CERTIFY
        doc["error"] = str(exc)
    except CMError as exc:
        code = EXIT_VALIDATION
        doc["error"] = str(exc)
    doc["precision"] = args.precision
    doc["version"] = __version__
    _emit(doc, args.json, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
