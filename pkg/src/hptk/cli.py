"""Command-line driver: ``hptk validate|cohomology|transfer|deform|massey``.

Exit codes: 0 success, 1 structure invalid, 2 verification failure,
3 parse or usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .algebra import (
    AlgebraPresentation,
    Bracket,
    LawResult,
    StructureReport,
    Witness,
    bracket_from_delta,
    check_dga,
    check_dgla,
    check_gbv,
    check_gerstenhaber,
    check_poisson,
    cohomology,
)
from .certificate import Certificate, operation_table, vec_terms
from .coalgebra import check_linfty, check_stasheff
from .document import ParseError, load_text, parse
from .graded import DEFAULT_WORD_CAP, SYMMETRIC, TENSOR
from .linalg import axpy
from .perturbation import deform_dga, deform_poisson_gerstenhaber
from .splitting import SplittingError, compute_splitting, hodge_splitting, make_sdr, verify_sdr
from .transfer import (
    TransferError,
    chen_transfer,
    extract_infinity,
    hain_transfer,
    twisting_cochain,
    verify_flatness,
    verify_twisting_cochain,
)

OK, INVALID, VERIFY_FAILED, USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# helpers


def slot_cap() -> int:
    raw = os.environ.get("HPTK_SLOT_CAP")
    return int(raw) if raw and raw.isdigit() else DEFAULT_WORD_CAP


def word_count(n: int, length: int, flavor: str) -> int:
    from math import comb

    if flavor == TENSOR:
        return sum(n ** k for k in range(length + 1))
    return sum(comb(n + k - 1, k) for k in range(length + 1))


def check_slots(p: AlgebraPresentation, hdim: int, bounds: Sequence[tuple]) -> None:
    for length, flavor in bounds:
        slots = p.dim * word_count(hdim, length, flavor)
        if slots > slot_cap():
            raise UsageError(
                f"{p.dim} basis elements x {word_count(hdim, length, flavor)} words of length <= {length} "
                f"= {slots} coefficient slots exceeds the cap {slot_cap()} (set HPTK_SLOT_CAP to raise it)"
            )


def declared_report(p: AlgebraPresentation) -> StructureReport:
    try:
        if p.bv_operator is not None:
            return check_gbv(p)
        if p.bracket is not None:
            if p.bracket.shift == -1:
                return check_gerstenhaber(p)
            if p.product or p.unit is not None:
                return check_poisson(p)
            return check_dgla(p)
        return check_dga(p)
    except ValueError as exc:
        return StructureReport([LawResult("declaration", 1, 1, [Witness((), {str(exc): Fraction(1)})])])


def commutator_bracket(p: AlgebraPresentation) -> Bracket:
    entries = {}
    for i in range(p.dim):
        for j in range(p.dim):
            v = p.mul({i: Fraction(1)}, {j: Fraction(1)})
            sign = -1 if (p.deg(i) * p.deg(j)) % 2 else 1
            axpy(v, p.mul({j: Fraction(1)}, {i: Fraction(1)}), -sign)
            if v:
                entries[(i, j)] = v
    return Bracket(entries, 0, 0)


def lie_reading(p: AlgebraPresentation, allow_commutator: bool) -> Optional[AlgebraPresentation]:
    if p.bracket is not None:
        return p
    if p.bv_operator is not None:
        return p.with_bracket(bracket_from_delta(p))
    if allow_commutator:
        return p.with_bracket(commutator_bracket(p))
    return None


def choose_splitting(p: AlgebraPresentation, how: str, cert: Certificate):
    if how == "auto":
        how = "hodge" if isinstance(p.gram, dict) else "echelon"
    if how == "hodge":
        split, hodge = hodge_splitting(p, p.gram if isinstance(p.gram, dict) else None)
        cert.add_report("hodge", hodge.verify(p, split))
    else:
        split = compute_splitting(p)
    cert.add_report("splitting", split.verify())
    cert.add_report("sdr", verify_sdr(make_sdr(split)))
    return split


def _labels(split):
    A, H = split.parent.space, split.hspace
    return A.symbol, H.symbol


def derivation_table(ring, images) -> Dict[str, List[List[str]]]:
    H = ring.split.hspace
    out = {}
    for j in sorted(images):
        if images[j]:
            out[f"d X{H.symbol(j)}"] = vec_terms(images[j], ring.R.format)
    return out


def series_table(ring, x) -> Dict[str, List[List[str]]]:
    A = ring.p.space
    out = {}
    for u, vec in sorted(ring.by_word(x).items(), key=lambda kv: (len(kv[0]), kv[0])):
        out[ring.R.format(u)] = vec_terms(vec, A.symbol)
    return out


def emit(cert: Certificate, args) -> None:
    cert.finish()
    sys.stdout.write(cert.render())
    if getattr(args, "certificate", None):
        with open(args.certificate, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(cert.serialize())


def load(args):
    source, text = load_text(args.file)
    doc = parse(text)
    return source, doc.serialize(), doc.presentation()


def validated(args, command, params):
    source, text, p = load(args)
    cert = Certificate(command, source, text, params)
    rep = declared_report(p)
    cert.add_report("structure", rep)
    return p, cert, rep.passed


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    p, cert, ok = validated(args, "validate", {})
    emit(cert, args)
    return OK if ok else INVALID


def cmd_cohomology(args) -> int:
    p, cert, ok = validated(args, "cohomology", {"splitting": args.splitting})
    if not ok:
        emit(cert, args)
        return INVALID
    coh = cohomology(p)
    split = choose_splitting(p, args.splitting, cert)
    cert.add_check("betti_matches_rank_count", coh.betti == split.betti(),
                   {"rank": coh.betti, "splitting": split.betti()})
    A, H = _labels(split)
    cert.add_table("betti", {str(k): v for k, v in sorted(split.betti().items())})
    cert.add_table("harmonic", {H(j): vec_terms(h, A) for j, h in enumerate(split.harmonic)})
    prod = {}
    for i, x in enumerate(split.harmonic):
        for j, y in enumerate(split.harmonic):
            v = split.projection.apply(p.mul(x, y))
            if v:
                prod[(i, j)] = v
    cert.add_table("product", operation_table(prod, H, H))
    emit(cert, args)
    return OK if cert.passed else VERIFY_FAILED


def cmd_transfer(args) -> int:
    if args.arity < 2:
        raise UsageError("--arity must be at least 2")
    params = {"arity": args.arity, "mode": args.mode, "splitting": args.splitting}
    p, cert, ok = validated(args, "transfer", params)
    if not ok:
        emit(cert, args)
        return INVALID
    split = choose_splitting(p, args.splitting, cert)
    A, H = _labels(split)
    if args.mode == "ainfty":
        check_slots(p, split.hspace.dim, [(args.arity, TENSOR)])
        res = chen_transfer(p, split, args.arity)
        cert.add_report("flatness", verify_flatness(res))
        m = extract_infinity(res)
        cert.add_report("stasheff", check_stasheff(m, args.arity))
        cert.add_report("twisting_cochain", verify_twisting_cochain(twisting_cochain(res)))
        m1 = {w: v for w, v in m.maps.items() if len(w) == 1 and v}
        cert.add_check("m1_zero", not m1)
        induced = {}
        for i, x in enumerate(split.harmonic):
            for j, y in enumerate(split.harmonic):
                v = split.projection.apply(p.mul(x, y))
                if v:
                    induced[(i, j)] = v
        m2 = {w: v for w, v in m.maps.items() if len(w) == 2 and v}
        cert.add_check("m2_equals_induced_product", m2 == induced)
        for n in range(1, args.arity + 1):
            cert.add_table(f"m{n}", operation_table(m.arity(n), H, H))
    else:
        q = lie_reading(p, allow_commutator=True)
        if p.bracket is None and p.bv_operator is None:
            cert.add_report("commutator_reading", check_dgla(q))
        check_slots(q, split.hspace.dim, [(args.arity, SYMMETRIC)])
        res = hain_transfer(q, split, args.arity)
        cert.add_report("flatness", verify_flatness(res))
        l = extract_infinity(res)
        cert.add_report("jacobi", check_linfty(l, args.arity))
        for n in range(1, args.arity + 1):
            cert.add_table(f"l{n}", operation_table(l.arity(n), H, H))
    cert.add_table("omega", series_table(res.ring, res.omega))
    cert.add_table("partial", derivation_table(res.ring, res.derivation.images))
    emit(cert, args)
    return OK if cert.passed else VERIFY_FAILED


def cmd_deform(args) -> int:
    if args.word_bound < 2 or args.sym_bound < 1:
        raise UsageError("--word-bound must be >= 2 and --sym-bound >= 1")
    params = {"N_tensor": args.word_bound, "N_sym": args.sym_bound, "initiator": args.initiator,
              "splitting": args.splitting}
    p, cert, ok = validated(args, "deform", params)
    if not ok:
        emit(cert, args)
        return INVALID
    split = choose_splitting(p, args.splitting, cert)
    A, H = _labels(split)
    q = lie_reading(p, allow_commutator=False)
    h = split.hspace.dim
    if q is None:
        check_slots(p, h, [(args.word_bound, TENSOR), (args.sym_bound, TENSOR)])
        res = deform_dga(p, split, args.word_bound, args.sym_bound)
        final = "partial_aa"
    else:
        check_slots(p, h, [(args.word_bound, TENSOR), (args.sym_bound, SYMMETRIC)])
        res = deform_poisson_gerstenhaber(q, split, args.word_bound, args.sym_bound, args.initiator)
        final = "partial_aL"
    cert.add_report("stage_one", verify_flatness(res.stage_one))
    cert.add_table("partial_a", derivation_table(res.stage_one.ring, res.stage_one.derivation.images))
    if res.lie is not None:
        cert.add_report("lie", verify_flatness(res.lie))
        cert.add_table("partial_L", derivation_table(res.lie.ring, res.lie.derivation.images))
        cert.add_table("omega_L", series_table(res.lie.ring, res.lie.omega))
    cert.add_report("deformation", res.report)
    if res.bpl is not None:
        sdr = res.bpl.sdr
        D = {(k,): sdr.d_small({k: Fraction(1)}) for k in sdr.small}
        cert.add_table("D", operation_table(D, sdr.label_small, sdr.label_small))
        cert.add_table(final, operation_table(res.structure.table(), sdr.label_small, sdr.label_small))
    emit(cert, args)
    return OK if cert.passed else VERIFY_FAILED


def _class_index(H, label: str) -> int:
    for cand in (label, f"[{label}]"):
        if cand in H:
            return H.index(cand)
    raise UsageError(f"unknown cohomology class {label!r}; known: {', '.join(H.symbols)}")


def cmd_massey(args) -> int:
    params = {"classes": [args.x, args.y, args.z], "splitting": args.splitting}
    p, cert, ok = validated(args, "massey", params)
    if not ok:
        emit(cert, args)
        return INVALID
    split = choose_splitting(p, args.splitting, cert)
    H = split.hspace
    word = tuple(_class_index(H, s) for s in (args.x, args.y, args.z))
    res = chen_transfer(p, split, 3)
    cert.add_report("flatness", verify_flatness(res))
    m = extract_infinity(res)
    cert.add_report("stasheff", check_stasheff(m, 3))
    cert.add_table("m3", operation_table({word: m.m(word)}, H.symbol, H.symbol))
    emit(cert, args)
    return OK if cert.passed else VERIFY_FAILED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hptk", description="Exact homotopy transfer for finite-dimensional DG algebras.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, splitting=True):
        sp.add_argument("file", help="algebra document, or @NAME for a shipped corpus model")
        sp.add_argument("--certificate", metavar="PATH", help="write the machine-readable certificate")
        if splitting:
            sp.add_argument("--splitting", choices=["auto", "echelon", "hodge"], default="auto")

    common(sub.add_parser("validate", help="check the declared structure laws"), splitting=False)
    common(sub.add_parser("cohomology", help="Betti numbers, harmonic representatives, product"))
    t = sub.add_parser("transfer", help="transferred A-infinity or L-infinity structure")
    common(t)
    t.add_argument("--arity", type=int, default=4)
    t.add_argument("--mode", choices=["ainfty", "linfty"], default="ainfty")
    d = sub.add_parser("deform", help="formal deformation pipelines")
    common(d)
    d.add_argument("--word-bound", type=int, default=4)
    d.add_argument("--sym-bound", type=int, default=2)
    d.add_argument("--initiator", choices=["aL", "L"], default="aL")
    m = sub.add_parser("massey", help="m3 on three cohomology classes")
    common(m)
    for name in ("x", "y", "z"):
        m.add_argument(name)
    return ap


COMMANDS = {
    "validate": cmd_validate,
    "cohomology": cmd_cohomology,
    "transfer": cmd_transfer,
    "deform": cmd_deform,
    "massey": cmd_massey,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"hptk: usage error: {exc}", file=sys.stderr)
        return USAGE
    except ParseError as exc:
        for err in exc.errors:
            print(f"hptk: {err}", file=sys.stderr)
        return USAGE
    except (FileNotFoundError, IsADirectoryError, UnicodeDecodeError) as exc:
        print(f"hptk: cannot read input: {exc}", file=sys.stderr)
        return USAGE
    except (TransferError, SplittingError, AssertionError) as exc:
        print(f"hptk: verification failed: {exc}", file=sys.stderr)
        return VERIFY_FAILED


if __name__ == "__main__":
    sys.exit(main())
