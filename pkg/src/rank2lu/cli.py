"""Command-line front end.

Subcommands: fingerprint, canonical, equiv, slocc, gen.  Each invocation
prints exactly one JSON document to standard output; diagnostics go to
standard error.  Exit codes: 0 equivalent/ok, 1 not equivalent, 2 error or
invalid input, 3 undecided (including the oracle's NoWitnessFound).

Raw-density inputs are decomposed on load and therefore refuse degenerate
spectra; decomposition-form inputs bypass that refusal.  The oracle method
works directly on the density matrices, so it accepts degenerate raw input.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .canonical import canonicalize, compare_canonical, build_witness, unitary_eig
from .engine import (
    EQUIVALENT,
    NOT_EQUIVALENT,
    UNDECIDED,
    Verdict,
    _descending,
    _require_in_class,
    decide_lu,
    decide_slocc,
)
from .errors import (
    ClassConditionViolated,
    DegenerateSpectrum,
    GenerationFailure,
    InvalidState,
    NotHermitian,
    NotNormalized,
    NotUnitary,
    OrthogonalityUnsatisfiable,
    ParseError,
    Rank2LUError,
    RankNotTwo,
    ShapeMismatch,
    SingularB,
    WitnessVerificationFailure,
)
from .invariants import fingerprint
from .lab import (
    OracleConfig,
    equivalent_pair,
    inequivalent_pair,
    oracle_search_rho,
    random_class_state,
    rotation_reflection_family,
)
from .numerics import DEFAULT_TOL, ToleranceConfig
from .states import BipartiteShape, DensityMatrix, RankTwoState, assemble
from .statefile import (
    as_rank_two,
    density_to_obj,
    load_document,
    matrix_to_obj,
    state_to_obj,
    write_document,
)

EXIT_OK = 0
EXIT_INEQUIVALENT = 1
EXIT_ERROR = 2
EXIT_UNDECIDED = 3

_ERROR_LABELS = {
    ParseError: "parse error",
    RankNotTwo: "rank not two",
    DegenerateSpectrum: "degenerate spectrum",
    ClassConditionViolated: "class condition violated",
    SingularB: "B singular",
    InvalidState: "invalid state",
    NotHermitian: "not Hermitian",
    NotUnitary: "not unitary",
    NotNormalized: "not normalized",
    ShapeMismatch: "shape mismatch",
    OrthogonalityUnsatisfiable: "orthogonality unsatisfiable",
    GenerationFailure: "generation failed",
}


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _parse_tol(text: str | None) -> ToleranceConfig:
    """--tol value: a bare float sets tol_eq; key=value pairs set fields."""
    if text is None:
        return DEFAULT_TOL
    try:
        return ToleranceConfig(tol_eq=float(text))
    except ValueError:
        pass
    fields = {}
    for part in text.split(","):
        if "=" not in part:
            raise ParseError(f"cannot parse --tol component {part!r}")
        key, _, value = part.partition("=")
        key = key.strip()
        if key not in ("tol_rank", "tol_eq", "tol_degenerate"):
            raise ParseError(f"unknown --tol field {key!r}")
        try:
            fields[key] = float(value)
        except ValueError:
            raise ParseError(f"--tol field {key} needs a number, got {value!r}") from None
    try:
        return ToleranceConfig(**fields)
    except ValueError as exc:
        raise ParseError(f"invalid --tol: {exc}") from None


def _complex_pairs(values: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.atleast_1d(values)]


def _witness_to_obj(witness) -> dict:
    if hasattr(witness, "u1"):
        return {
            "u1": matrix_to_obj(witness.u1),
            "u2": matrix_to_obj(witness.u2),
            "residual": float(witness.residual),
        }
    return {
        "p": matrix_to_obj(witness.p),
        "q": matrix_to_obj(witness.q),
        "residual": float(witness.residual),
    }


def _verdict_exit(decision: str) -> int:
    if decision == EQUIVALENT:
        return EXIT_OK
    if decision == NOT_EQUIVALENT:
        return EXIT_INEQUIVALENT
    return EXIT_UNDECIDED


def _report_verdict(verdict, witness_path: str | None) -> int:
    obj = {
        "decision": verdict.decision,
        "method": verdict.method,
        "diagnosis": verdict.diagnosis,
        "residual": float(verdict.witness.residual) if verdict.witness else None,
    }
    _emit(obj)
    if witness_path and verdict.witness is not None:
        write_document(witness_path, _witness_to_obj(verdict.witness))
    return _verdict_exit(verdict.decision)


def cmd_fingerprint(args) -> int:
    cfg = _parse_tol(args.tol)
    state = as_rank_two(load_document(args.path, cfg), cfg)
    fp = fingerprint(state, cfg)
    _emit(
        {
            "purity": fp.purity,
            "trace_powers": _complex_pairs(fp.trace_powers),
            "rank_a": fp.rank_a,
            "rank_b": fp.rank_b,
            "rank_ba_powers": list(fp.rank_ba_powers),
        }
    )
    return EXIT_OK


def cmd_canonical(args) -> int:
    cfg = _parse_tol(args.tol)
    state = as_rank_two(load_document(args.path, cfg), cfg)
    form = canonicalize(state, cfg)
    spectra = []
    for block in form.blocks:
        if block.zero:
            spectra.append([])
            continue
        values, _ = unitary_eig(form.gamma[block.start : block.stop, block.start : block.stop])
        spectra.append(_complex_pairs(values))
    _emit(
        {
            "delta": [float(d) for d in form.delta],
            "blocks": [[block.start, block.stop] for block in form.blocks],
            "gamma_spectra": spectra,
        }
    )
    return EXIT_OK


def _load_rho(path, cfg) -> tuple[np.ndarray, BipartiteShape]:
    loaded = load_document(path, cfg)
    if isinstance(loaded, DensityMatrix):
        return loaded.rho, loaded.shape
    return assemble(loaded, cfg).rho, loaded.shape


def _decide_canonical_only(s1: RankTwoState, s2: RankTwoState, cfg: ToleranceConfig):
    """Equivalence by canonical comparison alone (plus the eigenvalue check)."""
    _require_in_class(s1, "state 1", cfg)
    _require_in_class(s2, "state 2", cfg)
    o1, o2 = _descending(s1), _descending(s2)
    for label, state in (("state 1", o1), ("state 2", o2)):
        if abs(state.lambda1 - state.lambda2) < cfg.tol_degenerate:
            return Verdict(
                decision=UNDECIDED,
                method="canonical",
                diagnosis=f"{label} has a near-degenerate spectrum; try --method oracle",
            )
    if abs(o1.lambda1 - o2.lambda1) > cfg.tol_eq:
        return Verdict(
            decision=NOT_EQUIVALENT,
            method="canonical",
            diagnosis="eigenvalue spectra differ",
        )
    c1 = canonicalize(o1, cfg)
    c2 = canonicalize(o2, cfg)
    comparison = compare_canonical(c1, c2, cfg)
    if not comparison:
        return Verdict(
            decision=NOT_EQUIVALENT,
            method="canonical",
            diagnosis=(
                f"canonical forms differ ({comparison.reason}, "
                f"error {comparison.max_error:.3e})"
            ),
        )
    try:
        witness = build_witness(o1, c1, o2, c2, comparison, cfg)
    except WitnessVerificationFailure as exc:
        return Verdict(
            decision=UNDECIDED,
            method="canonical",
            diagnosis=f"canonical forms agree but witness assembly failed: {exc}",
        )
    return Verdict(
        decision=EQUIVALENT,
        method="canonical",
        diagnosis="canonical forms agree; witness verified",
        witness=witness,
    )


def cmd_equiv(args) -> int:
    cfg = _parse_tol(args.tol)
    if args.method == "oracle":
        rho1, shape1 = _load_rho(args.path1, cfg)
        rho2, shape2 = _load_rho(args.path2, cfg)
        if shape1 != shape2:
            raise ShapeMismatch(f"shapes differ: {shape1} vs {shape2}")
        result = oracle_search_rho(rho1, rho2, shape1, OracleConfig(), seed=args.seed)
        _emit(
            {
                "decision": result.verdict,
                "method": "oracle",
                "diagnosis": None,
                "residual": result.best_residual,
            }
        )
        if args.witness and result.verdict == "Equivalent":
            write_document(args.witness, _witness_to_obj(result.best_witness))
        return EXIT_OK if result.verdict == "Equivalent" else EXIT_UNDECIDED
    try:
        s1 = as_rank_two(load_document(args.path1, cfg), cfg)
        s2 = as_rank_two(load_document(args.path2, cfg), cfg)
    except DegenerateSpectrum:
        _emit(
            {
                "decision": UNDECIDED,
                "method": args.method,
                "diagnosis": "degenerate spectrum; try --method oracle",
                "residual": None,
            }
        )
        return EXIT_UNDECIDED
    if args.method == "canonical":
        verdict = _decide_canonical_only(s1, s2, cfg)
    else:
        verdict = decide_lu(s1, s2, cfg)
    return _report_verdict(verdict, args.witness)


def cmd_slocc(args) -> int:
    cfg = _parse_tol(args.tol)
    s1 = as_rank_two(load_document(args.path1, cfg), cfg)
    s2 = as_rank_two(load_document(args.path2, cfg), cfg)
    verdict = decide_slocc(s1, s2, cfg)
    return _report_verdict(verdict, args.witness)


def _pair_paths(out: str) -> tuple[str, str]:
    stem = out[:-5] if out.endswith(".json") else out
    return f"{stem}-1.json", f"{stem}-2.json"


def cmd_gen(args) -> int:
    cfg = _parse_tol(args.tol)
    if args.family is not None:
        state = rotation_reflection_family(args.theta, args.gamma, args.lam)
        state.validate(cfg)
        write_document(args.out, state_to_obj(state))
        _emit({"written": [args.out]})
        return EXIT_OK
    if args.random:
        shape = BipartiteShape(m=args.m, n=args.n)
        state = random_class_state(shape, args.lam, seed=args.seed, cfg=cfg)
        write_document(args.out, state_to_obj(state))
        _emit({"written": [args.out]})
        return EXIT_OK
    if args.equivalent_pair is not None:
        base = as_rank_two(load_document(args.equivalent_pair, cfg), cfg)
        image, witness = equivalent_pair(base, seed=args.seed, cfg=cfg)
        write_document(args.out, state_to_obj(image))
        _emit({"written": [args.out], "witness_residual": witness.residual})
        return EXIT_OK
    if args.inequivalent_pair:
        shape = BipartiteShape(m=args.m, n=args.n)
        s1, s2 = inequivalent_pair(shape, args.lam, seed=args.seed, cfg=cfg)
        path1, path2 = _pair_paths(args.out)
        write_document(path1, state_to_obj(s1))
        write_document(path2, state_to_obj(s2))
        _emit({"written": [path1, path2]})
        return EXIT_OK
    raise ParseError("choose one of --family, --random, --equivalent-pair, --inequivalent-pair")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rank2lu",
        description=(
            "Decide local-unitary equivalence of rank-two bipartite mixed "
            "states with equal-Gram coefficient matrices."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_tol(p):
        p.add_argument(
            "--tol",
            default=None,
            help=(
                "a float sets the comparison tolerance; "
                "key=value[,key=value...] sets tol_rank, tol_eq, tol_degenerate"
            ),
        )

    p = sub.add_parser("fingerprint", help="print the invariant set of a state file")
    p.add_argument("path")
    add_tol(p)
    p.set_defaults(func=cmd_fingerprint)

    p = sub.add_parser("canonical", help="print delta, blocks, and gamma spectra")
    p.add_argument("path")
    add_tol(p)
    p.set_defaults(func=cmd_canonical)

    p = sub.add_parser("equiv", help="decide local-unitary equivalence of two files")
    p.add_argument("path1")
    p.add_argument("path2")
    p.add_argument(
        "--method",
        choices=("theorem", "canonical", "oracle"),
        default="theorem",
        help="decision route (default: theorem, confirmed canonically)",
    )
    p.add_argument("--witness", default=None, help="write the witness JSON here")
    p.add_argument("--seed", type=int, default=0, help="oracle restart seed")
    add_tol(p)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("slocc", help="sufficient contragredient-equivalence check")
    p.add_argument("path1")
    p.add_argument("path2")
    p.add_argument("--witness", default=None, help="write the witness JSON here")
    add_tol(p)
    p.set_defaults(func=cmd_slocc)

    p = sub.add_parser("gen", help="generate state files")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument(
        "--family",
        choices=("two-qubit",),
        default=None,
        help="rotation/reflection two-qubit family",
    )
    mode.add_argument("--random", action="store_true", help="random in-class state")
    mode.add_argument(
        "--equivalent-pair",
        metavar="BASE",
        default=None,
        help="Haar image of the base state file",
    )
    mode.add_argument(
        "--inequivalent-pair",
        action="store_true",
        help="certified inequivalent pair (writes -1/-2 files)",
    )
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--lambda", dest="lam", type=float, default=0.7)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output path (pairs add -1/-2)")
    add_tol(p)
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Rank2LUError as exc:
        label = _ERROR_LABELS.get(type(exc))
        detail = str(exc)
        message = f"{label}: {detail}" if label else detail
        print(f"error: {message}", file=sys.stderr)
        return EXIT_ERROR


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
