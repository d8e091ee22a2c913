"""Command-line front end.

Subcommands cover every pipeline stage: defect verification, approximation
with certification, standalone certification against a supplied matrix,
structure detection, fuzzing, the equivalence-relation oracle cross-check,
the built-in invariant suites, and an ASCII rendering of detected structure.

Exit codes: 0 success / bound met, 1 semantic failure (defect bound or rank
bound violated, or no structure where one is required), 2 malformed input,
3 window too small to decide.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .errors import (
    FormatError,
    InconclusiveWindowError,
    NotQuasihomError,
    PreconditionError,
)
from .exact_linalg import matrix_from_literal, matrix_to_literal
from .quasihom import (
    QuasiHomWindow,
    delta,
    normalize,
    verify_direct,
    window_from_payload,
    window_to_payload,
)
from .apap import EquivClosure, equiv_related
from .approximator import (
    KIND_DEGENERATE,
    KIND_INCONCLUSIVE,
    KIND_NOT_QUASIHOM,
    KIND_STRUCTURED,
    StructureFinding,
    approximate,
    certify,
    detect_structure,
)
from .generators import GenSpec, fuzz_theorem, replay
from .selftest import run_suites

EXIT_OK = 0
EXIT_SEMANTIC = 1
EXIT_INPUT = 2
EXIT_INCONCLUSIVE = 3

_DEFAULT_SEED = 0


def _master_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("QHOM_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise FormatError(f"QHOM_SEED must be an integer, got {env!r}") from exc
    return _DEFAULT_SEED


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _load_json(path: str) -> object:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from exc


def _load_window(path: str) -> QuasiHomWindow:
    return window_from_payload(_load_json(path))


# -- subcommands ----------------------------------------------------------------


def _cmd_verify(args: argparse.Namespace) -> int:
    window = _load_window(args.window)
    report = verify_direct(window, args.c)
    _emit(report.to_payload())
    return EXIT_OK if report.satisfied else EXIT_SEMANTIC


def _cmd_approximate(args: argparse.Namespace) -> int:
    window = _load_window(args.window)
    try:
        cert = approximate(window, skip_verify=args.skip_verify)
    except NotQuasihomError as exc:
        payload: dict = {"error": "not-quasihom", "message": str(exc)}
        if exc.report is not None:
            payload["report"] = exc.report.to_payload()
        _emit(payload)
        return EXIT_SEMANTIC
    except InconclusiveWindowError as exc:
        _emit(
            {
                "error": "inconclusive",
                "message": str(exc),
                "m": exc.m,
                "required_N": exc.required_n,
            }
        )
        return EXIT_INCONCLUSIVE
    _emit(cert.to_payload())
    return EXIT_OK if cert.bound_satisfied else EXIT_SEMANTIC


def _cmd_certify(args: argparse.Namespace) -> int:
    window = _load_window(args.window)
    literal = _load_json(args.matrix)
    matrix = matrix_from_literal(literal)
    if matrix.n != window.n:
        raise FormatError(
            f"matrix dimension {matrix.n} does not match window dimension {window.n}"
        )
    cert = certify(window, matrix, args.bound)
    _emit(cert.to_payload())
    return EXIT_OK if cert.bound_satisfied else EXIT_SEMANTIC


def _detect_finding(args: argparse.Namespace) -> tuple[QuasiHomWindow, StructureFinding] | int:
    window = _load_window(args.window)
    if not args.skip_verify:
        report = verify_direct(window, 1)
        if not report.satisfied:
            _emit({"error": "not-quasihom", "report": report.to_payload()})
            return EXIT_SEMANTIC
    g, _ = normalize(window)
    finding = detect_structure(delta(g), skip_verify=args.skip_verify)
    return window, finding


def _cmd_detect(args: argparse.Namespace) -> int:
    outcome = _detect_finding(args)
    if isinstance(outcome, int):
        return outcome
    _, finding = outcome
    _emit(finding.to_payload())
    if finding.kind == KIND_NOT_QUASIHOM:
        return EXIT_SEMANTIC
    if finding.kind == KIND_INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_fuzz(args: argparse.Namespace) -> int:
    if args.replay is not None:
        spec = GenSpec.from_payload(_load_json(args.replay))
        _emit(replay(spec))
        return EXIT_OK
    report = fuzz_theorem(
        args.trials,
        n_range=(args.n_min, args.n_max),
        N_range=(args.N_min, args.N_max),
        master_seed=_master_seed(args.seed),
        threads=args.threads,
    )
    _emit(report.to_payload())
    return EXIT_OK if not report.violations else EXIT_SEMANTIC


def _cmd_oracle(args: argparse.Namespace) -> int:
    if (args.p is None) != (args.q is None):
        raise FormatError("--p and --q must be given together")
    pairs = (
        [(args.p, args.q)]
        if args.p is not None
        else [(p, q) for p in range(3, args.max + 1) for q in range(2, p)]
    )
    total_mismatch = 0
    rows = []
    for p, q in pairs:
        if not 2 <= q < p <= args.max:
            raise FormatError(
                f"need 2 <= q < p <= {args.max}, got p = {p}, q = {q}"
            )
        closure = EquivClosure(p, q, 3 * math.lcm(p, q))
        t = closure.trusted
        agree = mismatch = 0
        for x in range(-t, t + 1):
            for y in range(x, t + 1):
                if closure.related(x, y) == equiv_related(x, y, p, q):
                    agree += 1
                else:
                    mismatch += 1
        total_mismatch += mismatch
        row = {
            "p": p,
            "q": q,
            "gcd": math.gcd(p, q),
            "central_radius": t,
            "agree": agree,
            "mismatch": mismatch,
        }
        if args.p is not None:
            row["classes"] = closure.classes() if t <= 40 else "omitted (large)"
        rows.append(row)
    _emit({"pairs": rows, "total_mismatch": total_mismatch})
    return EXIT_OK if total_mismatch == 0 else EXIT_SEMANTIC


def _cmd_selftest(args: argparse.Namespace) -> int:
    try:
        results = run_suites(_master_seed(args.seed), only=args.only)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    all_passed = True
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        line = f"{mark} {r.suite:16s} {r.label} [{r.checks} checks]"
        if r.detail:
            line += f" -- {r.detail}"
        print(line)
        all_passed &= r.passed
    print(f"{'OK' if all_passed else 'FAILED'}: {len(results)} suites")
    return EXIT_OK if all_passed else EXIT_SEMANTIC


# -- ASCII structure rendering -----------------------------------------------------


def _symbolize(finding: StructureFinding, seq) -> tuple[list[str], dict[str, str]]:
    """Assign short names to distinct entries: letters for block positions,
    c1, c2, ... for cancellation values; negations reuse the base name."""
    p = finding.p
    assert p is not None
    names: dict = {}
    legend: dict[str, str] = {}
    block_letters = iter("abcdefghijklmnopqrstuvwxyz")
    cancel_count = 0
    symbols = []
    for i in seq.indices():
        m = seq.entry(i)
        if m.is_zero():
            symbols.append("0")
            continue
        if m in names:
            symbols.append(names[m])
            continue
        neg = -m
        if neg in names:
            symbols.append(f"-{names[neg]}")
            names[m] = f"-{names[neg]}"
            continue
        if i % p in (0, p - 1):
            cancel_count += 1
            name = f"c{cancel_count}"
        else:
            name = next(block_letters, None) or f"b{i}"
        names[m] = name
        legend[name] = json.dumps(matrix_to_literal(m))
        symbols.append(name)
    return symbols, legend


def _cmd_show(args: argparse.Namespace) -> int:
    outcome = _detect_finding(args)
    if isinstance(outcome, int):
        return outcome
    window, finding = outcome
    g, _ = normalize(window)
    seq = delta(g)
    print(f"window: n = {window.n}, N = {window.N}")
    if finding.kind == KIND_DEGENERATE:
        print("degenerate: all difference lines fit in two dimensions")
        dims = ", ".join(f"{m}:{d}" for m, d in finding.line_dims)
        print(f"line span dims by index: {dims}")
        return EXIT_OK
    if finding.kind == KIND_INCONCLUSIVE:
        print(
            f"inconclusive: third line appears at m = {finding.m}, "
            f"need N >= {finding.required_N}"
        )
        return EXIT_INCONCLUSIVE
    if finding.kind == KIND_NOT_QUASIHOM:
        print(f"no structure: {finding.reason}")
        return EXIT_SEMANTIC
    print(
        f"structured: period p = {finding.p}, third line at m = {finding.m}"
        + (" [unverified]" if finding.unverified else "")
    )
    symbols, legend = _symbolize(finding, seq)
    indices = list(seq.indices())
    width = max(len(s) for s in symbols) + 1
    chunk = max(1, 72 // (width + 1))
    for start in range(0, len(indices), chunk):
        idx_row = "  i    |"
        val_row = "  d(i) |"
        for pos in range(start, min(start + chunk, len(indices))):
            idx_row += f" {indices[pos]:>{width}}"
            val_row += f" {symbols[pos]:>{width}}"
        print(idx_row)
        print(val_row)
        print()
    print("legend:")
    for name, literal in legend.items():
        print(f"  {name} = {literal}")
    if finding.p is not None and finding.p > 2:
        inner = " ".join(symbols[seq.N + 1 : seq.N + finding.p - 1])
        print(f"palindromic block (positions 1..p-2): [ {inner} ]")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qhom",
        description=(
            "Exact-rational analysis of quasihomomorphism windows into "
            "symmetric matrices."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="scan all window pairs for the defect bound")
    p_verify.add_argument("window", help="window file (JSON)")
    p_verify.add_argument("--c", type=int, default=1, help="defect rank bound (default 1)")
    p_verify.set_defaults(handler=_cmd_verify)

    p_approx = sub.add_parser(
        "approximate", help="synthesize A and certify rank(f(x) - x*A) <= 2"
    )
    p_approx.add_argument("window")
    p_approx.add_argument(
        "--skip-verify",
        action="store_true",
        help="bypass the defect scan (synthetic inputs only)",
    )
    p_approx.set_defaults(handler=_cmd_approximate)

    p_cert = sub.add_parser(
        "certify", help="rank-check a window against a supplied matrix"
    )
    p_cert.add_argument("window")
    p_cert.add_argument("--matrix", required=True, help="matrix literal file (JSON)")
    p_cert.add_argument("--bound", type=int, default=2, help="rank bound (default 2)")
    p_cert.set_defaults(handler=_cmd_certify)

    p_detect = sub.add_parser("detect", help="classify the difference-sequence structure")
    p_detect.add_argument("window")
    p_detect.add_argument("--skip-verify", action="store_true")
    p_detect.set_defaults(handler=_cmd_detect)

    p_fuzz = sub.add_parser("fuzz", help="probe the rank bound over sampled inputs")
    p_fuzz.add_argument("--trials", type=int, default=1000)
    p_fuzz.add_argument("--n-min", type=int, default=1)
    p_fuzz.add_argument("--n-max", type=int, default=5)
    p_fuzz.add_argument("--N-min", dest="N_min", type=int, default=5)
    p_fuzz.add_argument("--N-max", dest="N_max", type=int, default=25)
    p_fuzz.add_argument("--seed", type=int, default=None, help="master seed (or QHOM_SEED)")
    p_fuzz.add_argument("--threads", type=int, default=1, help="worker thread cap")
    p_fuzz.add_argument("--replay", default=None, help="re-run one serialized spec file")
    p_fuzz.set_defaults(handler=_cmd_fuzz)

    p_oracle = sub.add_parser(
        "oracle", help="cross-check the residue closed form against the closure"
    )
    p_oracle.add_argument("--p", type=int, default=None)
    p_oracle.add_argument("--q", type=int, default=None)
    p_oracle.add_argument("--max", type=int, default=12, help="largest p (default 12)")
    p_oracle.set_defaults(handler=_cmd_oracle)

    p_self = sub.add_parser("selftest", help="run the built-in invariant suites")
    p_self.add_argument("--seed", type=int, default=None)
    p_self.add_argument("--only", default=None, help="run a single suite by id")
    p_self.set_defaults(handler=_cmd_selftest)

    p_show = sub.add_parser("show", help="ASCII rendering of detected structure")
    p_show.add_argument("window")
    p_show.add_argument("--skip-verify", action="store_true")
    p_show.set_defaults(handler=_cmd_show)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except FormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
