"""Command line front end.

Three subcommands:

* ``tmprod eval``: evaluate one truncated product and print its report as
  JSON (reports are JSON only; asking for CSV is a usage error).
* ``tmprod verify``: run one verification suite (or ``all``) and print the
  result rows as JSON or CSV, with a per-suite summary on stderr.
* ``tmprod sweep``: grid sweep of the 2cos endpoint family over q, r, i,
  CSV by default.

Exit codes: 0 on success, 1 when at least one verification row failed,
2 for usage errors (bad flags, malformed family JSON, empty sweep ranges,
unwritable --out paths), 3 for evaluation errors (inadmissible inputs,
poles, unmatched zero factors).

The TMPROD_THREADS environment variable caps worker threads regardless of
--blocks.
"""

from __future__ import annotations

import argparse
import json
import sys

from tmprod.tm_core import Substitution, zero_substitution
from tmprod.product_engine import (
    EvalOptions,
    EvalReport,
    InvalidFamilyError,
    NonCancellableZeroError,
    OnePlusOverOdd,
    eval_I1,
    eval_I2,
    eval_product,
    eval_ratio_I2_I1,
    eval_rational_exponent,
    intro_family,
)
from tmprod.closed_forms import (
    SUITES,
    VerificationResult,
    _result,
    _tols,
    corollary2_family,
    corollary3_family,
    corollary3_s,
    corollary3_value,
    results_to_csv,
    results_to_json,
    verify,
)

_DEFAULT_TERMS = 1 << 22
_INTRO_NAMES = ("intro-p1", "intro-p2", "intro-wallis", "intro-woods-robbins")
_NAMED_FAMILIES = ("stuttered-ratio", "corollary2", "corollary3") + _INTRO_NAMES


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tmprod",
        description="Thue-Morse driven infinite products: evaluation and identity checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("eval", help="evaluate one truncated product, report as JSON")
    pe.add_argument(
        "--family",
        required=True,
        help=f"one of {', '.join(_NAMED_FAMILIES)}, or an inline JSON object "
        'with keys {"phi"}, {"phi","psi"} or {"combo"[, "start_index"]}',
    )
    pe.add_argument("--q", type=int, help="block length (stuttered-ratio, corollary2/3)")
    pe.add_argument("--r", type=int, help="residue 0 <= r <= q-1 (corollary2/3)")
    pe.add_argument("--s", type=float, help="shift parameter (corollary2)")
    pe.add_argument("--i", type=int, default=0, help="period index (corollary3, default 0)")
    pe.add_argument("--terms", type=int, default=_DEFAULT_TERMS,
                    help=f"truncation length (default {_DEFAULT_TERMS})")
    pe.add_argument("--blocks", type=int, default=1, help="parallel chunks in flight")
    pe.add_argument("--format", choices=("json", "csv"), default="json")
    pe.add_argument("--out", help="write the report here instead of stdout")

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("--suite", required=True,
                    help="suite name or 'all': " + ", ".join(SUITES))
    pv.add_argument("--q-max", dest="q_max", type=int, default=4,
                    help="largest block length for the grid suites (default 4)")
    pv.add_argument("--terms", type=int, default=None,
                    help="truncation length for product suites "
                    f"(default {_DEFAULT_TERMS}; intro chain 10^7)")
    pv.add_argument("--tol", type=float, default=None,
                    help="override every tolerance of the suite")
    pv.add_argument("--blocks", type=int, default=1)
    pv.add_argument("--format", choices=("json", "csv"), default="json")
    pv.add_argument("--out", help="write the rows here instead of stdout")

    ps = sub.add_parser("sweep", help="sweep the 2cos endpoint family over q, r, i")
    ps.add_argument("--q", default="2,3,4", help="comma-separated block lengths")
    ps.add_argument("--r", default=None,
                    help="comma-separated residues (default: all r < q)")
    ps.add_argument("--i", default="-1,0,1", help="comma-separated period indices")
    ps.add_argument("--terms", type=int, default=_DEFAULT_TERMS)
    ps.add_argument("--tol", type=float, default=None)
    ps.add_argument("--blocks", type=int, default=1)
    ps.add_argument("--format", choices=("json", "csv"), default="csv")
    ps.add_argument("--out", help="write the rows here instead of stdout")
    return parser


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _required(value, flag: str, parser: argparse.ArgumentParser):
    if value is None:
        parser.error(f"{flag} is required for this family")
    return value


def _json_family_report(text: str, opts: EvalOptions,
                        parser: argparse.ArgumentParser) -> EvalReport:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        parser.error(f"--family JSON is invalid: {exc}")
    if not isinstance(obj, dict):
        parser.error("--family JSON must be an object")
    keys = set(obj)
    try:
        if keys == {"phi"}:
            subs = {"phi": Substitution.from_json_dict(obj["phi"])}
        elif keys == {"phi", "psi"}:
            subs = {
                "phi": Substitution.from_json_dict(obj["phi"]),
                "psi": Substitution.from_json_dict(obj["psi"]),
            }
        elif keys in ({"combo"}, {"combo", "start_index"}):
            subs = {
                "combo": Substitution.from_json_dict(obj["combo"]),
                "start_index": int(obj.get("start_index", 0)),
            }
        else:
            raise ValueError(
                'keys must be {"phi"}, {"phi","psi"} or {"combo"[, "start_index"]}'
            )
    except (ValueError, TypeError) as exc:
        parser.error(f"--family JSON is malformed: {exc}")
    # admissibility failures below are evaluation errors, not usage errors
    if "combo" in subs:
        return eval_product(
            OnePlusOverOdd(combo=subs["combo"], start_index=subs["start_index"]), opts
        )
    if "psi" in subs:
        return eval_I2(subs["phi"], subs["psi"], opts)
    return eval_I1(subs["phi"], opts)


def _cmd_eval(args, parser: argparse.ArgumentParser) -> int:
    if args.format != "json":
        parser.error("eval reports are JSON only; --format csv applies to verify and sweep")
    opts = EvalOptions(n_terms=args.terms, parallel_blocks=args.blocks)
    fam = args.family.strip()
    if fam.startswith("{"):
        report = _json_family_report(fam, opts, parser)
    elif fam == "stuttered-ratio":
        q = _required(args.q, "--q", parser)
        report = eval_ratio_I2_I1(zero_substitution(q), zero_substitution(q), opts)
    elif fam == "corollary2":
        q = _required(args.q, "--q", parser)
        r = _required(args.r, "--r", parser)
        s = _required(args.s, "--s", parser)
        report = eval_rational_exponent(corollary2_family(q, r, s), opts)
    elif fam == "corollary3":
        q = _required(args.q, "--q", parser)
        r = _required(args.r, "--r", parser)
        report = eval_rational_exponent(corollary3_family(q, r, args.i), opts)
    elif fam in _INTRO_NAMES:
        report = eval_product(intro_family(fam), opts, _align=False)
    else:
        parser.error(f"unknown family {fam!r}; expected one of {_NAMED_FAMILIES} or JSON")
    _emit(report.to_json() + "\n", args.out)
    return 0


def _cmd_verify(args, parser: argparse.ArgumentParser) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in SUITES:
            parser.error(f"unknown suite {name!r}; expected one of {SUITES} or 'all'")
    rows: list[VerificationResult] = []
    for name in names:
        params = {"q_max": args.q_max}
        if args.tol is not None:
            params["tol"] = args.tol
        terms = args.terms
        if terms is None:
            terms = 10**7 if name == "intro_chain" else _DEFAULT_TERMS
        opts = EvalOptions(n_terms=terms, parallel_blocks=args.blocks)
        suite_rows = verify(name, params, opts)
        failures = sum(1 for row in suite_rows if not row.passed)
        status = "ok" if failures == 0 else f"{failures} FAILED"
        print(f"{name}: {len(suite_rows) - failures}/{len(suite_rows)} rows pass ({status})",
              file=sys.stderr)
        rows.extend(suite_rows)
    if args.format == "csv":
        _emit(results_to_csv(rows), args.out)
    else:
        _emit(results_to_json(rows) + "\n", args.out)
    return 0 if all(row.passed for row in rows) else 1


def _int_list(text: str, flag: str, parser: argparse.ArgumentParser) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        parser.error(f"{flag} expects a comma-separated list of integers")
    return values


def _cmd_sweep(args, parser: argparse.ArgumentParser) -> int:
    import time

    qs = _int_list(args.q, "--q", parser)
    i_values = _int_list(args.i, "--i", parser)
    r_values = _int_list(args.r, "--r", parser) if args.r is not None else None
    cells = []
    for q in qs:
        rs = r_values if r_values is not None else list(range(q))
        cells.extend((q, r, i) for r in rs if 0 <= r < q for i in i_values)
    if not cells:
        parser.error("the sweep ranges select no (q, r, i) cells")
    opts = EvalOptions(n_terms=args.terms, parallel_blocks=args.blocks)
    rows = []
    for q, r, i in cells:
        t0 = time.perf_counter()
        params = {"q": q, "r": r, "i": i, "s": corollary3_s(q, r, i)}
        tol = _tols("corollary3", params if args.tol is None else {"tol": args.tol})
        report = eval_rational_exponent(corollary3_family(q, r, i), opts)
        rows.append(
            _result(
                "corollary3", params, report.value, corollary3_value(q, r),
                tol["numeric_abs"], report.n_terms_used, t0,
                notes="rational family vs 2cos",
            )
        )
    if args.format == "json":
        _emit(results_to_json(rows) + "\n", args.out)
    else:
        _emit(results_to_csv(rows), args.out)
    return 0 if all(row.passed for row in rows) else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "eval":
            return _cmd_eval(args, parser)
        if args.command == "verify":
            return _cmd_verify(args, parser)
        return _cmd_sweep(args, parser)
    except OSError as exc:
        parser.error(f"cannot write --out file: {exc}")
    except (InvalidFamilyError, NonCancellableZeroError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
