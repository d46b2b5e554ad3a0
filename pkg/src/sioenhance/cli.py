"""Command-line front end.

Exit codes: 0 ok, 1 property failure, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import time

from . import io as sio
from .channel import apply_stochastic, complete_instrument, kraus_set
from .errors import InputError, NoConvergence, ZeroProbability
from .optimizer import analyze, qubit_closed_form
from .oracle import monte_carlo_success
from .state import DEFAULT_TOL, l1_coherence, qubit_state
from .verify import run_all

EXIT_OK, EXIT_PROPERTY, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
QUBIT_AGREEMENT_TOL = 1e-9


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", metavar="PATH", help="state JSON file")
    common.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
    common.add_argument("--trials", type=_positive_int, default=100_000)
    common.add_argument("--samples", type=_positive_int, default=100_000)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(
        prog="sioenhance",
        description="Maximal l1-coherence enhancement by stochastic strictly incoherent operations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="optimal coherence, probability and Kraus operator")
    sub.add_parser("enhance", parents=[common], help="apply the optimal Kraus operator and print the output state")
    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo estimate of the success probability")
    p.add_argument("--kraus", metavar="PATH", help="Kraus JSON file to sample instead of the optimal operator")
    p = sub.add_parser("verify", parents=[common], help="run the seeded oracle campaigns")
    p.add_argument("--states", type=_positive_int, help="override every campaign size")
    p = sub.add_parser("qubit", parents=[common], help="closed forms for a Bloch-parameterized qubit")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    return parser


def _emit_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _require_input(args):
    if not args.input:
        raise InputError("--input is required for this command")
    try:
        return sio.load_state(args.input, args.tol)
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror}") from None


def cmd_analyze(args) -> tuple[int, str]:
    rho = _require_input(args)
    res = analyze(rho)
    if args.format == "json":
        return EXIT_OK, sio.dumps(sio.result_to_json(res))
    header = ["cInput", "cMax", "pMax", "block", "indices", "weight", "lambda", "blockPMax", "winning", "phi"]
    rows = [
        [repr(res.c_input), repr(res.c_max), repr(res.p_max), n, " ".join(map(str, b.indices)),
         repr(b.weight), repr(b.lambda_max), repr(b.p_max), int(b.winning), " ".join(repr(float(x)) for x in b.phi)]
        for n, b in enumerate(res.blocks)
    ]
    return EXIT_OK, _emit_csv(header, rows)


def cmd_enhance(args) -> tuple[int, str]:
    rho = _require_input(args)
    res = analyze(rho)
    p, out = apply_stochastic(rho, kraus_set([res.optimal_kraus], args.tol))
    report = {"probability": p, "coherence": l1_coherence(out), "state": sio.state_to_json(out)}
    if args.format == "json":
        return EXIT_OK, sio.dumps(report)
    rows = [[i, j, repr(z.real), repr(z.imag)] for i, row in enumerate(out.entries) for j, z in enumerate(row)]
    return EXIT_OK, f"# probability={p!r} coherence={report['coherence']!r}\n" + _emit_csv(["i", "j", "re", "im"], rows)


def cmd_simulate(args) -> tuple[int, str]:
    rho = _require_input(args)
    res = analyze(rho)
    if args.kraus:
        try:
            subset = sio.load_kraus(args.kraus, args.tol)
        except OSError as exc:
            raise InputError(f"cannot read {args.kraus}: {exc.strerror}") from None
        expected = apply_stochastic(rho, subset)[0]
    else:
        subset = kraus_set([res.optimal_kraus], args.tol)
        expected = res.p_max
    inst = complete_instrument(subset)
    rep = monte_carlo_success(rho, inst, args.trials, args.seed, n_success=len(subset))
    report = sio.trials_to_json(rep)
    report.update(
        {
            "expectedP": expected,
            "pMax": res.p_max,
            "deviation": abs(rep.empirical_p - expected),
            "zScore": abs(rep.empirical_p - expected) / rep.std_error if rep.std_error > 0 else None,
        }
    )
    if args.format == "json":
        return EXIT_OK, sio.dumps(report)
    return EXIT_OK, _emit_csv(list(report), [[repr(v) if isinstance(v, float) else v for v in report.values()]])


def cmd_verify(args) -> tuple[int, str]:
    t0 = time.perf_counter()
    results = run_all(args.seed, args.samples, args.trials, args.states)
    print(f"verify finished in {time.perf_counter() - t0:.2f} s", file=sys.stderr)
    ok = all(r.passed for r in results)
    if args.format == "json":
        body = {
            "seed": args.seed,
            "samples": args.samples,
            "trials": args.trials,
            "passed": ok,
            "properties": [
                {
                    "name": r.name,
                    "status": "PASS" if r.passed else "FAIL",
                    "checked": r.checked,
                    "worstMargin": r.worst_margin,
                    "detail": r.detail,
                    "failures": [{"dim": d, "rank": k, "seed": s} for d, k, s in r.failures],
                }
                for r in results
            ],
        }
        text = sio.dumps(body)
    else:
        rows = [
            [r.name, "PASS" if r.passed else "FAIL", r.checked, repr(r.worst_margin), r.detail,
             " ".join(f"{d}:{k}:{s}" for d, k, s in r.failures)]
            for r in results
        ]
        text = _emit_csv(["property", "status", "checked", "worstMargin", "detail", "failures(dim:rank:seed)"], rows)
    for r in results:
        if not r.passed:
            print(f"FAIL {r.name}: replay with random_density(dim, rank, seed) for {r.failures[:5]}", file=sys.stderr)
    return (EXIT_OK if ok else EXIT_PROPERTY), text


def cmd_qubit(args) -> tuple[int, str]:
    closed = qubit_closed_form(args.r, args.theta)
    res = analyze(qubit_state(args.r, args.theta))
    general = (res.c_input, res.c_max, res.p_max)
    diff = max(abs(a - b) for a, b in zip(closed, general))
    agree = diff <= QUBIT_AGREEMENT_TOL
    names = ("cInput", "cMax", "pMax")
    if args.format == "json":
        text = sio.dumps(
            {
                "r": args.r,
                "theta": args.theta,
                "closedForm": dict(zip(names, closed)),
                "general": dict(zip(names, general)),
                "maxDifference": diff,
                "agree": agree,
            }
        )
    else:
        rows = [[n, repr(a), repr(b), repr(abs(a - b))] for n, a, b in zip(names, closed, general)]
        text = _emit_csv(["quantity", "closedForm", "general", "difference"], rows)
    if not agree:
        print(f"closed form and general pipeline differ by {diff:.3e}", file=sys.stderr)
    return (EXIT_OK if agree else EXIT_PROPERTY), text


COMMANDS = {
    "analyze": cmd_analyze,
    "enhance": cmd_enhance,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "qubit": cmd_qubit,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code, text = COMMANDS[args.command](args)
    except (InputError, ZeroProbability) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NoConvergence as exc:
        print(f"error: NoConvergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
