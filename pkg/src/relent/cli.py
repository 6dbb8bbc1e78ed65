"""Command-line interface.

Each command prints one JSON object on stdout; diagnostics go to stderr.

Exit codes: 0 success, 1 optimizer failure, 2 parse or usage error,
3 validation error, 4 certificate violation, 5 sandwich violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from contextlib import contextmanager

from . import certifier, closed_form, io, minimizer, states
from .errors import DimensionTooLarge, NonConvergence, RelEntError, SandwichViolation

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_CERTIFICATE = 4
EXIT_SANDWICH = 5

ENTROPY_KEYS = ("er_closed_form", "diagonal_entropy", "sigma_entropy", "numerical_min", "difference")


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message


class _Timer:
    def __init__(self):
        self.phases: dict[str, float] = {}

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        yield
        self.phases[name] = round((time.perf_counter() - t0) * 1e3, 3)


def _emit(report: dict, bits: bool = False) -> None:
    if bits:
        for key in ENTROPY_KEYS:
            if report.get(key) is not None:
                report[key] = report[key] / math.log(2)
    report["units"] = "bits" if bits else "nats"
    print(json.dumps(report))


def _load(path: str) -> io.StateFile:
    try:
        return io.load_state(path)
    except io.StateFileError as exc:
        raise _Exit(EXIT_PARSE, str(exc)) from exc


def _coefficients(sf: io.StateFile, command: str) -> states.CoefficientMatrix:
    if sf.kind != "coefficients":
        raise _Exit(EXIT_INVALID, f"{command}: closed form requires coefficient input")
    try:
        return states.validate_coefficients(sf.matrix)
    except RelEntError as exc:
        raise _Exit(EXIT_INVALID, str(exc)) from exc


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def cmd_compute(args) -> int:
    timer = _Timer()
    with timer.phase("parse"):
        sf = _load(args.input)
        A = _coefficients(sf, "compute")
    with timer.phase("closed_form"):
        res = closed_form.er_closed_form(A)
    report = {
        "command": "compute",
        "input": args.input,
        "n": A.size,
        "er_closed_form": res.er,
        "diagonal_entropy": res.diagonal_entropy,
        "sigma_entropy": res.sigma_entropy,
    }
    if args.dump_rho_star:
        report["rho_star"] = io.matrix_to_json(states.closest_separable(A).matrix)
    report["timing_ms"] = timer.phases
    _emit(report, args.bits)
    return EXIT_OK


def cmd_example(args) -> int:
    alpha = complex(args.alpha_re, args.alpha_im)
    try:
        res = closed_form.two_qubit_er(args.x, alpha)
    except RelEntError as exc:
        raise _Exit(EXIT_INVALID, str(exc)) from exc
    report = {
        "command": "example",
        "input": {"x": args.x, "alpha": [alpha.real, alpha.imag]},
        "lambda": res.lam,
        "er_closed_form": res.er,
        "diagonal_entropy": res.diagonal_entropy,
        "sigma_entropy": res.sigma_entropy,
        "coefficients": io.matrix_to_json(closed_form.two_qubit_coefficients(args.x, alpha)),
    }
    _emit(report, args.bits)
    return EXIT_OK


def cmd_certify(args) -> int:
    timer = _Timer()
    with timer.phase("parse"):
        A = _coefficients(_load(args.input), "certify")
    with timer.phase("closed_form"):
        res = closed_form.er_closed_form(A)
    with timer.phase("certify"):
        cert = certifier.certify(A, args.samples, args.seed, args.tolerance)
    report = {
        "command": "certify",
        "input": args.input,
        "n": A.size,
        "er_closed_form": res.er,
        "certificate": cert.to_dict(),
        "timing_ms": timer.phases,
    }
    _emit(report)
    if not cert.ok:
        print(
            f"certificate failed: {cert.violations} violations, "
            f"method agreement {cert.method_agreement:.3e}",
            file=sys.stderr,
        )
        return EXIT_CERTIFICATE
    return EXIT_OK


def cmd_minimize(args) -> int:
    timer = _Timer()
    with timer.phase("parse"):
        sf = _load(args.input)
        try:
            if sf.kind == "coefficients":
                A = states.validate_coefficients(sf.matrix)
                sigma = states.build_sigma(A)
            else:
                A = None
                sigma = states.DensityMatrix(sf.matrix, sf.d_a, sf.d_b)
        except RelEntError as exc:
            raise _Exit(EXIT_INVALID, str(exc)) from exc
    cfg = minimizer.MinimizeConfig(
        ensemble_size=args.ensemble_size,
        restarts=args.restarts,
        max_iterations=args.max_iterations,
        seed=args.seed,
    )
    with timer.phase("minimize"):
        try:
            result = minimizer.minimize(sigma, cfg, force=args.force)
        except DimensionTooLarge as exc:
            raise _Exit(EXIT_INVALID, f"{exc}; use --force") from exc
        except NonConvergence as exc:
            raise _Exit(EXIT_FAILED, str(exc)) from exc
    report = {
        "command": "minimize",
        "input": args.input,
        "kind": sf.kind,
        "numerical_min": result.value,
        "restarts": cfg.restarts,
        "restarts_converged": result.restarts_converged,
        "best_restart_index": result.best_restart_index,
        "ensemble_size": len(result.ensemble.weights),
    }
    code = EXIT_OK
    if A is not None:
        with timer.phase("closed_form"):
            er = closed_form.er_closed_form(A).er
        report["er_closed_form"] = er
        report["difference"] = result.value - er
        try:
            minimizer.lower_bound_check(sigma, result, er)
        except SandwichViolation as exc:
            print(f"sandwich check failed: {exc}", file=sys.stderr)
            code = EXIT_SANDWICH
    report["timing_ms"] = timer.phases
    _emit(report)
    return code


def cmd_random(args) -> int:
    A = states.random_coefficient_matrix(args.n, args.seed)
    try:
        io.write_coefficients(args.out, A.a)
    except OSError as exc:
        raise _Exit(EXIT_PARSE, f"cannot write {args.out}: {exc.strerror}") from exc
    report = {
        "command": "random",
        "out": args.out,
        "n": args.n,
        "seed": args.seed,
        "validation": {"valid": True, **states.coefficient_checks(A.a)},
    }
    print(json.dumps(report))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="relent",
        description="Relative entropy of entanglement for maximally correlated states.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="closed-form value for a coefficient file")
    c.add_argument("input")
    c.add_argument("--bits", action="store_true", help="report entropies in bits")
    c.add_argument("--dump-rho-star", action="store_true", help="include the closest separable state")
    c.set_defaults(func=cmd_compute)

    e = sub.add_parser("example", help="two-qubit state x|00><00| + (1-x)|11><11| + alpha|00><11| + h.c.")
    e.add_argument("--x", type=float, required=True)
    e.add_argument("--alpha-re", type=float, default=0.0)
    e.add_argument("--alpha-im", type=float, default=0.0)
    e.add_argument("--bits", action="store_true")
    e.set_defaults(func=cmd_example)

    k = sub.add_parser("certify", help="sample the optimality certificate")
    k.add_argument("input")
    k.add_argument("--samples", type=_positive_int, default=10_000)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--tolerance", type=float, default=certifier.VIOLATION_TOL)
    k.set_defaults(func=cmd_certify)

    m = sub.add_parser("minimize", help="numerical minimum over separable ensembles")
    m.add_argument("input")
    m.add_argument("--restarts", type=_positive_int, default=20)
    m.add_argument("--ensemble-size", type=_positive_int, default=None)
    m.add_argument("--max-iterations", type=_positive_int, default=5000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--force", action="store_true", help="allow d_A*d_B > 16")
    m.set_defaults(func=cmd_minimize)

    r = sub.add_parser("random", help="write a random coefficient file")
    r.add_argument("--n", type=_positive_int, required=True)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_random)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        print(f"relent {args.command}: {exc.message}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
