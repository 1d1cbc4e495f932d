"""Command line interface.

Every command prints one JSON report on stdout. Exit codes: 0 on success,
1 when a mathematical check fails (axiom violation, dimension mismatch,
failed verification), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .conjugacy import (FlowSystem, build_group_conjugacy, evaluate_pi, evaluate_pi_inverse,
                        verify_conjugacy)
from .errors import InputError, LieFlowError
from .lie_core import lower_central_series, validate_jacobi
from .matrix_flow import LinearFlow, flow_linear
from .nilpotent_group import GroupElement, flow_group, gauge, split_plus_minus
from .spectral import grading_check, is_hyperbolic, spectral_decompose
from .stability import classify_identity_stability, lyapunov_estimate
from .systemfile import dumps, load_system

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_T_GRID = [10.0, 20.0, 50.0, 100.0, 200.0]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _vector(text: str) -> list:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lieflow", description="Linear flows on Lie groups.")
    p.add_argument("--version", action="version", version=f"lieflow {__version__}")
    p.add_argument("--text", action="store_true", help="also print a plain-text summary on stderr")
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock time (makes reports non-reproducible)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, help_ in (("check", "validate the Jacobi and Leibniz identities"),
                        ("decompose", "stable/center/unstable splitting"),
                        ("classify", "stability of the identity")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("system")

    s = sub.add_parser("lyapunov", help="Lyapunov exponent of a vector")
    s.add_argument("system")
    s.add_argument("--vector", required=True, type=_vector)
    s.add_argument("--times", type=_vector, default=DEFAULT_T_GRID)

    s = sub.add_parser("flow", help="flow a point of the group")
    s.add_argument("system")
    s.add_argument("--point", required=True, type=_vector)
    s.add_argument("--time", required=True, type=float)

    conj = sub.add_parser("conjugacy", help="conjugacy between two hyperbolic systems")
    csub = conj.add_subparsers(dest="action", required=True, parser_class=_Parser)
    b = csub.add_parser("build")
    b.add_argument("source")
    b.add_argument("target")
    v = csub.add_parser("verify")
    v.add_argument("source")
    v.add_argument("target")
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--trange", type=float, nargs=2, default=[-5.0, 5.0], metavar=("A", "B"))
    v.add_argument("--tol", type=float, default=1e-6)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--scale", type=float, default=1.0)
    return p


def _system(path, digests):
    spec = load_system(path)
    digests[str(path)] = spec.digest
    return spec


def cmd_check(args, digests):
    spec = _system(args.system, digests)
    alg, D = spec.algebra, spec.derivation
    filt = lower_central_series(alg, spec.tolerances["rank"])
    return {
        "jacobi": validate_jacobi(alg, spec.tolerances["jacobi"]).to_dict(),
        "leibniz": {"passed": True, "max_residual": D.leibniz_residual,
                    "tol": spec.tolerances["leibniz"]},
        "lower_central_series_dims": filt.dims,
        "nilpotent": filt.nilpotent,
        "step": filt.step,
    }, True


def cmd_decompose(args, digests):
    spec = _system(args.system, digests)
    sd = spectral_decompose(spec.derivation, spec.tolerances["realpart"])
    grading = grading_check(sd, spec.algebra, spec.tolerances["grading"])
    out = sd.summary()
    out.update({
        "plus_basis": sd.plus_basis.T,
        "zero_basis": sd.zero_basis.T,
        "minus_basis": sd.minus_basis.T,
        "P_plus": sd.P_plus,
        "P_zero": sd.P_zero,
        "P_minus": sd.P_minus,
        "grading": grading.to_dict(),
        "nilpotent": lower_central_series(spec.algebra, spec.tolerances["rank"]).nilpotent,
    })
    return out, grading.passed


def cmd_classify(args, digests):
    spec = _system(args.system, digests)
    sd = spectral_decompose(spec.derivation, spec.tolerances["realpart"])
    cert = classify_identity_stability(spec.algebra, spec.derivation, sd,
                                       spec.tolerances["semisimple"])
    return cert.to_dict(), True


def cmd_lyapunov(args, digests):
    spec = _system(args.system, digests)
    v = np.array(args.vector)
    if v.shape != (spec.algebra.dim,):
        raise InputError("vector length does not match the system dimension",
                         expected=spec.algebra.dim, got=int(v.size))
    sd = spectral_decompose(spec.derivation, spec.tolerances["realpart"])
    return lyapunov_estimate(LinearFlow.of(spec.derivation), v, args.times, sd).to_dict(), True


def cmd_flow(args, digests):
    spec = _system(args.system, digests)
    alg = spec.algebra
    x = np.array(args.point)
    if x.shape != (alg.dim,):
        raise InputError("point length does not match the system dimension",
                         expected=alg.dim, got=int(x.size))
    lf = LinearFlow.of(spec.derivation)
    filt = lower_central_series(alg, spec.tolerances["rank"])
    out = {"time": args.time, "point": x}
    if filt.nilpotent:
        g = GroupElement.exp(x, alg)
        gt = flow_group(lf, args.time, g)
        out.update({"level": "group", "coords": gt.coords, "gauge": gauge(gt)})
        sd = spectral_decompose(spec.derivation, spec.tolerances["realpart"])
        if is_hyperbolic(sd):
            g_plus, g_minus = split_plus_minus(gt, sd)
            out["split"] = {"plus": g_plus.coords, "minus": g_minus.coords}
    else:
        # exponential coordinates are not global; report the algebra flow
        y = flow_linear(lf, args.time, x)
        out.update({"level": "algebra", "coords": y, "gauge": float(np.linalg.norm(y))})
    return out, True


def cmd_conjugacy(args, digests):
    src = _system(args.source, digests)
    dst = _system(args.target, digests)
    a = FlowSystem.of(src.algebra, src.derivation,
                      spectral_decompose(src.derivation, src.tolerances["realpart"]))
    b = FlowSystem.of(dst.algebra, dst.derivation,
                      spectral_decompose(dst.derivation, dst.tolerances["realpart"]))
    gc = build_group_conjugacy(a, b)
    if args.action == "build":
        e_src = GroupElement.identity(src.algebra)
        image = evaluate_pi(gc, e_src)
        back = evaluate_pi_inverse(gc, image)
        return {
            "built": True,
            "source_signature": a.signature,
            "target_signature": b.signature,
            "pi_of_identity": image.coords,
            "fixed_point_exact": bool(not np.any(image.coords) and not np.any(back.coords)),
        }, True
    if args.samples < 0:
        raise InputError("--samples must be non-negative", samples=args.samples)
    report = verify_conjugacy(gc, args.samples, tuple(args.trange), args.tol, args.seed, args.scale)
    return report.to_dict(), report.passed


COMMANDS = {
    "check": cmd_check,
    "decompose": cmd_decompose,
    "classify": cmd_classify,
    "lyapunov": cmd_lyapunov,
    "flow": cmd_flow,
    "conjugacy": cmd_conjugacy,
}


def render_text(report: dict, prefix: str = "") -> str:
    """Flat ``key: value`` lines of the same report that goes to stdout."""
    lines = []
    for key in sorted(report):
        value = report[key]
        if isinstance(value, dict):
            lines.append(render_text(value, f"{prefix}{key}."))
        else:
            lines.append(f"{prefix}{key}: {value}")
    return "\n".join(line for line in lines if line)


def run_command(argv: Sequence[str]) -> tuple:
    """Run one command; returns ``(report, exit_code)``."""
    report, code, _ = _execute(argv)
    return report, code


def _execute(argv: Sequence[str]) -> tuple:
    argv = list(argv)
    report = {"command": argv, "tool_version": __version__}
    digests: dict = {}
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        report.update(status="error", error={"type": "UsageError", "message": str(exc), "details": {}})
        return report, EXIT_USAGE, False
    start = time.perf_counter()
    try:
        result, ok = COMMANDS[args.command](args, digests)
        report.update(status="ok" if ok else "failed", result=result)
        code = EXIT_OK if ok else EXIT_FAIL
    except InputError as exc:
        report.update(status="error", error=exc.to_dict())
        code = EXIT_USAGE
    except LieFlowError as exc:
        report.update(status="error", error=exc.to_dict())
        code = EXIT_FAIL
    report["input_digest"] = digests
    if args.timing:
        report["wall_clock_seconds"] = time.perf_counter() - start
    return report, code, args.text


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    report, code, text = _execute(argv)
    sys.stdout.write(dumps(report) + "\n")
    if text:
        sys.stderr.write(render_text(report) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
