"""
Command line interface for the jacobilab package.

This module powers the `jacobilab` executable: build model tensors, analyze and probe tensor files, run the factorization pipeline, and query the dimension screens.

Exit codes:

- `0` clean run
- `2` usage errors, malformed files and invalid parameters
- `3` the tensor fails symmetry validation
- `4` a refutation, or a red probe section
"""

from __future__ import annotations

import argparse
import logging
import sys
from enum import IntEnum, StrEnum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from jacobilab._version import __title__ as pkg_title
from jacobilab._version import __version__ as pkg_version
from jacobilab.analyses.factorizer import FACTOR_REL_TOL, FactorizationReport, StructureFile
from jacobilab.analyses.probes import ProbeReport
from jacobilab.analyses.spectral import AnalysisReport
from jacobilab.exceptions import BianchiViolation, InvalidTensorFile, SymmetryConflict
from jacobilab.lab import MODELS, JacobiLab
from jacobilab.linalg import DEFAULT_REL_TOL
from jacobilab.tensors import AlgebraicCurvatureTensor, TensorFile, dump_tensor, load_tensor
from jacobilab.utils import _normalize_float_list, _normalize_sign

logger = logging.getLogger(__name__)

REPORT_SCHEMA = 1


class ACTIONS(StrEnum):
    BUILD = "build"
    ANALYZE = "analyze"
    PROBE = "probe"
    FACTORIZE = "factorize"
    RHO = "rho"
    SCREEN = "screen"


class EXIT(IntEnum):
    OK = 0
    USAGE = 2
    INVALID_TENSOR = 3
    REFUTED = 4


class RunConfig(BaseModel):
    """Validated echo of a command line invocation.

    Output paths are left out, so a report does not depend on where it is written.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: ACTIONS
    input: str | None = None
    samples: int = Field(default=256, ge=1)
    seed: int = Field(default=0, ge=0)
    rel_tol: float = Field(default=1e-6, gt=0)
    model: MODELS | None = None
    dim: int | None = None
    mu: float | None = None
    nus: tuple[float, ...] | None = None
    sign: int | None = None
    frame_seed: int | None = None


class ReportEnvelope(BaseModel):
    model_config = ConfigDict(frozen=True)

    schema_version: int = Field(default=REPORT_SCHEMA, serialization_alias="schema")
    tool: str = pkg_title
    version: str = pkg_version
    config: RunConfig
    report: AnalysisReport | ProbeReport | FactorizationReport


def _parse_sign(value: str) -> int:
    try:
        sign = _normalize_sign(value)
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"Invalid sign: {exc}") from exc
    if sign is None:
        raise argparse.ArgumentTypeError("A sign is required")
    return sign


def _parse_floats(value: str) -> tuple[float, ...]:
    try:
        parsed = _normalize_float_list(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if not parsed:
        raise argparse.ArgumentTypeError("Expected at least one number")
    return tuple(parsed)


def _add_sampling(parser: argparse.ArgumentParser, defaults: JacobiLab, rel_tol: float) -> None:
    parser.add_argument("input", metavar="TENSOR", help="Tensor file to read.")
    parser.add_argument(
        "-o", "--output", metavar="PATH", help="Write the JSON report to this file."
    )
    parser.add_argument(
        "--samples",
        type=int,
        default=defaults.samples,
        help="Number of points sampled on the unit sphere.",
    )
    parser.add_argument(
        "--seed", type=int, default=defaults.seed, help="Seed of the sample stream."
    )
    parser.add_argument(
        "--rel-tol",
        dest="rel_tol",
        type=float,
        default=rel_tol,
        help="Relative tolerance.",
    )


def _build_parser() -> argparse.ArgumentParser:
    """Create the top-level argument parser for the CLI."""
    lab_defaults = JacobiLab(threads=1)
    parser = argparse.ArgumentParser(
        prog=pkg_title,
        description="Spectral analysis of Jacobi operators of algebraic curvature tensors.",
    )

    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {pkg_version}",
        help="Display the package version.",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Log progress to standard error; repeat for debug output.",
    )

    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    build = commands.add_parser(ACTIONS.BUILD.value, help="Build a model tensor file.")
    build.add_argument("--model", type=MODELS, choices=list(MODELS), required=True)
    build.add_argument("--dim", type=int, required=True, help="Dimension.")
    build.add_argument("--mu", type=float, default=0.0, help="Shift of the two-root model.")
    build.add_argument(
        "--nus",
        type=_parse_floats,
        metavar="NU,NU,...",
        help="Comma separated constants of P, one per frame pair.",
    )
    build.add_argument(
        "--sign", type=_parse_sign, default=1, help="Global sign, + or -."
    )
    build.add_argument(
        "--frame-seed",
        dest="frame_seed",
        type=int,
        default=None,
        help="Use a random orthonormal frame drawn from this seed.",
    )
    build.add_argument("-o", "--output", metavar="PATH", required=True)

    analyze = commands.add_parser(ACTIONS.ANALYZE.value, help="Spectral analysis of a tensor.")
    _add_sampling(analyze, lab_defaults, lab_defaults.rel_tol)

    probe = commands.add_parser(ACTIONS.PROBE.value, help="Structural identity checks.")
    _add_sampling(probe, lab_defaults, lab_defaults.rel_tol)

    factorize = commands.add_parser(
        ACTIONS.FACTORIZE.value, help="Factor a two-root tensor with a simple root."
    )
    _add_sampling(factorize, lab_defaults, lab_defaults.factor_tol)
    factorize.add_argument(
        "--report", metavar="PATH", help="Write the full pipeline report to this file."
    )

    for action, help_text in (
        (ACTIONS.RHO, "Hurwitz-Radon number of n."),
        (ACTIONS.SCREEN, "Dimension screen for two-root tensors."),
    ):
        sub = commands.add_parser(action.value, help=help_text)
        sub.add_argument("n", type=int)

    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    fields = {
        name: getattr(args, name)
        for name in RunConfig.model_fields
        if name != "command" and getattr(args, name, None) is not None
    }
    return RunConfig(command=args.command, **fields)


def _write_report(path: str | None, config: RunConfig, report) -> None:
    if not path:
        return
    envelope = ReportEnvelope(config=config, report=report)
    Path(path).write_text(envelope.model_dump_json(indent=2, by_alias=True) + "\n", encoding="utf-8")


def _fmt(values) -> str:
    return ", ".join(f"{v:.10g}" for v in values)


def _print_analysis(report: AnalysisReport) -> None:
    verdict = report.k_root
    print(f"{'k-root':<14}: {verdict.k if verdict.k is not None else 'varying'} ({verdict.statement})")
    if verdict.multiplicities:
        print(f"{'multiplicities':<14}: {_fmt(verdict.multiplicities)}")
    print(
        f"{'Osserman':<14}: {'yes' if report.osserman.osserman else 'no'}"
        f" (max deviation {report.osserman.max_deviation:.3e})"
    )
    print(f"{'C_1..C_' + str(len(report.stein.constants)):<14}: {_fmt(report.stein.constants)}")
    print(f"{'C deviation':<14}: {report.stein.max_deviation:.3e}")
    if report.constant_curvature is not None:
        print(f"{'curvature':<14}: {report.constant_curvature:.10g}")
    print(f"{'Jacobi-dual':<14}: {'yes' if report.jacobi_dual else 'no'}")


def _print_probe(report: ProbeReport) -> None:
    for section in report.sections:
        extra = section.note or f"{len(section.violations)} violations of {section.identities_checked}"
        mode = f" [{section.mode.value}]" if section.mode else ""
        print(f"{section.name:<18}: {section.status.value}{mode} ({extra})")
    if report.extrema:
        e = report.extrema
        print(f"{'mu range':<18}: [{e.mu_min:.10g}, {e.mu_max:.10g}]")
        print(f"{'nu range':<18}: [{e.nu_min:.10g}, {e.nu_max:.10g}]")


def _print_factorization(report: FactorizationReport) -> None:
    if report.refutation is not None:
        r = report.refutation
        print(f"refuted at stage {r.stage}: {r.message}")
        for w in r.witness:
            print(f"  witness: [{_fmt(w)}]")
        return
    s = report.structure
    if s is None:
        return
    print(f"{'sign':<9}: {'+' if s.sign > 0 else '-'}")
    print(f"{'mu':<9}: {s.mu:.10g}")
    print(f"{'nus':<9}: {_fmt(s.nus or ())}")
    print(f"{'residual':<9}: {report.residual:.3e}")
    print(f"{'certified':<9}: {'yes' if report.certified else 'no'}")


def _load(path: str) -> AlgebraicCurvatureTensor | EXIT:
    try:
        return load_tensor(path)
    except InvalidTensorFile as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT.USAGE
    except (SymmetryConflict, BianchiViolation) as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return EXIT.INVALID_TENSOR


def _execute(args: argparse.Namespace) -> EXIT:
    action = ACTIONS(args.command)
    logger.info("running %s", action.value)

    if action == ACTIONS.RHO:
        if args.n < 1:
            print("error: n must be positive", file=sys.stderr)
            return EXIT.USAGE
        print(JacobiLab(threads=1).rho(args.n))
        return EXIT.OK

    if action == ACTIONS.SCREEN:
        if args.n < 3:
            print("error: the screen needs n >= 3", file=sys.stderr)
            return EXIT.USAGE
        screen = JacobiLab(threads=1).screen(args.n)
        print(screen.verdict)
        q_range = f"{{{screen.q_range[0]},...,{screen.q_range[-1]}}}" if screen.q_range else "{}"
        print(f"rho({screen.n}) = {screen.rho}; admissible q in {q_range}")
        return EXIT.OK

    try:
        config = _config(args)
        if action == ACTIONS.BUILD:
            lab = JacobiLab()
            tensor = lab.build(
                args.model, args.dim, args.mu, args.nus, args.sign, args.frame_seed
            )
        else:
            is_factor = action == ACTIONS.FACTORIZE
            lab = JacobiLab(
                samples=args.samples,
                seed=args.seed,
                rel_tol=DEFAULT_REL_TOL if is_factor else args.rel_tol,
                factor_tol=args.rel_tol if is_factor else FACTOR_REL_TOL,
            )
    except ValidationError as exc:
        for error in exc.errors():
            print(f"error: {error['msg']}", file=sys.stderr)
        return EXIT.USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT.USAGE

    if action == ACTIONS.BUILD:
        dump_tensor(tensor, args.output)
        print(
            f"wrote {args.output}: model={args.model.value} dim={tensor.dim}"
            + (f" mu={args.mu} nus={_fmt(args.nus)} sign={args.sign:+d}" if args.nus else "")
            + f" ({len(TensorFile.from_tensor(tensor).entries)} generators)"
        )
        return EXIT.OK

    tensor = _load(args.input)
    if isinstance(tensor, EXIT):
        return tensor

    if action == ACTIONS.ANALYZE:
        report = lab.analyze(tensor)
        _print_analysis(report)
        _write_report(args.output, config, report)
        return EXIT.OK

    if action == ACTIONS.PROBE:
        probe = lab.probe(tensor)
        _print_probe(probe)
        _write_report(args.output, config, probe)
        return EXIT.REFUTED if probe.red else EXIT.OK

    result = lab.factorize(tensor)
    _print_factorization(result)
    _write_report(args.report, config, result)
    if not result.certified:
        return EXIT.REFUTED
    if args.output:
        structure = StructureFile.from_report(result)
        Path(args.output).write_text(structure.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return EXIT.OK


def _run(args: argparse.Namespace) -> EXIT:
    try:
        return _execute(args)
    except OSError as exc:
        print(f"error: {exc.filename or 'output'}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT.USAGE


def main() -> None:
    if "--version" in sys.argv:
        print(pkg_version)
        sys.exit(0)

    parser = _build_parser()
    args = parser.parse_args()

    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")

    sys.exit(int(_run(args)))
