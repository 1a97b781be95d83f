"""command line interface: `spherex <command>`.

exit codes: 0 when every check passed, 1 when a check failed, 2 when a
config file or argument was rejected.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import uvicorn

from src.core.config import Settings, settings
from src.core.errors import ConfigInvalid, EmptyBoundary, SpherexError
from src.core.schemas import FieldFile, SurfaceConfig
from src.core.utils import load_json_config
from src.geometry.surfaces import RevolutionSurface, decompose, projection_set
from src.services.experiment_service import theorem31_experiment
from src.services.figure_service import FIGURE_IDS, FigureDataset, dataset_csv, emit_figure, map_surface, write_csv
from src.services.suite_service import SUITE_NAMES, component_spacelike, run_suite
from src.transforms.fields import SphereField

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def _surface(path: Optional[str]) -> Optional[RevolutionSurface]:
    return load_json_config(path, SurfaceConfig).build() if path else None


def _field(path: Optional[str], surface: Optional[RevolutionSurface] = None) -> Optional[SphereField]:
    if not path:
        return None
    config = load_json_config(path, FieldFile)
    if surface is not None:
        config.require_dim(surface.ambient_dim)
    return config.build()


def _required_surface(path: str) -> RevolutionSurface:
    surface = _surface(path)
    if surface is None:
        raise ConfigInvalid("a surface config is required", ["argument '--surface': missing"])
    return surface


def _emit(text: str, out: Optional[str]) -> None:
    """write to --out or stdout; stdout stays free of log lines."""
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
        logger.info(f"wrote {out}")
    else:
        sys.stdout.write(text)


def _emit_dataset(dataset: FigureDataset, out: Optional[str]) -> None:
    if out:
        write_csv(dataset, out)
    else:
        sys.stdout.write(dataset_csv(dataset))


def _json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# commands

def cmd_verify(args: argparse.Namespace, config: Settings) -> int:
    surface = _surface(args.surface)
    result = run_suite(args.suite, surface, _field(args.field, surface), config, args.tol)
    _emit(result.model_dump_json(indent=2, exclude_none=True) + "\n", args.out)
    return EXIT_OK if result.overall else EXIT_FAILED


def cmd_map(args: argparse.Namespace, config: Settings) -> int:
    dataset = map_surface(_required_surface(args.surface), args.samples, config)
    _emit_dataset(dataset, args.out)
    return EXIT_OK


def cmd_singularities(args: argparse.Namespace, config: Settings) -> int:
    surface = _required_surface(args.surface)
    decomposition = decompose(surface, config)
    payload = decomposition.model_dump()
    try:
        payload["cap_height"] = projection_set(surface, decomposition, config).axis_height
    except EmptyBoundary:
        payload["cap_height"] = None
    _emit(_json(payload), args.out)
    return EXIT_OK


def cmd_spacelike(args: argparse.Namespace, config: Settings) -> int:
    surface = _required_surface(args.surface)
    decomposition = decompose(surface, config)
    regularity, report = component_spacelike(surface, decomposition, args.component, args.samples, config)
    payload = {"component": args.component, "regularity": regularity.model_dump(),
               "spacelike": report.model_dump() if report is not None else None}
    _emit(_json(payload), args.out)
    return EXIT_OK if report is not None and report.passed else EXIT_FAILED


def cmd_figure(args: argparse.Namespace, config: Settings) -> int:
    dataset = emit_figure(args.which, _surface(args.surface), args.resolution, config)
    _emit_dataset(dataset, args.out)
    return EXIT_OK


def cmd_theorem31(args: argparse.Namespace, config: Settings) -> int:
    surface = _required_surface(args.surface)
    field = _field(args.field, surface)
    if field is None:
        raise ConfigInvalid("a field config is required", ["argument '--field': missing"])
    report = theorem31_experiment(surface, field, _field(args.fail_field, surface), config, args.tol)
    _emit(report.model_dump_json(indent=2) + "\n", args.out)
    return EXIT_OK if report.consistent and report.precondition_met else EXIT_FAILED


def cmd_serve(args: argparse.Namespace, config: Settings) -> int:
    uvicorn.run("src.app.main:app", host=args.host, port=args.port, log_level=config.log_level.lower())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spherex", description="spherical transforms on tangent subspheres of surfaces of revolution")
    parser.add_argument("--threads", type=int, default=None, help="worker cap for sample loops (0 = auto)")
    parser.add_argument("--log-level", default=None, help="logging level (default from SPHEREX_LOG_LEVEL)")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="run a verification suite")
    verify.add_argument("--suite", default="all", choices=SUITE_NAMES)
    verify.add_argument("--surface", help="surface config json")
    verify.add_argument("--field", help="sphere field config json")
    verify.add_argument("--seed", type=int, default=None)
    verify.add_argument("--tol", type=float, default=None)
    verify.add_argument("--out", help="report json path (stdout when omitted)")
    verify.set_defaults(handler=cmd_verify)

    map_cmd = commands.add_parser("map", help="sample Phi_Sigma over every component")
    map_cmd.add_argument("--surface", required=True)
    map_cmd.add_argument("--samples", type=int, default=200)
    map_cmd.add_argument("--out")
    map_cmd.set_defaults(handler=cmd_map)

    singular = commands.add_parser("singularities", help="singular set, components and projection set")
    singular.add_argument("--surface", required=True)
    singular.add_argument("--out")
    singular.set_defaults(handler=cmd_singularities)

    spacelike = commands.add_parser("spacelike", help="regularity and space-like test of one component image")
    spacelike.add_argument("--surface", required=True)
    spacelike.add_argument("--component", type=int, required=True)
    spacelike.add_argument("--samples", type=int, default=200)
    spacelike.add_argument("--out")
    spacelike.set_defaults(handler=cmd_spacelike)

    figure = commands.add_parser("figure", help="emit figure data as csv")
    figure.add_argument("--which", type=int, required=True, choices=FIGURE_IDS)
    figure.add_argument("--surface")
    figure.add_argument("--resolution", type=int, default=200)
    figure.add_argument("--out")
    figure.set_defaults(handler=cmd_figure)

    theorem31 = commands.add_parser("theorem31", help="vanishing-data consistency experiment")
    theorem31.add_argument("--surface", required=True)
    theorem31.add_argument("--field", required=True)
    theorem31.add_argument("--fail-field", dest="fail_field")
    theorem31.add_argument("--tol", type=float, default=None)
    theorem31.add_argument("--out")
    theorem31.set_defaults(handler=cmd_theorem31)

    serve = commands.add_parser("serve", help="run the http api with uvicorn")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = settings.with_overrides(threads=args.threads, seed=getattr(args, "seed", None),
                                     log_level=args.log_level)
    logging.basicConfig(
        level=config.log_level.upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        return args.handler(args, config)
    except ConfigInvalid as e:
        print(f"error: {e}", file=sys.stderr)
        for line in e.diagnostics:
            print(f"  {line}", file=sys.stderr)
        return EXIT_CONFIG
    except SpherexError as e:
        logger.error(f"{args.command} failed: {str(e)}")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
