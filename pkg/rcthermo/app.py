#!/usr/bin/env python3
from __future__ import annotations

import argparse
import sys
from typing import Dict, Optional, Sequence

from . import __version__
from .catalog import FAMILY_CLASSES
from .commands import CommandExecutor
from .config import Config
from .errors import NumericalError, RCThermoError, ValidationError
from .mapping.rcmap import MAPPINGS
from .mapping.specdens import Statistics
from .ui import UIManager, console

# Parameters every density-driven command accepts; unused ones are ignored per family.
DENSITY_PARAMS = ("gamma", "delta", "eps", "wm", "value")


def _density_options(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--family", choices=sorted(FAMILY_CLASSES), help="catalog family")
    source.add_argument("--density", help="CSV file with an omega,gamma header")
    parser.add_argument("--statistics", choices=[s.value for s in Statistics], help="statistics of a CSV density")
    parser.add_argument("--mapping", choices=sorted(MAPPINGS), help="override the default mapping")
    for name in DENSITY_PARAMS:
        parser.add_argument(f"--{name}", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcthermo",
        description="Reaction-coordinate mappings, supersystem master equations and quantum engine analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--out", help=f"output directory (default {Config.DEFAULT_OUT_DIR})")
    parser.add_argument("--jobs", type=int, help="parallel sweep workers")
    parser.add_argument("--tol", type=float, help="quadrature tolerance")
    parser.add_argument("--seed", type=int, help="seed for randomized checks")
    parser.add_argument("--lamb-shift", dest="lamb_shift", action="store_true", default=None)
    parser.add_argument("--no-lamb-shift", dest="lamb_shift", action="store_false")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    map_parser = commands.add_parser("map", help="one reaction-coordinate mapping step")
    _density_options(map_parser)
    map_parser.add_argument("--verify", action="store_true", default=None, help="cross-check against the catalog")

    chain_parser = commands.add_parser("chain", help="repeated mappings into chain coefficients")
    _density_options(chain_parser)
    chain_parser.add_argument("--steps", type=int)
    chain_parser.add_argument("--points", type=int, help="sample points of the residual grid")

    otto_parser = commands.add_parser("otto", help="quantum Otto cycle and parametric curve")
    otto_parser.add_argument("--mu-hot", dest="mu_hot", type=float)
    otto_parser.add_argument("--mu-cold", dest="mu_cold", type=float)
    otto_parser.add_argument("--mu-cold-range", dest="mu_cold_range", help="lo:hi[:n] cold splittings")
    otto_parser.add_argument("--beta-hot", dest="beta_hot", type=float)
    otto_parser.add_argument("--beta-cold", dest="beta_cold", type=float)
    for side in ("hot", "cold"):
        otto_parser.add_argument(f"--lam-{side}", dest=f"lam_{side}", type=float)
        otto_parser.add_argument(f"--omega-{side}", dest=f"omega_{side}", type=float)
    otto_parser.add_argument("--treatment", choices=["weak", "rc"])
    otto_parser.add_argument("--decoupling", choices=["instantaneous", "adiabatic"])
    otto_parser.add_argument("--s-choice", dest="s_choice", choices=["sx", "sz", "proj"])
    otto_parser.add_argument("--n-max", dest="n_max", type=int)
    otto_parser.add_argument("--renormalize", action="store_true", default=None)
    otto_parser.add_argument("--compare", action="store_true", default=None, help="weak and both RC variants")

    set_parser = commands.add_parser("set", help="single-electron transistor operating map")
    set_parser.add_argument("--solver", choices=["exact", "rc", "both"])
    set_parser.add_argument("--v-range", dest="v_range", help="lo:hi[:n] in units of eps")
    set_parser.add_argument("--gamma-range", dest="gamma_range", help="lo:hi[:n] log-spaced, units of eps")
    set_parser.add_argument("--eps", type=float)
    set_parser.add_argument("--delta", type=float, help="lead width in units of eps")
    set_parser.add_argument("--beta-left", dest="beta_left", type=float)
    set_parser.add_argument("--beta-right", dest="beta_right", type=float)

    catalog_parser = commands.add_parser("catalog", help="closed-form density catalog")
    catalog_parser.add_argument("action", choices=["list"])

    commands.add_parser("selftest", help="fast oracle checks")
    return parser


GLOBAL_KEYS = {"command", "config", "out", "jobs", "tol", "seed", "lamb_shift", "action"}


def overrides_of(args: argparse.Namespace) -> Dict[str, object]:
    return {key: value for key, value in vars(args).items() if key not in GLOBAL_KEYS and value is not None}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    args.overrides = overrides_of(args)
    Config.ensure_directories()

    ui = UIManager(console)
    executor = CommandExecutor(console, ui)
    try:
        return executor.execute(args)
    except ValidationError as error:
        ui.display_error(args.command, str(error))
        return error.exit_code
    except NumericalError as error:
        ui.display_error(args.command, str(error))
        return error.exit_code
    except RCThermoError as error:
        ui.display_error(args.command, str(error))
        return error.exit_code


if __name__ == "__main__":
    sys.exit(main())
