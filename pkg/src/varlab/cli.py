"""``varlab`` command line.

Exit codes: 0 success, 1 hard-inequality violation, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .checks import hard_inequality_suite
from .experiments import EXPERIMENTS, ExperimentConfig, InvariantViolation, rows_to_csv, run, write_rows
from .grid import lp_norm, make_uniform_grid
from .massdec import build_tree
from .rng import stream
from .systems import haar_orthogonal, rotate_system, trig_system
from .variation import default_threads, v_r_field

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("varlab")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=_positive_int, default=None,
                        help="worker threads for the variation kernel (default: $VARLAB_THREADS or all cores)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="varlab", description="Square variation of rotated orthonormal systems.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    v = sub.add_parser("vstat", parents=[common], help="||V^r f||_2 / ||f||_2 for one random m-sparse f")
    v.add_argument("--system", choices=("trig", "rotated"), default="trig")
    v.add_argument("--N", type=_positive_int, required=True)
    v.add_argument("--m", type=_positive_int, default=None, help="support size (default N)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--r", type=float, default=2.0)
    v.add_argument("--grid-factor", type=_positive_int, default=4)

    for name in EXPERIMENTS:
        e = sub.add_parser(name, parents=[common], help=f"run the {name} study")
        e.add_argument("--config", type=Path, default=None, help="JSON ExperimentConfig")
        e.add_argument("--out", default=None, help="CSV path (JSON mirror written alongside); stdout if omitted")
        e.add_argument("--Ns", type=_int_list, default=None)
        e.add_argument("--ms", type=_int_list, default=None)
        e.add_argument("--trials", type=_positive_int, default=None)
        e.add_argument("--seed", type=int, default=None)
        e.add_argument("--grid-factor", dest="grid_factor", type=_positive_int, default=None)
        e.add_argument("--r", type=float, default=None)
        e.add_argument("--c-thresh", dest="c_thresh", type=float, default=None)

    t = sub.add_parser("tree", parents=[common], help="admissible decomposition as JSON")
    t.add_argument("--masses", required=True, help="comma-separated masses, or a file of them")

    s = sub.add_parser("selftest", parents=[common], help="run the hard-inequality suite")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--scale", type=_positive_int, default=1, help="multiply the sample counts")
    return p


def _threads(args) -> int:
    return args.threads or default_threads()


def cmd_vstat(args) -> int:
    N = args.N
    m = N if args.m is None else args.m
    if m > N:
        raise UsageError(f"--m {m} exceeds --N {N}")
    if N % 2:
        raise UsageError("--N must be even for the trig system")
    if args.r < 1:
        raise UsageError("--r must be >= 1")
    system = trig_system(N, make_uniform_grid(args.grid_factor * N))
    if args.system == "rotated":
        system = rotate_system(system, haar_orthogonal(N, args.seed))
    rng = stream(args.seed, "vstat", N, m)
    a = np.zeros(N)
    a[rng.choice(N, size=m, replace=False)] = rng.standard_normal(m)
    ratio = v_r_field(a, system, args.r, threads=_threads(args)).norm2 / lp_norm(system.combination(a), 2)
    print(round(ratio, 12))
    return EXIT_OK


def _config(args) -> ExperimentConfig:
    data = json.loads(args.config.read_text()) if args.config else {}
    data.setdefault("experiment", args.command)
    if data["experiment"] != args.command:
        raise UsageError(f"config is for {data['experiment']!r}, not {args.command!r}")
    for key in ("Ns", "ms", "trials", "seed", "grid_factor", "r", "c_thresh", "out"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    return ExperimentConfig.from_dict(data)


def cmd_study(args) -> int:
    try:
        cfg = _config(args)
    except (ValueError, TypeError, OSError) as exc:
        raise UsageError(str(exc)) from None
    rows = run(cfg, threads=_threads(args))
    if cfg.out:
        csv_path, json_path = write_rows(rows, cfg.out)
        log.info("wrote %d rows to %s and %s", len(rows), csv_path, json_path)
    else:
        sys.stdout.write(rows_to_csv(rows))
    return EXIT_OK


def _read_masses(text):
    path = Path(text)
    if path.is_file():
        text = path.read_text()
    try:
        return [float(x) for x in text.replace("\n", ",").split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse masses from {text!r}") from None


def cmd_tree(args) -> int:
    try:
        tree = build_tree(_read_masses(args.masses))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(tree.to_json())
    return EXIT_OK


def cmd_selftest(args) -> int:
    failed = False
    for res in hard_inequality_suite(args.seed, args.scale):
        status = "ok" if res.ok else "FAIL"
        print(f"{status:4s} {res.name} ({res.samples} samples)")
        for line in res.violations[:10]:
            print(f"     {line}")
        failed |= not res.ok
    return EXIT_VIOLATION if failed else EXIT_OK


COMMANDS = {"vstat": cmd_vstat, "tree": cmd_tree, "selftest": cmd_selftest,
            **{name: cmd_study for name in EXPERIMENTS}}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(name)s: %(message)s")
        if args.threads is None and os.environ.get("VARLAB_THREADS"):
            try:
                default_threads()
            except ValueError:
                raise UsageError("VARLAB_THREADS must be an integer") from None
        return COMMANDS[args.command](args)
    except UsageError as exc:
        msg = str(exc)
        print(msg if msg.startswith("varlab") else f"varlab: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(exc, file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
