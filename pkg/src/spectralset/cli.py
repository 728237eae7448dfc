"""Command line entry point: ``spectralset {verify,search,range,replay}``.

Exit codes: 0 clean, 1 usage or input error, 2 a checked inequality was
violated.
"""
from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .cauchy import conjugate_transform_boundary
from .geometry import boundary_nodes
from .holofun import RationalFun
from .numrange import enclosing_domain, load_matrix, numrange_boundary
from .search import SearchConfig, optimize
from .verify import CHECK_NAMES, run_check

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2
THREADS_ENV = "SPECTRAL_SET_THREADS"

log = logging.getLogger("spectralset")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: int
    tool_version: str
    timestamp: str

    def write(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _manifest(args) -> RunManifest:
    config = {k: v for k, v in vars(args).items() if k != "func"}
    return RunManifest(args.command, config, int(getattr(args, "seed", 0) or 0), __version__,
                       datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"))


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    return max(1, int(os.environ.get(THREADS_ENV, "1")))


def cmd_verify(args) -> int:
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    bad = [c for c in checks if c not in CHECK_NAMES]
    if bad or not checks:
        raise UsageError(f"unknown check(s) {', '.join(bad) or '(none)'}; "
                         f"valid names: {', '.join(CHECK_NAMES)}")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    reports = [run_check(c, trials=args.trials, seed=args.seed, threads=_threads(args))
               for c in checks]

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "trials", "excluded", "violations", "worst_margin", "max_ratio"])
    for r in reports:
        w.writerow([r.check_name, r.trials, r.excluded, r.violations, repr(r.worst_margin),
                    repr(r.extras.get("max_ratio", float("nan")))])
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _manifest(args).write(out / "manifest.json")
        for r in reports:
            (out / f"{r.check_name}.json").write_text(r.dumps() + "\n")
        (out / "summary.csv").write_text(buf.getvalue())
        if not args.no_plot:
            from .plotting import plot_campaign
            plot_campaign(out / "summary.svg", reports)
    else:
        sys.stdout.write(buf.getvalue())
    total = sum(r.violations for r in reports)
    if total:
        log.error("%d violation(s); see worst_case in the JSON reports", total)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_search(args) -> int:
    try:
        cfg = SearchConfig(dim=args.dim, degree=args.degree, restarts=args.restarts,
                           iterations=args.iters, delta=args.delta, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = optimize(cfg, threads=_threads(args))
    if args.out is None:
        res.write_json(None)
        return EXIT_OK
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    res.write_json(out)
    stem = out.with_suffix("")
    _manifest(args).write(f"{stem}_manifest.json")
    res.write_history_csv(f"{stem}_history.csv")
    if not args.no_plot:
        from .plotting import plot_history
        from .verify import CROUZEIX_PALENCIA
        plot_history(f"{stem}_history.svg", res.history, bound=CROUZEIX_PALENCIA)
    return EXIT_OK


def cmd_range(args) -> int:
    try:
        A = load_matrix(args.matrix)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read matrix from {args.matrix}: {exc}") from exc
    if args.angles < 8:
        raise UsageError("--angles must be at least 8")
    b = numrange_boundary(A, args.angles)
    if args.out:
        b.write_csv(args.out)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["theta", "support", "pt_re", "pt_im"])
        for t, s, p in zip(b.angles, b.support_values, b.points):
            w.writerow([repr(float(t)), repr(float(s)), repr(float(p.real)), repr(float(p.imag))])

    if args.svg:
        from .plotting import plot_numrange
        domain = enclosing_domain(A, args.domain_delta)
        nodes = boundary_nodes(domain, 512)
        kw = {}
        if args.function:
            try:
                f = RationalFun.from_json(json.loads(Path(args.function).read_text()))
            except (OSError, ValueError, KeyError) as exc:
                raise UsageError(f"cannot read function from {args.function}: {exc}") from exc
            from scipy.spatial import ConvexHull
            g = conjugate_transform_boundary(f, domain, 512)
            fbar = np.conj(f(nodes.sigma))
            pts = np.column_stack([fbar.real, fbar.imag])
            try:
                hull = fbar[ConvexHull(pts).vertices]
            except Exception:
                hull = fbar  # degenerate (point or segment)
            kw = {"f_curve": f(nodes.sigma), "g_curve": g.values, "fbar_hull": hull}
        plot_numrange(args.svg, b, nodes, np.linalg.eigvals(A), **kw)
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        m = json.loads(Path(args.manifest).read_text())
        argv = _argv_from_config(m["command"], m["config"])
    except (OSError, KeyError, ValueError) as exc:
        raise UsageError(f"cannot replay {args.manifest}: {exc}") from exc
    if args.out is not None:
        argv += ["--out", args.out]
    return main(argv)


def _argv_from_config(command: str, config: dict) -> list[str]:
    argv = [command]
    for key, val in config.items():
        if key in ("command", "out", "verbose") or val is None or val is False:
            continue
        flag = "--" + key.replace("_", "-")
        argv += [flag] if val is True else [flag, str(val)]
    return argv


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="spectralset", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    v = sub.add_parser("verify", help="run randomized property campaigns")
    v.add_argument("--checks", default=",".join(CHECK_NAMES),
                   help=f"comma-separated subset of {','.join(CHECK_NAMES)}")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", help="output directory (default: summary CSV on stdout)")
    v.add_argument("--threads", type=int)
    v.add_argument("--no-plot", action="store_true")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", help="Nelder-Mead search for extremal ratios")
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--degree", type=int, default=1)
    s.add_argument("--restarts", type=int, default=8)
    s.add_argument("--iters", type=int, default=200)
    s.add_argument("--delta", type=float, default=0.05)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", help="result JSON path (default: stdout)")
    s.add_argument("--threads", type=int)
    s.add_argument("--no-plot", action="store_true")
    s.set_defaults(func=cmd_search)

    r = sub.add_parser("range", help="export the numerical range boundary")
    r.add_argument("--matrix", required=True, help='JSON {"dim":n,"re":[[..]],"im":[[..]]}')
    r.add_argument("--angles", type=int, default=256)
    r.add_argument("--domain-delta", type=float, default=0.1)
    r.add_argument("--function", help='JSON {"numer":[[re,im],..],"denom":[..]} for the g-image overlay')
    r.add_argument("--svg", help="write a figure (format from the extension)")
    r.add_argument("--out", help="CSV path (default: stdout)")
    r.set_defaults(func=cmd_range)

    rp = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    rp.add_argument("manifest")
    rp.add_argument("--out")
    rp.set_defaults(func=cmd_replay)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.command is None:
            raise UsageError("a subcommand is required")
        return args.func(args)
    except UsageError as exc:
        print(f"spectralset: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
