"""Command-line surface: experiments, exports, and verification suites.

Exit codes: 0 = success / every checked inequality holds, 1 = a checked
inequality failed, 2 = usage or parameter error.  With --out DIR every run
writes manifest.json before any artifact (a crashed run leaves it without
an end timestamp), then the artifacts and report.json.
"""

import argparse
import os
import sys

import gaplab
from gaplab.escape import escape_rate_theta, thresholds
from gaplab.evolution import EvolutionSpec, LinearSchedule, propagate
from gaplab.model import build_theta_model, landscape_rows, uniform_superposition
from gaplab.robustness import (
    check_theorem2,
    corollary1_experiment,
    gap_closing_success_experiment,
)
from gaplab.runio import RunManifest, dump_json, read_config, write_csv, write_json
from gaplab.spectra import gap_scan, phase_diagram
from gaplab.verify import SUITE_ORDER, run_suite

_CONFIG_TYPES = {
    "n": int,
    "theta": str,
    "tau": float,
    "steps": int,
    "method": str,
    "grid": int,
    "refine": int,
    "cutoff": int,
    "d": int,
    "gmax": float,
    "seed": int,
    "c": float,
    "x": float,
    "magnitude": float,
    "out": str,
    "log_base": str,
    "theta_h_form": str,
    "suite": str,
}


def _parse_theta_range(text: str):
    """'5' -> [5]; '1..20' -> [1, ..., 20]; '1,3,5' -> [1, 3, 5]."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    if "," in text:
        return [int(part) for part in text.split(",")]
    return [int(text)]


def _theta_int(text: str) -> int:
    values = _parse_theta_range(text)
    if len(values) != 1:
        raise argparse.ArgumentTypeError("this command takes a single theta")
    return values[0]


_REQUIRED = {
    "gap-scan": ("n", "theta"),
    "phase-diagram": ("n", "theta"),
    "landscape": ("n", "theta"),
    "evolve": ("n", "theta", "tau"),
    "escape-rate": ("n", "theta"),
    "thresholds": ("n", "c"),
    "corollary1": ("n", "cutoff"),
    "gap-closing": ("n",),
    "theorem2": ("n", "theta", "tau", "d", "gmax"),
    "verify": ("suite",),
}


def _add_common(sub, *names):
    # required-per-command fields stay optional here so --config can supply
    # them; _REQUIRED is enforced after the config merge
    if "n" in names:
        sub.add_argument("--n", type=int, default=None, help="qubit count")
    if "theta" in names:
        sub.add_argument("--theta", type=_theta_int, default=None, help="energy cutoff")
    if "tau" in names:
        sub.add_argument("--tau", type=float, default=None, help="total evolution time")
    if "steps" in names:
        sub.add_argument("--steps", type=int, default=None, help="integrator steps")
    if "grid" in names:
        sub.add_argument("--grid", type=int, default=101, help="initial scan grid")
    if "refine" in names:
        sub.add_argument("--refine", type=int, default=6, help="refinement rounds")
    sub.add_argument("--seed", type=int, default=0, help="root seed (stream-derived)")
    sub.add_argument("--out", type=str, default=None, help="output directory")
    sub.add_argument("--config", type=str, default=None, help="key = value defaults file")
    sub.add_argument(
        "--log-base",
        dest="log_base",
        choices=["natural", "two"],
        default="natural",
        help="logarithm base used in threshold formulas",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaplab",
        description="Spectral-gap, escape-rate, and robustness laboratory for "
        "cutoff-interpolation models in the permutation-symmetric basis.",
    )
    parser.add_argument("--version", action="version", version=gaplab.__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("gap-scan", help="scan the first gap over s")
    _add_common(sub, "n", "theta", "grid", "refine")

    sub = commands.add_parser("phase-diagram", help="minimal gap per cutoff value")
    sub.add_argument("--theta", type=str, default=None, help="cutoffs, e.g. 1..20 or 1,3,5")
    _add_common(sub, "n", "grid", "refine")

    sub = commands.add_parser("landscape", help="export the final-Hamiltonian landscape")
    _add_common(sub, "n", "theta")

    sub = commands.add_parser("evolve", help="propagate from the shared initial ground state")
    _add_common(sub, "n", "theta", "tau", "steps")
    sub.add_argument("--method", choices=["midpoint", "trotter"], default="midpoint")

    sub = commands.add_parser("escape-rate", help="exact escape rate and tail bound")
    _add_common(sub, "n", "theta")
    sub.add_argument("--c", type=float, default=1.5, help="low-threshold log exponent")
    sub.add_argument(
        "--theta-h-form", dest="theta_h_form",
        choices=["supplement", "main"], default="supplement",
    )

    sub = commands.add_parser("thresholds", help="phase-transition thresholds")
    _add_common(sub, "n")
    sub.add_argument("--c", type=float, default=None, help="low-threshold log exponent")
    sub.add_argument(
        "--theta-h-form", dest="theta_h_form",
        choices=["supplement", "main"], default="supplement",
    )

    sub = commands.add_parser(
        "corollary1", help="sector-shift robustness experiment (spectrum inversion)"
    )
    _add_common(sub, "n", "tau", "steps", "grid", "refine")
    sub.add_argument("--cutoff", type=int, default=None, help="first shifted sector")
    sub.add_argument(
        "--magnitude", type=float, default=None,
        help="sector energy shift (default -3n)",
    )

    sub = commands.add_parser(
        "gap-closing", help="top-sector level tuned through the ground level"
    )
    _add_common(sub, "n", "tau", "steps", "grid", "refine")
    sub.add_argument(
        "--x", type=float, default=None,
        help="constant projector coefficient (default: tuned tangent schedule)",
    )

    sub = commands.add_parser(
        "theorem2", help="bounded-rank perturbation robustness check"
    )
    _add_common(sub, "n", "theta", "tau", "steps")
    sub.add_argument("--d", type=int, default=None, help="perturbation rank")
    sub.add_argument("--gmax", type=float, default=None, help="perturbation norm cap")

    sub = commands.add_parser("verify", help="run a named verification suite")
    sub.add_argument("--suite", choices=SUITE_ORDER + ["all"], default=None)
    _add_common(sub)
    parser.subcommands = dict(commands.choices)
    return parser


def _extract_config_path(argv):
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if token.startswith("--config="):
            return token.split("=", 1)[1]
    return None


def _apply_config(parser, argv):
    """Config values become defaults on the invoked subparser, so explicit
    flags still override them (subparsers reset main-parser defaults)."""
    path = _extract_config_path(argv)
    if path is None:
        return
    values = read_config(path)
    converted = {}
    for key, raw in values.items():
        if key not in _CONFIG_TYPES:
            raise ValueError(f"unknown config key {key!r}")
        converted[key] = _CONFIG_TYPES[key](raw)
    command = next((tok for tok in argv if tok in parser.subcommands), None)
    if command is not None:
        parser.subcommands[command].set_defaults(**converted)


class _Emitter:
    """Shared output plumbing: manifest-first artifact writing."""

    def __init__(self, args, command):
        self.out = args.out
        self.manifest = None
        if self.out:
            params = {
                k: v
                for k, v in sorted(vars(args).items())
                if k not in ("command", "out", "config") and v is not None
            }
            self.manifest = RunManifest(
                command=command,
                params=params,
                seed=args.seed,
                version=gaplab.__version__,
                out_dir=self.out,
            ).start()

    def csv(self, name, header, rows):
        if self.out:
            path = os.path.join(self.out, name)
            write_csv(path, header, rows)
            self.manifest.record_output(path)
            return name
        return None

    def finish(self, report, summary=None):
        if self.out:
            path = os.path.join(self.out, "report.json")
            write_json(path, report)
            self.manifest.record_output(path)
            self.manifest.finish(summary if summary is not None else _brief(report))
        sys.stdout.write(dump_json(report))


def _brief(report):
    keys = ("holds", "holds_integral", "holds_lemma4", "all_passed", "min_gap")
    return {k: report[k] for k in keys if isinstance(report, dict) and k in report}


def _scan_rows(scan):
    return [(r[0], r[1], r[2], r[3]) for r in scan.samples]


def cmd_gap_scan(args):
    scan = gap_scan(build_theta_model(args.n, args.theta), args.grid, args.refine)
    emit = _Emitter(args, "gap-scan")
    artifact = emit.csv("scan.csv", ["s", "lambda0", "lambda1", "gap"], _scan_rows(scan))
    report = {
        "n": args.n,
        "theta": args.theta,
        "min_s": scan.min_s,
        "min_gap": scan.min_gap,
        "grid": args.grid,
        "refine_levels": args.refine,
    }
    if artifact:
        report["artifacts"] = [artifact]
    emit.finish(report)
    return 0


def cmd_phase_diagram(args):
    thetas = _parse_theta_range(args.theta)
    rows = phase_diagram(args.n, thetas, args.grid, args.refine)
    emit = _Emitter(args, "phase-diagram")
    artifact = emit.csv("phase_diagram.csv", ["theta", "min_gap", "min_s"], rows)
    report = {
        "n": args.n,
        "grid": args.grid,
        "refine_levels": args.refine,
        "rows": [{"theta": t, "min_gap": g, "min_s": s} for t, g, s in rows],
    }
    if artifact:
        report["artifacts"] = [artifact]
    emit.finish(report)
    return 0


def cmd_landscape(args):
    rows = landscape_rows(args.n, args.theta)
    emit = _Emitter(args, "landscape")
    artifact = emit.csv("landscape.csv", ["k", "energy", "degeneracy"], rows)
    report = {"n": args.n, "theta": args.theta, "sectors": len(rows)}
    if artifact:
        report["artifacts"] = [artifact]
    emit.finish(report)
    return 0


def cmd_evolve(args):
    model = build_theta_model(args.n, args.theta)
    spec = EvolutionSpec(model, args.tau, args.steps, args.method)
    trace = propagate(spec, uniform_superposition(args.n))
    emit = _Emitter(args, "evolve")
    rows = [
        (t, t / args.tau, ov, nrm)
        for t, ov, nrm in zip(trace.times, trace.overlaps_ground, trace.norms)
    ]
    artifact = emit.csv(
        "trace.csv", ["t", "s", "overlap_instantaneous_ground", "norm"], rows
    )
    report = trace.summary()
    if artifact:
        report["artifacts"] = [artifact]
    emit.finish(report)
    return 0


def cmd_escape_rate(args):
    report = escape_rate_theta(
        args.n, args.theta, c=args.c, log_base=args.log_base,
        theta_h_form=args.theta_h_form,
    ).to_dict()
    emit = _Emitter(args, "escape-rate")
    emit.finish(report)
    return 0


def cmd_thresholds(args):
    th = thresholds(args.n, args.c, args.log_base, args.theta_h_form)
    report = {
        "n": th.n,
        "c": th.c,
        "theta_l": th.theta_l,
        "theta_h": th.theta_h,
        "clamped_l": th.clamped_l,
        "clamped_h": th.clamped_h,
        "log_base": th.log_base,
        "theta_h_form": th.theta_h_form,
    }
    emit = _Emitter(args, "thresholds")
    emit.finish(report)
    return 0


def cmd_corollary1(args):
    magnitude = args.magnitude if args.magnitude is not None else -3.0 * args.n
    result = corollary1_experiment(
        args.n, args.cutoff, magnitude,
        tau=args.tau, steps=args.steps, grid=args.grid, refine=args.refine,
    )
    emit = _Emitter(args, "corollary1")
    artifact = emit.csv(
        "perturbed_scan.csv", ["s", "lambda0", "lambda1", "gap"],
        [tuple(r) for r in result.scan_samples],
    )
    report = {
        "params": {"n": args.n, "cutoff": args.cutoff, "magnitude": magnitude,
                   "tau": result.tau, "steps": result.steps},
        "seed": args.seed,
        "lhs": result.path_shift,
        "bounds": {
            "lemma3_integral": result.lemma3_integral,
            "projection_bound": result.projection_bound_rhs,
        },
        "holds": result.holds_integral,
        "final_overlap": result.final_overlap,
        "min_gap_along_path": result.min_gap_along_path,
        "artifacts": [artifact] if artifact else [],
    }
    emit.finish(report)
    return 0 if result.holds_integral else 1


def cmd_gap_closing(args):
    kwargs = {}
    if args.tau is not None:
        kwargs["tau"] = args.tau
    result = gap_closing_success_experiment(
        args.n, x_schedule=args.x, steps=args.steps,
        grid=args.grid, refine=args.refine, **kwargs,
    )
    emit = _Emitter(args, "gap-closing")
    artifact = emit.csv(
        "perturbed_scan.csv", ["s", "lambda0", "lambda1", "gap"],
        [tuple(r) for r in result.scan_samples],
    )
    report = {
        "params": {"n": args.n, "x_endpoints": list(result.x_endpoints),
                   "tau": result.tau, "steps": result.steps},
        "seed": args.seed,
        "min_gap": result.min_gap,
        "min_s": result.min_s,
        "final_overlap": result.final_overlap,
        "artifacts": [artifact] if artifact else [],
    }
    emit.finish(report)
    return 0


def cmd_theorem2(args):
    model = build_theta_model(args.n, args.theta)
    sched = LinearSchedule(n=args.n, a0=model.h0.matrix, a1=model.h1.matrix)
    result = check_theorem2(
        sched, uniform_superposition(args.n), args.tau, None, args.d, args.gmax,
        steps=args.steps,
    )
    emit = _Emitter(args, "theorem2")
    report = {
        "params": {"n": args.n, "theta": args.theta, "tau": args.tau,
                   "d": args.d, "gmax": args.gmax},
        "seed": args.seed,
        "lhs": result.lhs,
        "bounds": {
            "lemma4": result.lemma4_bound,
            "theorem2": result.theorem2_bound,
        },
        "holds": result.holds_lemma4,
        "dim_confinement": result.dim_x,
        "artifacts": [],
    }
    emit.finish(report)
    return 0 if result.holds_lemma4 else 1


def cmd_verify(args):
    report = run_suite(args.suite, args.seed)
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        sys.stdout.write(f"{status} {check['suite']}:{check['name']}\n")
    emit = _Emitter(args, "verify")
    emit.finish(report, summary={"all_passed": report["all_passed"]})
    return 0 if report["all_passed"] else 1


_HANDLERS = {
    "gap-scan": cmd_gap_scan,
    "phase-diagram": cmd_phase_diagram,
    "landscape": cmd_landscape,
    "evolve": cmd_evolve,
    "escape-rate": cmd_escape_rate,
    "thresholds": cmd_thresholds,
    "corollary1": cmd_corollary1,
    "gap-closing": cmd_gap_closing,
    "theorem2": cmd_theorem2,
    "verify": cmd_verify,
}


def cli_dispatch(argv) -> int:
    """Parse and run; returns the process exit code."""
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    missing = [
        name for name in _REQUIRED[args.command] if getattr(args, name, None) is None
    ]
    if missing:
        flags = ", ".join("--" + name for name in missing)
        sys.stderr.write(f"error: {args.command} requires {flags}\n")
        return 2
    try:
        return _HANDLERS[args.command](args)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main() -> int:
    return cli_dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
