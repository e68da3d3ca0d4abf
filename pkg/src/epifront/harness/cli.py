"""Command-line front end.

Subcommands: simulate, eigen, steady, critical-length, critical-mu,
critical-tau, sweep, check-hypotheses, plot.  Exit codes: 0 on success,
2 on validation errors, 3 on numerical failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .. import criteria, dichotomy, elliptic, spectral, stefan
from ..errors import EpifrontError, NumericalError, ValidationError
from ..model import reproduction_number, validate_hypotheses
from .config import RunConfig
from .sweep import SweepSpec, sweep as run_sweep

__all__ = ["main"]


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _out_dir(cfg: RunConfig, override: str | None) -> Path:
    out = Path(override) if override else Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_check_hypotheses(args) -> int:
    cfg = RunConfig.from_toml(args.config)
    nl = cfg.nonlinearity_spec()
    report = validate_hypotheses(nl, cfg.model, grid_density=args.grid_density,
                                 z_max=args.z_max)
    _emit({
        "passed": report.passed,
        "zhat": report.zhat,
        "r0": reproduction_number(nl, cfg.model),
        "clauses": [{"name": c.name, "passed": c.passed, "witness": c.witness,
                     "detail": c.detail} for c in report.clauses],
        "warnings": list(report.warnings),
    })
    return 0 if report.passed else 2


def _cmd_eigen(args) -> int:
    cfg = RunConfig.from_toml(args.config)
    nl = cfg.nonlinearity_spec()
    result = spectral.lambda_closed_form(cfg.model, nl, args.l)
    r0 = reproduction_number(nl, cfg.model)
    l0 = spectral.critical_length(cfg.model, nl) if r0 > 1.0 else None
    _emit({"lambda": result.lam, "nu1": result.nu1, "p": result.p, "l0": l0})
    if args.eigenfunctions:
        with open(args.eigenfunctions, "w", newline="") as fh:
            fh.write("x,phi,psi\n")
            for k in range(len(result.x)):
                fh.write("%.12e,%.12e,%.12e\n"
                         % (result.x[k], result.phi[k], result.psi[k]))
    return 0


def _cmd_critical_length(args) -> int:
    cfg = RunConfig.from_toml(args.config)
    nl = cfg.nonlinearity_spec()
    l0 = spectral.critical_length(cfg.model, nl)
    _emit({"l0": l0,
           "lambda_at_l0": spectral.lambda_closed_form(cfg.model, nl, l0, 2).lam})
    return 0


def _cmd_steady(args) -> int:
    cfg = RunConfig.from_toml(args.config)
    nl = cfg.nonlinearity_spec()
    n = args.n or cfg.solver.n
    if args.kind == "semi-infinite":
        profile = elliptic.semi_infinite_profile(cfg.model, nl, args.l, n)
    else:
        profile = elliptic.solve_steady(cfg.model, nl, args.l, args.kind, n)
    out = _out_dir(cfg, args.out)
    csv_path = out / "profile.csv"
    with open(csv_path, "w", newline="") as fh:
        fh.write("x,u,v\n")
        for k in range(len(profile.x)):
            fh.write("%.12e,%.12e,%.12e\n" % (profile.x[k], profile.u[k], profile.v[k]))
    _emit({"l": profile.l, "kind": profile.kind, "residual": profile.residual,
           "iterations": profile.iterations, "trivial": profile.trivial,
           "profile_csv": str(csv_path)})
    return 0


def _cmd_simulate(args) -> int:
    cfg = RunConfig.from_toml(args.config)
    nl = cfg.nonlinearity_spec()
    init = cfg.initial_data()
    rule = None if args.no_early_stop else dichotomy.make_stop_rule(
        cfg.model, nl, cfg.thresholds)
    timeline, state = stefan.simulate(cfg.model, nl, init, cfg.solver, stop_rule=rule)
    outcome = dichotomy.classify(timeline, cfg.model, nl, cfg.thresholds)
    out = _out_dir(cfg, args.out)
    stefan.write_timeline_csv(timeline, out / "timeline.csv")
    stefan.write_state_csv(state, out / "final_state.csv")
    with open(out / "outcome.json", "w") as fh:
        json.dump(outcome.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    _emit(outcome.to_json_dict())
    return 0


def _probe_controls(cfg: RunConfig, args) -> stefan.SolverControls:
    if args.full_resolution:
        return cfg.solver
    return criteria.DEFAULT_PROBE_CONTROLS


def _cmd_critical_mu(args) -> int:
    cfg = RunConfig.from_toml(args.config)
    nl = cfg.nonlinearity_spec()
    init = cfg.initial_data()
    link = criteria.LinkFunction(kind=args.link, rho=args.rho, exponent=args.exponent)
    result = criteria.find_mu1_star(cfg.model, nl, init, link, tol=args.tol,
                                    controls=_probe_controls(cfg, args),
                                    thresholds=cfg.thresholds, budget=args.budget)
    out = _out_dir(cfg, args.out)
    criteria.write_probe_log(result, out / "mu1_star_probes.csv")
    _emit(result.to_json_dict())
    return 0


def _cmd_critical_tau(args) -> int:
    cfg = RunConfig.from_toml(args.config)
    nl = cfg.nonlinearity_spec()
    shapes = cfg.initial_data().with_tau(1.0)
    result = criteria.find_tau_star(cfg.model, nl, shapes, tol=args.tol,
                                    controls=_probe_controls(cfg, args),
                                    thresholds=cfg.thresholds, budget=args.budget)
    out = _out_dir(cfg, args.out)
    criteria.write_probe_log(result, out / "tau_star_probes.csv")
    _emit(result.to_json_dict())
    return 0


def _parse_axis(text: str) -> tuple[str, tuple[float, ...]]:
    if "=" not in text:
        raise ValidationError(f"axis must look like name=v1,v2,... (got '{text}')")
    name, _, values = text.partition("=")
    try:
        parsed = tuple(float(v) for v in values.split(",") if v.strip())
    except ValueError:
        raise ValidationError(f"bad axis values in '{text}'") from None
    return name.strip(), parsed


def _cmd_sweep(args) -> int:
    cfg = RunConfig.from_toml(args.config)
    axes = tuple(_parse_axis(a) for a in args.axis or [])
    spec = SweepSpec(axes=axes, workers=args.workers,
                     output_dir=args.out or str(Path(cfg.output_dir) / "sweep"))
    manifest = run_sweep(cfg, spec)
    _emit({"manifest": str(manifest),
           "axes": [{"name": n, "count": len(v)} for n, v in axes]})
    return 0


def _cmd_plot(args) -> int:
    from . import plots

    out = args.out or "plots"
    written: list[str] = []
    if args.timeline:
        l0 = None
        if args.config:
            cfg = RunConfig.from_toml(args.config)
            nl = cfg.nonlinearity_spec()
            if reproduction_number(nl, cfg.model) > 1.0:
                l0 = spectral.critical_length(cfg.model, nl)
        written += [str(p) for p in plots.plot_timeline(args.timeline, out, l0)]
    if args.profile:
        written.append(str(plots.plot_profile(args.profile, out)))
    if args.manifest:
        written.append(str(plots.plot_phase_map(args.manifest, out)))
    if not written:
        raise ValidationError("nothing to plot: pass --timeline, --profile or --manifest")
    _emit({"written": written})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epifront",
        description="Numerical laboratory for a cooperative epidemic model "
                    "with one free boundary")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("--config", required=True, help="path to a TOML run config")
        return p

    p = with_config(sub.add_parser("check-hypotheses",
                                   help="validate the coupling pair against the model hypotheses"))
    p.add_argument("--grid-density", type=int, default=1000)
    p.add_argument("--z-max", type=float, default=None)
    p.set_defaults(func=_cmd_check_hypotheses)

    p = with_config(sub.add_parser("eigen", help="principal eigenvalue on (0, l)"))
    p.add_argument("--l", type=float, required=True)
    p.add_argument("--eigenfunctions", help="optional CSV path for (x, phi, psi)")
    p.set_defaults(func=_cmd_eigen)

    p = with_config(sub.add_parser("critical-length", help="critical habitat length l0"))
    p.set_defaults(func=_cmd_critical_length)

    p = with_config(sub.add_parser("steady", help="steady-state profile on (0, l)"))
    p.add_argument("--l", type=float, required=True)
    p.add_argument("--kind", choices=["homogeneous", "elevated", "semi-infinite"],
                   default="homogeneous")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_steady)

    p = with_config(sub.add_parser("simulate", help="run the free-boundary simulation"))
    p.add_argument("--out", default=None)
    p.add_argument("--no-early-stop", action="store_true",
                   help="always run to t_max")
    p.set_defaults(func=_cmd_simulate)

    for name, func in (("critical-mu", _cmd_critical_mu),
                       ("critical-tau", _cmd_critical_tau)):
        p = with_config(sub.add_parser(name, help=f"bisect for the {name.split('-')[1]} threshold"))
        p.add_argument("--tol", type=float, default=1e-2)
        p.add_argument("--budget", type=int, default=40)
        p.add_argument("--out", default=None)
        p.add_argument("--full-resolution", action="store_true",
                       help="probe at the config solver resolution instead of the fast default")
        if name == "critical-mu":
            p.add_argument("--link", choices=["linear", "power"], default="linear")
            p.add_argument("--rho", type=float, default=1.0)
            p.add_argument("--exponent", type=float, default=1.0)
        p.set_defaults(func=func)

    p = with_config(sub.add_parser("sweep", help="cartesian parameter sweep"))
    p.add_argument("--axis", action="append",
                   help="axis as name=v1,v2,... (repeatable)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("plot", help="emit SVG figures from run artifacts")
    p.add_argument("--timeline")
    p.add_argument("--profile")
    p.add_argument("--manifest")
    p.add_argument("--config", help="optional config, used to draw the l0 guideline")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_plot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except EpifrontError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
