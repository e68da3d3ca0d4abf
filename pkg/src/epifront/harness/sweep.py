"""Deterministic parameter sweeps over independent simulations.

Each grid point is one simulate + classify with its own config; results
are gathered, sorted by run id, and written as one manifest CSV plus a
per-run outcome JSON.  Output is byte-identical regardless of the worker
count, and an existing manifest is extended rather than recomputed.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from pathlib import Path

from ..dichotomy import classify, make_stop_rule
from ..errors import EpifrontError, ValidationError
from ..stefan import simulate
from .config import RunConfig

__all__ = ["SweepSpec", "sweep", "read_manifest"]

SWEEPABLE = ("h0", "mu1", "mu2", "tau", "d1", "d2", "a", "b")


@dataclass(frozen=True)
class SweepSpec:
    """Axes of a cartesian sweep plus execution controls."""

    axes: tuple[tuple[str, tuple[float, ...]], ...]
    workers: int = 1
    output_dir: str = "sweep"
    cap: int = 10_000

    def __post_init__(self):
        for name, values in self.axes:
            if name not in SWEEPABLE:
                raise ValidationError(f"cannot sweep parameter '{name}'")
            if len(values) == 0:
                raise ValidationError(f"axis '{name}' has no values")
        size = 1
        for _, values in self.axes:
            size *= len(values)
        if size > self.cap:
            raise ValidationError(f"sweep size {size} exceeds cap {self.cap}")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")


def _run_one(args: tuple[str, str, dict]) -> dict:
    """Worker entry: one simulate + classify from a serialized config."""
    run_id, cfg_text, overrides = args
    try:
        cfg = RunConfig.from_toml_str(cfg_text).with_overrides(overrides)
        params = cfg.model
        nl = cfg.nonlinearity_spec()
        init = cfg.initial_data()
        timeline, _ = simulate(params, nl, init, cfg.solver,
                               stop_rule=make_stop_rule(params, nl, cfg.thresholds))
        outcome = classify(timeline, params, nl, cfg.thresholds)
        return dict(run_id=run_id, overrides=overrides,
                    outcome=outcome.to_json_dict(), h_final=float(timeline.h[-1]),
                    error=None)
    except EpifrontError as exc:
        return dict(run_id=run_id, overrides=overrides, outcome=None,
                    h_final=float("nan"), error=str(exc))


def _manifest_header(spec: SweepSpec) -> str:
    names = [name for name, _ in spec.axes]
    return ",".join(["run_id"] + names + ["class", "h_final"])


def _manifest_row(spec: SweepSpec, result: dict) -> str:
    values = ["%.12e" % result["overrides"][name] for name, _ in spec.axes]
    cls = result["outcome"]["class"] if result["outcome"] else "error"
    return ",".join([result["run_id"]] + values + [cls, "%.12e" % result["h_final"]])


def read_manifest(path) -> tuple[list[str], list[list[str]]]:
    """Manifest header fields and rows (as string cells)."""
    from ..errors import ParseError

    lines = Path(path).read_text().strip().splitlines()
    if not lines:
        raise ParseError(f"{path}: empty manifest", line=1)
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    for idx, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise ParseError(f"{path}: ragged row", line=idx)
    return header, rows


def sweep(cfg: RunConfig, spec: SweepSpec) -> Path:
    """Run the sweep; returns the manifest path.

    Runs already present in the manifest are skipped, making interrupted
    sweeps resumable.  Individual run failures are recorded as class
    'error' and do not stop the sweep.
    """
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "manifest.csv"

    done: dict[str, str] = {}
    if manifest_path.exists():
        header, rows = read_manifest(manifest_path)
        if header != _manifest_header(spec).split(","):
            raise ValidationError("existing manifest has a different axis layout")
        done = {row[0]: ",".join(row) for row in rows}

    grids = [values for _, values in spec.axes] or [()]
    names = [name for name, _ in spec.axes]
    jobs = []
    cfg_text = cfg.to_toml_str()
    if names:
        combos = list(product(*grids))
    else:
        combos = [()]  # degenerate sweep: single baseline run
    for idx, combo in enumerate(combos):
        run_id = f"run{idx:05d}"
        if run_id in done:
            continue
        overrides = {name: float(val) for name, val in zip(names, combo)}
        jobs.append((run_id, cfg_text, overrides))

    if spec.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(job) for job in jobs]

    rows = dict(done)
    for result in results:
        rows[result["run_id"]] = _manifest_row(spec, result)
        payload = result["outcome"] if result["outcome"] else {"error": result["error"]}
        with open(out / f"{result['run_id']}.json", "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")

    with open(manifest_path, "w", newline="") as fh:
        fh.write(_manifest_header(spec) + "\n")
        for run_id in sorted(rows):
            fh.write(rows[run_id] + "\n")
    return manifest_path
