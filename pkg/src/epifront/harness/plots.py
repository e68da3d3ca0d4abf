"""Standalone SVG figures from persisted run artifacts."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "epifront"

import matplotlib.pyplot as plt
import numpy as np

from ..errors import ParseError
from ..stefan import read_timeline_csv
from .sweep import read_manifest

__all__ = ["plot_timeline", "plot_profile", "plot_phase_map"]


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_timeline(timeline_path, out_dir, l0: float | None = None) -> list[Path]:
    """Boundary trajectory and log sup-norm curves from a timeline CSV."""
    tl = read_timeline_csv(timeline_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(tl.t, tl.h, lw=1.5)
    if l0 is not None:
        ax.axhline(l0, ls="--", color="gray", label="critical length")
        ax.legend(loc="best")
    ax.set_xlabel("t")
    ax.set_ylabel("h(t)")
    ax.set_title("boundary position")
    written.append(_save(fig, out / "h_curve.svg"))

    fig, ax = plt.subplots(figsize=(6, 4))
    norm = tl.sup_u + tl.sup_v
    positive = norm > 0
    ax.semilogy(tl.t[positive], norm[positive], lw=1.5)
    ax.set_xlabel("t")
    ax.set_ylabel("sup u + sup v")
    ax.set_title("sup-norm decay")
    written.append(_save(fig, out / "log_norm.svg"))
    return written


def plot_profile(state_path, out_dir) -> Path:
    """Final u and v profiles from a snapshot CSV (y,x,u,v)."""
    lines = Path(state_path).read_text().strip().splitlines()
    if not lines:
        raise ParseError(f"{state_path}: empty snapshot", line=1)
    if lines[0] != "y,x,u,v":
        raise ParseError(f"{state_path}: expected header 'y,x,u,v'", line=1)
    try:
        data = np.array([[float(c) for c in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise ParseError(f"{state_path}: {exc}") from None
    if data.size == 0:
        raise ParseError(f"{state_path}: snapshot has no rows", line=2)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(data[:, 1], data[:, 2], label="u")
    ax.plot(data[:, 1], data[:, 3], label="v")
    ax.set_xlabel("x")
    ax.set_ylabel("concentration")
    ax.set_title("final profiles")
    ax.legend(loc="best")
    return _save(fig, out / "profiles.svg")


def plot_phase_map(manifest_path, out_dir) -> Path:
    """Heat grid of outcomes for a two-axis sweep manifest."""
    header, rows = read_manifest(manifest_path)
    if len(header) != 5:
        raise ParseError(f"{manifest_path}: phase map needs exactly two axes "
                         f"(got columns {header})")
    if not rows:
        raise ParseError(f"{manifest_path}: manifest has no rows", line=2)
    name_x, name_y = header[1], header[2]
    xs = sorted({float(r[1]) for r in rows})
    ys = sorted({float(r[2]) for r in rows})
    code = {"vanishing": 0.0, "undetermined": 1.0, "spreading": 2.0, "error": np.nan}
    grid = np.full((len(ys), len(xs)), np.nan)
    for r in rows:
        grid[ys.index(float(r[2])), xs.index(float(r[1]))] = code.get(r[3], np.nan)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 5))
    mesh = ax.pcolormesh(xs, ys, grid, cmap="coolwarm", vmin=0.0, vmax=2.0,
                         shading="nearest")
    fig.colorbar(mesh, ax=ax, ticks=[0, 1, 2],
                 label="0 vanishing / 1 undetermined / 2 spreading")
    ax.set_xlabel(name_x)
    ax.set_ylabel(name_y)
    ax.set_title("phase map")
    return _save(fig, out / "phase_map.svg")
