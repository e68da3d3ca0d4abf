"""Run configuration: a versioned, diff-friendly TOML document.

The schema is a handful of flat tables (model, nonlinearity, initial,
solver, thresholds, output) under a top-level schema_version.  Emission
uses a fixed key order and repr-formatted floats so that a config
round-trips through dump/load bit-identically.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..dichotomy import Thresholds
from ..errors import ParseError, ValidationError
from ..model import InitialData, ModelParams, NonlinearitySpec
from ..stefan import SolverControls

__all__ = ["RunConfig", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1

_MODEL_KEYS = ("d1", "d2", "a", "b", "mu1", "mu2", "h0", "fixed_end")
_MONOD_KEYS = ("alpha1", "beta1", "alpha2", "beta2")
_SOLVER_KEYS = ("n", "dt", "t_max", "output_dt")
_THRESHOLD_KEYS = ("delta_s", "eps_v", "eps_h")


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return repr(value)
    if isinstance(value, float):
        text = repr(value)
        return text if ("." in text or "e" in text or "E" in text) else text + ".0"
    if isinstance(value, str):
        import json

        return json.dumps(value)
    raise ValidationError(f"cannot serialize {type(value).__name__} to TOML")


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one run."""

    model: ModelParams
    nonlinearity: dict
    initial: dict
    solver: SolverControls = SolverControls()
    thresholds: Thresholds = Thresholds()
    output_dir: str = "out"
    schema_version: int = SCHEMA_VERSION

    # -- live objects -------------------------------------------------------
    def nonlinearity_spec(self) -> NonlinearitySpec:
        family = self.nonlinearity.get("family", "monod")
        if family == "monod":
            return NonlinearitySpec.monod(*(float(self.nonlinearity[k]) for k in _MONOD_KEYS))
        if family == "tabulated":
            return NonlinearitySpec.from_csv(self.nonlinearity["h_file"],
                                             self.nonlinearity["g_file"])
        raise ValidationError(f"unknown nonlinearity family '{family}'")

    def initial_data(self) -> InitialData:
        generator = self.initial.get("generator", "bump")
        tau = float(self.initial.get("tau", 1.0))
        if generator == "bump":
            return InitialData.bump(self.model.h0, self.model.fixed_end,
                                    amp_u=float(self.initial.get("amp_u", 1.0)),
                                    amp_v=float(self.initial.get("amp_v", 1.0)),
                                    tau=tau)
        if generator == "file":
            return InitialData.from_csv(self.initial["path"], self.model.h0,
                                        self.model.fixed_end, tau=tau)
        raise ValidationError(f"unknown initial-data generator '{generator}'")

    def with_overrides(self, overrides: dict) -> "RunConfig":
        """New config with model fields or the initial tau replaced."""
        model_kwargs = {k: getattr(self.model, k) for k in _MODEL_KEYS}
        initial = dict(self.initial)
        for name, value in overrides.items():
            if name == "tau":
                initial["tau"] = float(value)
            elif name in _MODEL_KEYS and name != "fixed_end":
                model_kwargs[name] = float(value)
            else:
                raise ValidationError(f"cannot override parameter '{name}'")
        return RunConfig(ModelParams(**model_kwargs), self.nonlinearity, initial,
                         self.solver, self.thresholds, self.output_dir,
                         self.schema_version)

    # -- serialization -------------------------------------------------------
    def to_toml_str(self) -> str:
        lines = [f"schema_version = {self.schema_version}", ""]
        lines.append("[model]")
        for key in _MODEL_KEYS:
            value = getattr(self.model, key)
            if key == "fixed_end":
                value = value.value
            lines.append(f"{key} = {_toml_value(value)}")
        lines.append("")
        lines.append("[nonlinearity]")
        lines.append(f"family = {_toml_value(self.nonlinearity.get('family', 'monod'))}")
        for key in sorted(self.nonlinearity):
            if key != "family":
                lines.append(f"{key} = {_toml_value(self.nonlinearity[key])}")
        lines.append("")
        lines.append("[initial]")
        lines.append(f"generator = {_toml_value(self.initial.get('generator', 'bump'))}")
        for key in sorted(self.initial):
            if key != "generator":
                lines.append(f"{key} = {_toml_value(self.initial[key])}")
        lines.append("")
        lines.append("[solver]")
        for key in _SOLVER_KEYS:
            lines.append(f"{key} = {_toml_value(getattr(self.solver, key))}")
        lines.append("")
        lines.append("[thresholds]")
        for key in _THRESHOLD_KEYS:
            lines.append(f"{key} = {_toml_value(getattr(self.thresholds, key))}")
        lines.append("")
        lines.append("[output]")
        lines.append(f"directory = {_toml_value(self.output_dir)}")
        return "\n".join(lines) + "\n"

    def to_toml(self, path) -> None:
        Path(path).write_text(self.to_toml_str())

    @classmethod
    def from_toml_str(cls, text: str) -> "RunConfig":
        try:
            doc = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ParseError(f"invalid TOML: {exc}") from None
        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValidationError(
                f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")

        known = {"schema_version", "model", "nonlinearity", "initial", "solver",
                 "thresholds", "output"}
        unknown = set(doc) - known
        if unknown:
            raise ValidationError(f"unknown config sections: {sorted(unknown)}")

        model_tbl = doc.get("model")
        if not isinstance(model_tbl, dict):
            raise ValidationError("missing [model] table")
        bad = set(model_tbl) - set(_MODEL_KEYS)
        if bad:
            raise ValidationError(f"unknown model keys: {sorted(bad)}")
        kwargs = {k: (model_tbl[k] if k == "fixed_end" else float(model_tbl[k]))
                  for k in model_tbl}
        model = ModelParams(**kwargs)

        solver_tbl = doc.get("solver", {})
        bad = set(solver_tbl) - set(_SOLVER_KEYS)
        if bad:
            raise ValidationError(f"unknown solver keys: {sorted(bad)}")
        solver = SolverControls(
            n=int(solver_tbl.get("n", 512)),
            dt=float(solver_tbl.get("dt", 1e-3)),
            t_max=float(solver_tbl.get("t_max", 500.0)),
            output_dt=float(solver_tbl.get("output_dt", 0.5)))

        thr_tbl = doc.get("thresholds", {})
        bad = set(thr_tbl) - set(_THRESHOLD_KEYS)
        if bad:
            raise ValidationError(f"unknown threshold keys: {sorted(bad)}")
        thresholds = Thresholds(
            delta_s=float(thr_tbl.get("delta_s", 1e-3)),
            eps_v=float(thr_tbl.get("eps_v", 1e-8)),
            eps_h=float(thr_tbl.get("eps_h", 1e-10)))

        output_dir = str(doc.get("output", {}).get("directory", "out"))
        return cls(model, dict(doc.get("nonlinearity", {"family": "monod",
                                                        "alpha1": 2.0, "beta1": 1.0,
                                                        "alpha2": 3.0, "beta2": 1.0})),
                   dict(doc.get("initial", {"generator": "bump"})),
                   solver, thresholds, output_dir, int(version))

    @classmethod
    def from_toml(cls, path) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise ValidationError(f"config file not found: {path}")
        return cls.from_toml_str(path.read_text())
