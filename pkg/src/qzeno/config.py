"""Scenario documents for the command-line front end.

A document is TOML (or JSON, which is what the run manifest echoes) with a
``[scenario]`` table, an optional ``[integrator]`` table and an optional
``[sweep]`` table::

    [scenario]
    kind = "ihbw"          # ihbw | reversed | partial | bangbang | selective | unstable | subspace
    mode = "ideal"
    omega_rf = 1.0
    pulse_count = 4

    [sweep]
    parameter = "pulse_count"
    values = [1, 2, 4, 8]
"""

from __future__ import annotations

import json
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import qalg
from .dynamics import IntegratorConfig
from .errors import ConfigInvalid
from .scenarios import (
    ExperimentResult,
    IhbwConfig,
    ReservoirConfig,
    SubspaceConfig,
    run_bangbang,
    run_ihbw,
    run_partial,
    run_reversed,
    run_selective,
    run_unstable,
    run_zeno_subspace,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

IHBW_FIELDS = {
    "omega_rf",
    "pulse_count",
    "total_time",
    "init_level",
    "mode",
    "omega_laser",
    "laser_pulse_duration",
    "gamma3",
    "rf_on_during_laser",
    "samples",
}
KIND_FIELDS = {
    "ihbw": IHBW_FIELDS,
    "reversed": IHBW_FIELDS - {"init_level"},
    "partial": IHBW_FIELDS | {"eta"},
    "bangbang": IHBW_FIELDS | {"kick"},
    "selective": IHBW_FIELDS | {"trajectories", "seed"},
    "unstable": {
        "mode_count",
        "band_center",
        "band_width",
        "coupling",
        "measurement_interval",
        "measurement_count",
    },
    "subspace": {"hamiltonian", "hamiltonian_imag", "subspace", "pulse_count", "total_time", "init_index", "samples"},
}
INTEGRATOR_FIELDS = {"steps", "trace_drift_limit", "max_step_scale"}
KICKS = {"identity": np.eye(2, dtype=complex), "sigma_z": qalg.SIGMA_Z, "sigma_x": qalg.SIGMA_X}
DEFAULT_SEED = 20061


class ConfigError(ConfigInvalid):
    """Unparseable config file; ``field`` carries the file and line location."""


def load_document(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc.strerror}") from None
    if path.suffix.lower() == ".json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}", f"JSON parse error: {exc.msg} (column {exc.colno})") from None
    else:
        try:
            doc = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            m = re.search(r"line (\d+)", str(exc))
            where = f"{path}:{m.group(1)}" if m else str(path)
            raise ConfigError(where, f"TOML parse error: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(str(path), "top level must be a table")
    return doc


@dataclass(frozen=True)
class ScenarioSpec:
    """A validated scenario ready to run; picklable for process pools."""

    kind: str
    params: dict
    integrator: dict = field(default_factory=dict)

    def _ihbw(self) -> IhbwConfig:
        keys = IHBW_FIELDS & self.params.keys()
        kw = {k: self.params[k] for k in keys}
        return IhbwConfig(integrator=IntegratorConfig(**self.integrator), **kw)

    def build(self):
        """Construct the library config objects, raising ConfigInvalid on bad values."""
        p = self.params
        try:
            if self.kind in ("ihbw", "reversed", "partial", "bangbang", "selective"):
                cfg = self._ihbw()
                if self.kind in ("partial", "bangbang", "selective") and cfg.mode != "ideal":
                    raise ConfigInvalid("mode", f"kind '{self.kind}' requires mode 'ideal'")
                if self.kind == "partial":
                    eta = p.get("eta", 1.0)
                    if not (isinstance(eta, (int, float)) and not isinstance(eta, bool) and 0 <= eta <= 1):
                        raise ConfigInvalid("eta", "must be a number in [0, 1]")
                if self.kind == "bangbang":
                    _kick(p.get("kick", "sigma_z"))
                if self.kind == "selective":
                    for name, default in (("trajectories", 10_000), ("seed", DEFAULT_SEED)):
                        v = p.get(name, default)
                        if isinstance(v, bool) or not isinstance(v, int) or v < (1 if name == "trajectories" else 0):
                            raise ConfigInvalid(name, "must be a non-negative integer" if name == "seed" else "must be an integer >= 1")
                return cfg
            if self.kind == "unstable":
                return ReservoirConfig(**p)
            if self.kind == "subspace":
                if "hamiltonian" not in p or "subspace" not in p:
                    raise ConfigInvalid("hamiltonian" if "hamiltonian" not in p else "subspace", "is required")
                h = _matrix(p["hamiltonian"], "hamiltonian")
                if "hamiltonian_imag" in p:
                    h = h + 1j * _matrix(p["hamiltonian_imag"], "hamiltonian_imag")
                kw = {k: v for k, v in p.items() if k not in ("hamiltonian", "hamiltonian_imag")}
                if not isinstance(kw["subspace"], list):
                    raise ConfigInvalid("subspace", "must be a list of level indices")
                return SubspaceConfig(hamiltonian=h, **kw)
        except ConfigInvalid as exc:
            raise ConfigInvalid(f"scenario.{exc.field}" if exc.field != "integrator" else exc.field, exc.message) from None
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid("scenario", str(exc)) from None
        raise ConfigInvalid("scenario.kind", f"unknown kind {self.kind!r}")

    def run(self) -> ExperimentResult:
        cfg = self.build()
        p = self.params
        if self.kind == "ihbw":
            res = run_ihbw(cfg)
        elif self.kind == "reversed":
            res = run_reversed(cfg)
        elif self.kind == "partial":
            res = run_partial(cfg, float(p.get("eta", 1.0)))
        elif self.kind == "bangbang":
            res = run_bangbang(cfg, _kick(p.get("kick", "sigma_z")))
        elif self.kind == "selective":
            res = run_selective(cfg, p.get("trajectories", 10_000), p.get("seed", DEFAULT_SEED))
        elif self.kind == "unstable":
            res = run_unstable(cfg)
        else:
            res = run_zeno_subspace(cfg)
        res.config_echo = self.echo(cfg)
        return res

    def echo(self, cfg=None) -> dict:
        """Fully resolved document; running it again reproduces the same result."""
        cfg = cfg if cfg is not None else self.build()
        scen = dict(cfg.echo())
        integ = scen.pop("integrator", None)
        if self.kind == "reversed":
            scen.pop("init_level", None)
        if self.kind == "partial":
            scen["eta"] = float(self.params.get("eta", 1.0))
        if self.kind == "bangbang":
            scen["kick"] = self.params.get("kick", "sigma_z")
        if self.kind == "selective":
            scen["trajectories"] = int(self.params.get("trajectories", 10_000))
            scen["seed"] = int(self.params.get("seed", DEFAULT_SEED))
        out = {"scenario": {"kind": self.kind, **scen}}
        if integ is not None:
            out["integrator"] = integ
        return out


def _matrix(rows, name) -> np.ndarray:
    try:
        m = np.array(rows, dtype=float)
    except (TypeError, ValueError):
        raise ConfigInvalid(name, "must be a square array of numbers") from None
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigInvalid(name, "must be a square array of numbers")
    return m


def _kick(spec) -> np.ndarray:
    if isinstance(spec, str):
        if spec not in KICKS:
            raise ConfigInvalid("kick", f"unknown kick {spec!r}; expected one of {sorted(KICKS)}")
        return KICKS[spec]
    if isinstance(spec, dict):
        m = _matrix(spec.get("real"), "kick.real")
        if "imag" in spec:
            m = m + 1j * _matrix(spec["imag"], "kick.imag")
        if m.shape != (2, 2) or not qalg.is_unitary(m):
            raise ConfigInvalid("kick", "must be a 2x2 unitary")
        return m
    raise ConfigInvalid("kick", "must be a kick name or a {real, imag} table")


def parse_document(doc: dict, *, seed: int | None = None, steps: int | None = None):
    """Validate a document and return ``(specs, sweep)``.

    ``specs`` holds one ScenarioSpec per sweep point (a single one without a
    sweep); ``sweep`` is ``None`` or ``(parameter, values)``.
    """
    unknown = set(doc) - {"scenario", "integrator", "sweep"}
    if unknown:
        raise ConfigInvalid(sorted(unknown)[0], "unknown top-level table")
    scen = doc.get("scenario")
    if not isinstance(scen, dict):
        raise ConfigInvalid("scenario", "a [scenario] table is required")
    params = dict(scen)
    kind = params.pop("kind", "ihbw")
    if kind not in KIND_FIELDS:
        raise ConfigInvalid("scenario.kind", f"unknown kind {kind!r}; expected one of {sorted(KIND_FIELDS)}")
    for key in params:
        if key not in KIND_FIELDS[kind]:
            raise ConfigInvalid(f"scenario.{key}", f"unknown field for kind '{kind}'")

    integ = dict(doc.get("integrator") or {})
    for key in integ:
        if key not in INTEGRATOR_FIELDS:
            raise ConfigInvalid(f"integrator.{key}", "unknown field")
    if steps is not None:
        integ["steps"] = steps
    try:
        IntegratorConfig(**integ)
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid("integrator", str(exc)) from None
    # deterministic scenarios have no use for a seed
    if seed is not None and kind == "selective":
        params["seed"] = seed

    sweep = doc.get("sweep")
    if sweep is None:
        spec = ScenarioSpec(kind, params, integ)
        spec.build()
        return [spec], None
    if not isinstance(sweep, dict):
        raise ConfigInvalid("sweep", "must be a table with 'parameter' and 'values'")
    name = sweep.get("parameter")
    values = sweep.get("values")
    extra = set(sweep) - {"parameter", "values"}
    if extra:
        raise ConfigInvalid(f"sweep.{sorted(extra)[0]}", "unknown field")
    if not isinstance(name, str) or name not in KIND_FIELDS[kind]:
        raise ConfigInvalid("sweep.parameter", f"must name a field of kind '{kind}'")
    if not isinstance(values, list) or not values:
        raise ConfigInvalid("sweep.values", "must be a non-empty list")
    specs = []
    for k, v in enumerate(values):
        spec = ScenarioSpec(kind, {**params, name: v}, integ)
        try:
            spec.build()
        except ConfigInvalid as exc:
            raise ConfigInvalid(f"sweep.values[{k}]", f"{exc.field}: {exc.message}") from None
        specs.append(spec)
    return specs, (name, values)
