"""Run configuration: line-oriented ``section.key = value`` text.

Every key has a default, so an empty file is a valid configuration. Parsed
values remember whether they were set explicitly, and errors carry the line
number of the offending key.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy.constants import e as e_charge
from scipy.constants import m_e

from .decoherence import Materials, QuadratureSpec
from .fields import ConfigurationError, Grid, make_grid
from .potentials import DoubleWellParams, L_NM, V_B

W_VALID = (0.05, 0.5)
W_NOMINAL = (0.08, 0.34)


class ConfigError(ConfigurationError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _float_list(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(float(p) for p in text.split(","))


def _positive(v):
    if not v > 0:
        raise ValueError("must be positive")


def _non_negative(v):
    if v < 0:
        raise ValueError("must be non-negative")


def _w_range(v):
    lo, hi = W_VALID
    if not lo <= v <= hi:
        raise ValueError(f"must lie in [{lo}, {hi}]")


def _all_positive(vs):
    if any(not v > 0 for v in vs):
        raise ValueError("all entries must be positive")


def _one_of(*choices):
    def check(v):
        if v not in choices:
            raise ValueError(f"must be one of {', '.join(choices)}")

    return check


def _at_least(n):
    def check(v):
        if v < n:
            raise ValueError(f"must be at least {n}")

    return check


@dataclass(frozen=True)
class _Key:
    parse: Callable[[str], Any]
    default: Any
    check: Callable[[Any], None] | None = None


# Lengths in nm, energies in J unless the key says otherwise.
SCHEMA: dict[str, _Key] = {
    "grid.half_width_x": _Key(float, 30.0, _positive),
    "grid.half_width_y": _Key(float, 20.0, _positive),
    "grid.step": _Key(float, 0.5, _positive),
    "well.m_eff_ratio": _Key(float, 0.065, _positive),
    "well.l": _Key(float, L_NM, _positive),
    "well.V_B": _Key(float, V_B, _positive),
    "well.w": _Key(float, 0.2, _w_range),
    "materials.s": _Key(float, 5.2e3, _positive),
    "materials.rho": _Key(float, 5317.0, _positive),
    "materials.e14": _Key(float, 0.16, _non_negative),
    "materials.kappa0": _Key(float, 12.8, _positive),
    "materials.Xi_eV": _Key(float, 7.0, _non_negative),
    "materials.kappa": _Key(float, 12.8, _positive),
    "cnot.R": _Key(_float_list, (), _all_positive),
    "cnot.tune": _Key(_bool, True),
    "cnot.v_b_low": _Key(float, 0.7, _positive),
    "cnot.v_b_high": _Key(float, 1.0, _positive),
    "sweep.parameter": _Key(str.strip, "w", _one_of("w", "R")),
    "sweep.start": _Key(float, 0.08, _positive),
    "sweep.stop": _Key(float, 0.34, _positive),
    "sweep.count": _Key(int, 6, _at_least(2)),
    "sweep.w_values": _Key(_float_list, (), _all_positive),
    "sweep.threads": _Key(int, 1, _at_least(1)),
    "solver.tol": _Key(float, 1e-9, _positive),
    "solver.max_iter": _Key(int, 200_000, _at_least(1)),
    "solver.guard": _Key(int, 4, _at_least(0)),
    "quadrature.n_theta": _Key(int, 64, _at_least(4)),
    "quadrature.n_phi": _Key(int, 128, _at_least(4)),
    "quadrature.rtol": _Key(float, 5e-3, _positive),
    "output.dir": _Key(str.strip, "results"),
    "output.emit_svg": _Key(_bool, True),
    "output.literal_longitudinal": _Key(_bool, False),
}


@dataclass(frozen=True)
class SolverSpec:
    tol: float = 1e-9
    max_iter: int = 200_000
    guard: int = 4


@dataclass(frozen=True)
class CnotSpec:
    """Control-target separations (nm) and the V_B tuning window.

    The window is given as fractions of the static barrier height.
    """

    R: tuple[float, ...] = ()
    tune: bool = True
    v_b_low: float = 0.7
    v_b_high: float = 1.0


@dataclass(frozen=True)
class SweepSpec:
    parameter: str = "w"
    start: float = 0.08
    stop: float = 0.34
    count: int = 6
    w_values: tuple[float, ...] = ()
    threads: int = 1

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class RunConfig:
    grid: Grid
    well: DoubleWellParams
    materials: Materials
    cnot: CnotSpec
    sweep: SweepSpec
    solver: SolverSpec
    quadrature: QuadratureSpec
    out_dir: str = "results"
    emit_svg: bool = True
    literal_longitudinal: bool = False
    values: dict[str, Any] = field(default_factory=dict, compare=False, repr=False)
    provenance: dict[str, str] = field(default_factory=dict, compare=False, repr=False)

    def digest(self) -> str:
        """SHA-256 of the resolved scientific settings (output keys excluded)."""
        items = {k: v for k, v in self.values.items() if not k.startswith("output.dir")}
        blob = json.dumps(items, sort_keys=True, default=list).encode()
        return hashlib.sha256(blob).hexdigest()

    def with_overrides(self, **values) -> "RunConfig":
        """Rebuild with keys replaced (dotted names with ``__`` for ``.``)."""
        merged = dict(self.values)
        prov = dict(self.provenance)
        for k, v in values.items():
            key = k.replace("__", ".")
            if key not in SCHEMA:
                raise ConfigError(f"unknown key {key!r}")
            merged[key] = v
            prov[key] = "explicit"
        return _build(merged, prov, {})


def _build(values: dict[str, Any], provenance: dict[str, str], lines: dict[str, int]) -> RunConfig:
    def fail(key: str, msg: str):
        raise ConfigError(f"{key}: {msg}", lines.get(key))

    v = values
    try:
        grid = make_grid(v["grid.half_width_x"], v["grid.half_width_y"], v["grid.step"])
    except ConfigurationError as exc:
        fail("grid.step", str(exc))
    if v["sweep.parameter"] == "w":
        for key in ("sweep.start", "sweep.stop"):
            try:
                _w_range(v[key])
            except ValueError as exc:
                fail(key, str(exc))
    for key in ("well.w",) + (("sweep.start", "sweep.stop") if v["sweep.parameter"] == "w" else ()):
        lo, hi = W_NOMINAL
        if not lo <= v[key] <= hi:
            where = f" (line {lines[key]})" if key in lines else ""
            warnings.warn(f"{key} = {v[key]} lies outside the studied range [{lo}, {hi}]{where}", stacklevel=3)
    for w in v["sweep.w_values"]:
        try:
            _w_range(w)
        except ValueError as exc:
            fail("sweep.w_values", str(exc))
    if not v["cnot.v_b_low"] < v["cnot.v_b_high"]:
        fail("cnot.v_b_high", "must exceed cnot.v_b_low")
    if v["sweep.parameter"] == "R" and v["sweep.start"] <= 0:
        fail("sweep.start", "separations must be positive")

    m_eff = v["well.m_eff_ratio"] * m_e
    try:
        well = DoubleWellParams(m_eff=m_eff, l=v["well.l"], V_B=v["well.V_B"], w=v["well.w"])
        materials = Materials(
            m_eff=m_eff,
            s=v["materials.s"],
            rho=v["materials.rho"],
            e14=v["materials.e14"],
            kappa0=v["materials.kappa0"],
            Xi=v["materials.Xi_eV"] * e_charge,
            kappa=v["materials.kappa"],
        )
    except (ConfigurationError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(
        grid=grid,
        well=well,
        materials=materials,
        cnot=CnotSpec(v["cnot.R"], v["cnot.tune"], v["cnot.v_b_low"], v["cnot.v_b_high"]),
        sweep=SweepSpec(
            v["sweep.parameter"], v["sweep.start"], v["sweep.stop"], v["sweep.count"],
            v["sweep.w_values"], v["sweep.threads"],
        ),
        solver=SolverSpec(v["solver.tol"], v["solver.max_iter"], v["solver.guard"]),
        quadrature=QuadratureSpec(v["quadrature.n_theta"], v["quadrature.n_phi"], v["quadrature.rtol"]),
        out_dir=v["output.dir"],
        emit_svg=v["output.emit_svg"],
        literal_longitudinal=v["output.literal_longitudinal"],
        values=dict(values),
        provenance=dict(provenance),
    )


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text; missing keys take defaults."""
    values = {k: spec.default for k, spec in SCHEMA.items()}
    provenance = {k: "default" for k in SCHEMA}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in lines:
            raise ConfigError(f"{key} already set on line {lines[key]}", lineno)
        spec = SCHEMA[key]
        try:
            parsed = spec.parse(value)
            if spec.check is not None:
                spec.check(parsed)
        except ValueError as exc:
            raise ConfigError(f"{key}: bad value {value!r} ({exc})", lineno) from None
        values[key] = parsed
        provenance[key] = "explicit"
        lines[key] = lineno
    return _build(values, provenance, lines)


def default_config() -> RunConfig:
    return parse_config("")


def describe(cfg: RunConfig) -> list[str]:
    """``key = value  # default|explicit`` lines; re-parsable."""
    out = []
    for k in SCHEMA:
        v = cfg.values[k]
        if isinstance(v, tuple):
            text = ", ".join(repr(x) for x in v)
        elif isinstance(v, bool):
            text = "true" if v else "false"
        else:
            text = repr(v) if isinstance(v, float) else str(v)
        out.append(f"{k} = {text}  # {cfg.provenance[k]}")
    return out

