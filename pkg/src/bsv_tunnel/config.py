"""Flat key=value run configuration.

One documented key set, no sections, '#' comments.  Unknown keys are
parse errors: a typo must never silently fall back to a default.
Defaults reproduce the published operating point (omega = 0.0285 a.u.,
field_scale = sqrt(2)e-8 a.u., 5 eV barrier, 3 nm gap, phi = 0,
t_i = 0).  Values derived from other values (t_span, t_max) resolve at
load time so the effective config is fully explicit and round-trips.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, fields, replace

from . import constants
from .contour import ContourSpec, STRAIGHT_LINE, VERTICAL_THEN_REAL
from .ensemble import ADAPTIVE, FIXED_GAUSS, QuadratureSpec
from .errors import ParseError, ValidationError
from .field import SqueezingParams
from .solver import BarrierSpec

__all__ = ["RunConfig", "load_config", "parse_config_text", "format_config"]

MODES = ("trajectories", "field_phase_space", "tunnel_scan", "ptot_scan",
         "exit_trajectories")

# keys that do not affect the science; excluded from the config hash
_NON_SCIENTIFIC = ("output_dir", "workers")


@dataclass(frozen=True)
class RunConfig:
    mode: str = "trajectories"
    r: float = 1.0
    phi: float = 0.0
    omega: float = constants.OMEGA_DEFAULT
    field_scale: float = constants.FIELD_SCALE_DEFAULT
    delta_u_ev: float = constants.DELTA_U_EV_DEFAULT
    gap_nm: float = constants.GAP_NM_DEFAULT
    mass: float = 1.0
    charge: float = 1.0
    t_i: float = 0.0
    t_span: float = math.nan          # default: 2 optical periods
    n_time_samples: int = 481
    n_realizations: int = 20
    x_i: float = -2.32
    r_list: tuple = ()                # default: 11..25 step 1
    levels_n: int = 20
    seed: int = 12345
    quad_method: str = FIXED_GAUSS
    x_min_sigmas: float = 8.0
    n_nodes: int = 121
    rel_tol: float = 1e-6
    contour_shape: str = VERTICAL_THEN_REAL
    max_step: float = 0.5
    branch_guard_radius: float = 0.0
    exit_horizon: float = math.nan    # time past tau0, default 1.5 optical periods
    exit_n_samples: int = 400
    output_dir: str = "out"
    workers: int = 0                  # 0: machine parallelism

    # -- typed views ------------------------------------------------------
    def squeezing(self) -> SqueezingParams:
        return SqueezingParams(r=self.r, phi=self.phi, omega=self.omega,
                               field_scale=self.field_scale)

    def barrier(self) -> BarrierSpec:
        return BarrierSpec.from_ev_nm(self.delta_u_ev, self.gap_nm,
                                      mass=self.mass, charge=self.charge)

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(method=self.quad_method,
                              x_min_sigmas=self.x_min_sigmas,
                              n_nodes=self.n_nodes, rel_tol=self.rel_tol)

    def contour(self) -> ContourSpec:
        return ContourSpec(shape=self.contour_shape, max_step=self.max_step,
                           branch_guard_radius=self.branch_guard_radius)

    def config_hash(self) -> str:
        """Hash of the scientific content (output_dir and workers change
        where and how fast, never what)."""
        lines = []
        for f in sorted(fields(self), key=lambda f: f.name):
            if f.name in _NON_SCIENTIFIC:
                continue
            lines.append(f"{f.name}={_fmt_value(getattr(self, f.name))}")
        digest = hashlib.sha256("\n".join(lines).encode()).hexdigest()
        return digest[:16]


_INT_KEYS = {"n_time_samples", "n_realizations", "levels_n", "seed",
             "n_nodes", "exit_n_samples", "workers"}
_STR_KEYS = {"mode", "quad_method", "contour_shape", "output_dir"}
_LIST_KEYS = {"r_list"}


def _fmt_value(v) -> str:
    if isinstance(v, tuple):
        return ",".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_r_list(text: str, lineno: int):
    text = text.strip()
    if not text:
        return ()
    vals = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if ":" in chunk:
            parts = chunk.split(":")
            if len(parts) not in (2, 3):
                raise ParseError(f"line {lineno}: bad range '{chunk}' "
                                 "(use start:stop or start:stop:step)")
            try:
                a, bnd = float(parts[0]), float(parts[1])
                step = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise ParseError(f"line {lineno}: bad range '{chunk}'") from None
            if step <= 0:
                raise ParseError(f"line {lineno}: range step must be > 0")
            n = int(math.floor((bnd - a) / step + 1e-9)) + 1
            vals.extend(a + k * step for k in range(max(0, n)))
        else:
            try:
                vals.append(float(chunk))
            except ValueError:
                raise ParseError(f"line {lineno}: bad number '{chunk}' "
                                 "in r_list") from None
    return tuple(vals)


def parse_config_text(text: str) -> RunConfig:
    """Parse the flat key=value format into a validated RunConfig."""
    valid = {f.name for f in fields(RunConfig)}
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected key = value, "
                             f"got '{raw.strip()}'")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in valid:
            raise ParseError(f"line {lineno}: unknown key '{key}'")
        if key in seen:
            raise ParseError(f"line {lineno}: duplicate key '{key}'")
        if key in _LIST_KEYS:
            seen[key] = _parse_r_list(val, lineno)
        elif key in _STR_KEYS:
            seen[key] = val
        elif key in _INT_KEYS:
            try:
                seen[key] = int(val)
            except ValueError:
                raise ParseError(f"line {lineno}: key '{key}' needs an "
                                 f"integer, got '{val}'") from None
        else:
            try:
                seen[key] = float(val)
            except ValueError:
                raise ParseError(f"line {lineno}: key '{key}' needs a "
                                 f"number, got '{val}'") from None
    cfg = RunConfig(**seen)
    return _validate(_resolve(cfg))


def load_config(path) -> RunConfig:
    """Read and parse a config file; an empty file yields all defaults
    (mode trajectories)."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def _resolve(cfg: RunConfig) -> RunConfig:
    """Fill value-dependent defaults so the effective config is explicit."""
    updates = {}
    if math.isnan(cfg.t_span):
        updates["t_span"] = 2.0 * (2.0 * math.pi / cfg.omega)
    if not cfg.r_list:
        updates["r_list"] = tuple(float(r) for r in range(11, 26))
    if math.isnan(cfg.exit_horizon):
        updates["exit_horizon"] = 1.5 * (2.0 * math.pi / cfg.omega)
    return replace(cfg, **updates) if updates else cfg


def _validate(cfg: RunConfig) -> RunConfig:
    def need(cond, inv):
        if not cond:
            raise ValidationError(f"config violates: {inv}")

    need(cfg.mode in MODES, f"mode in {MODES}")
    need(cfg.r >= 0.0, "r >= 0")
    need(cfg.omega > 0.0, "omega > 0")
    need(cfg.field_scale > 0.0, "field_scale > 0")
    need(cfg.delta_u_ev > 0.0, "delta_u_ev > 0")
    need(cfg.gap_nm > 0.0, "gap_nm > 0")
    need(cfg.mass > 0.0, "mass > 0")
    need(cfg.charge > 0.0, "charge > 0")
    need(cfg.t_span > 0.0, "t_span > 0")
    need(cfg.n_time_samples >= 2, "n_time_samples >= 2")
    need(cfg.n_realizations >= 1, "n_realizations >= 1")
    need(all(r >= 0.0 for r in cfg.r_list), "every r in r_list >= 0")
    need(len(cfg.r_list) > 0, "r_list non-empty")
    need(cfg.levels_n >= 1, "levels_n >= 1")
    need(cfg.quad_method in (ADAPTIVE, FIXED_GAUSS),
         f"quad_method in ('{ADAPTIVE}', '{FIXED_GAUSS}')")
    need(cfg.x_min_sigmas > 0.0, "x_min_sigmas > 0")
    need(cfg.n_nodes >= 2, "n_nodes >= 2")
    need(cfg.rel_tol > 0.0, "rel_tol > 0")
    need(cfg.contour_shape in (VERTICAL_THEN_REAL, STRAIGHT_LINE),
         f"contour_shape in ('{VERTICAL_THEN_REAL}', '{STRAIGHT_LINE}')")
    need(cfg.max_step > 0.0, "max_step > 0")
    need(cfg.branch_guard_radius >= 0.0, "branch_guard_radius >= 0")
    need(cfg.exit_horizon > 0.0, "exit_horizon > 0")
    need(cfg.exit_n_samples >= 2, "exit_n_samples >= 2")
    need(cfg.workers >= 0, "workers >= 0")
    return cfg


def format_config(cfg: RunConfig) -> str:
    """Emit the effective config in the same flat format; parsing the
    result reproduces the RunConfig exactly."""
    lines = [f"{f.name} = {_fmt_value(getattr(cfg, f.name))}"
             for f in fields(cfg)]
    return "\n".join(lines) + "\n"
