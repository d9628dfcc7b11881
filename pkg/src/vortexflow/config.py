"""Run configuration: bracketed key=value sections, strictly validated
(unknown keys and sections are errors, no silent typos)."""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field

from .bc import BoundarySpec, ProfileError, RotationProfile
from .grid import DomainSpec, GridError
from .hopf import HopfParams
from .march import MarchConfig
from .newton import NewtonConfig
from .ops import PhysParams


class ConfigError(ValueError):
    """Missing/unknown keys or malformed values."""


REQUIRED_SECTIONS = ("domain", "grid", "physics", "bc", "solver", "output")

_KNOWN_KEYS = {
    "domain": {"sigma", "R", "L"},
    "grid": {"nr", "nz"},
    "physics": {"nu"},
    "bc": {"profile", "gamma", "points", "bottom", "hopf_eps", "outer"},
    "solver": {
        "strategy", "scheme", "march_dt", "march_t_end", "march_stall",
        "march_cfl", "newton_tol", "newton_max_iters", "newton_damping",
        "continuation_start", "continuation_step",
    },
    "output": {"precision", "fields_file"},
}

STRATEGIES = ("auto", "march", "stokes", "continuation")


@dataclass
class SolverSettings:
    strategy: str = "auto"
    scheme: str = "centered"
    march: MarchConfig = field(default_factory=lambda: MarchConfig(
        t_end=6.0, stall_tol=1e-4))
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    continuation_start: float = 0.2
    continuation_step: float = 0.2


@dataclass
class OutputSettings:
    precision: int = 17
    fields_file: str = "fields.dat"


@dataclass
class RunConfig:
    domain: DomainSpec
    nr: int
    nz: int
    physics: PhysParams
    bc: BoundarySpec
    solver: SolverSettings
    output: OutputSettings

    def gamma(self) -> float:
        """Circulation scale of the run (2*pi*sigma*max wall speed for
        piecewise profiles)."""
        prof = self.bc.profile
        if prof.kind == "uniform":
            return prof.gamma
        vmax = max(v for _, v in prof.breakpoints)
        return 2.0 * math.pi * self.domain.sigma * vmax


def _get(cp, section, key, cast, default=None, required=False):
    if not cp.has_option(section, key):
        if required:
            raise ConfigError(f"missing required key [{section}] {key}")
        return default
    raw = cp.get(section, key).strip()
    try:
        return cast(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc


def _parse_points(raw: str):
    pts = []
    for tok in raw.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            z_s, v_s = tok.split(":")
            pts.append((float(z_s), float(v_s)))
        except ValueError as exc:
            raise ConfigError(f"bad breakpoint {tok!r}, want z:v") from exc
    return pts


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a run configuration."""
    cp = configparser.ConfigParser(interpolation=None, strict=True)
    cp.optionxform = str  # keys are case-sensitive (R vs r)
    try:
        cp.read_file(io.StringIO(text))
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    missing = [s for s in REQUIRED_SECTIONS if not cp.has_section(s)]
    if missing:
        raise ConfigError(f"missing sections: {', '.join(missing)}")
    for section in cp.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        unknown = set(cp.options(section)) - _KNOWN_KEYS[section]
        if unknown:
            raise ConfigError(
                f"unknown keys in [{section}]: {', '.join(sorted(unknown))}")

    try:
        domain = DomainSpec(
            sigma=_get(cp, "domain", "sigma", float, required=True),
            R=_get(cp, "domain", "R", float, default=4.0),
            L=_get(cp, "domain", "L", float, default=10.0),
        )
    except GridError as exc:
        raise ConfigError(str(exc)) from exc

    nr = _get(cp, "grid", "nr", int, required=True)
    nz = _get(cp, "grid", "nz", int, required=True)
    if nr < 2 or nz < 2:
        raise ConfigError(f"need nr, nz >= 2, got {nr}, {nz}")

    nu = _get(cp, "physics", "nu", float, required=True)
    if nu <= 0:
        raise ConfigError(f"need nu > 0, got {nu}")

    kind = _get(cp, "bc", "profile", str, required=True)
    try:
        if kind == "uniform":
            gamma = _get(cp, "bc", "gamma", float, required=True)
            profile = RotationProfile.uniform(gamma)
        elif kind == "piecewise":
            raw = _get(cp, "bc", "points", str, required=True)
            profile = RotationProfile.piecewise(*_parse_points(raw))
        else:
            raise ConfigError(f"unknown profile kind {kind!r}")
    except ProfileError as exc:
        raise ConfigError(str(exc)) from exc

    bottom = _get(cp, "bc", "bottom", str, default="noslip")
    if bottom not in ("noslip", "hopf"):
        raise ConfigError(f"bottom must be noslip or hopf, got {bottom!r}")
    hopf = None
    if bottom == "hopf":
        eps = _get(cp, "bc", "hopf_eps", float, default=0.4)
        hopf = HopfParams(eps=eps, sigma=domain.sigma, gamma=_gamma_of(profile, domain))
    outer = _get(cp, "bc", "outer", float, default=0.0)
    bc = BoundarySpec(profile=profile, bottom=bottom, hopf=hopf, outer_swirl=outer)

    strategy = _get(cp, "solver", "strategy", str, default="auto")
    if strategy not in STRATEGIES:
        raise ConfigError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    scheme = _get(cp, "solver", "scheme", str, default="centered")
    if scheme not in ("centered", "upwind"):
        raise ConfigError(f"scheme must be centered or upwind, got {scheme!r}")
    try:
        march = MarchConfig(
            dt=_get(cp, "solver", "march_dt", float),
            t_end=_get(cp, "solver", "march_t_end", float, default=6.0),
            stall_tol=_get(cp, "solver", "march_stall", float, default=1e-4),
            cfl_limit=_get(cp, "solver", "march_cfl", float, default=0.5),
        )
        newton = NewtonConfig(
            tol_abs=_get(cp, "solver", "newton_tol", float, default=1e-10),
            max_iters=_get(cp, "solver", "newton_max_iters", int, default=30),
            damping=_get(cp, "solver", "newton_damping", float, default=1.0),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    solver = SolverSettings(
        strategy=strategy,
        scheme=scheme,
        march=march,
        newton=newton,
        continuation_start=_get(cp, "solver", "continuation_start", float, default=0.2),
        continuation_step=_get(cp, "solver", "continuation_step", float, default=0.2),
    )

    precision = _get(cp, "output", "precision", int, default=17)
    if not (1 <= precision <= 17):
        raise ConfigError(f"precision must be in [1, 17], got {precision}")
    output = OutputSettings(
        precision=precision,
        fields_file=_get(cp, "output", "fields_file", str, default="fields.dat"),
    )

    return RunConfig(domain=domain, nr=nr, nz=nz, physics=PhysParams(nu=nu),
                     bc=bc, solver=solver, output=output)


def _gamma_of(profile: RotationProfile, domain: DomainSpec) -> float:
    if profile.kind == "uniform":
        return profile.gamma
    vmax = max(v for _, v in profile.breakpoints)
    return 2.0 * math.pi * domain.sigma * vmax


def profile_to_string(profile: RotationProfile) -> str:
    """Compact single-token profile form for field-file headers."""
    if profile.kind == "uniform":
        return f"uniform:g={profile.gamma:.17g}"
    pts = ",".join(f"{z:.17g}:{v:.17g}" for z, v in profile.breakpoints)
    return f"piecewise:{pts}"


def profile_from_string(s: str) -> RotationProfile:
    try:
        kind, rest = s.split(":", 1)
        if kind == "uniform":
            key, val = rest.split("=")
            if key != "g":
                raise ValueError(rest)
            return RotationProfile.uniform(float(val))
        if kind == "piecewise":
            pts = []
            for tok in rest.split(","):
                z_s, v_s = tok.split(":")
                pts.append((float(z_s), float(v_s)))
            return RotationProfile.piecewise(*pts)
        raise ValueError(kind)
    except (ValueError, ProfileError) as exc:
        raise ConfigError(f"bad profile string {s!r}") from exc


def resolved_text(cfg: RunConfig) -> str:
    """Render the fully resolved configuration (every value explicit) so a
    run can be reproduced from its output directory alone."""
    bc = cfg.bc
    lines = [
        "[domain]",
        f"sigma = {cfg.domain.sigma:.17g}",
        f"R = {cfg.domain.R:.17g}",
        f"L = {cfg.domain.L:.17g}",
        "",
        "[grid]",
        f"nr = {cfg.nr}",
        f"nz = {cfg.nz}",
        "",
        "[physics]",
        f"nu = {cfg.physics.nu:.17g}",
        "",
        "[bc]",
        f"profile = {bc.profile.kind}",
    ]
    if bc.profile.kind == "uniform":
        lines.append(f"gamma = {bc.profile.gamma:.17g}")
    else:
        pts = ", ".join(f"{z:.17g}:{v:.17g}" for z, v in bc.profile.breakpoints)
        lines.append(f"points = {pts}")
    lines.append(f"bottom = {bc.bottom}")
    if bc.bottom == "hopf":
        lines.append(f"hopf_eps = {bc.hopf.eps:.17g}")
    lines.append(f"outer = {bc.outer_swirl:.17g}")
    m, n = cfg.solver.march, cfg.solver.newton
    lines += [
        "",
        "[solver]",
        f"strategy = {cfg.solver.strategy}",
        f"scheme = {cfg.solver.scheme}",
    ]
    if m.dt is not None:
        lines.append(f"march_dt = {m.dt:.17g}")
    lines += [
        f"march_t_end = {m.t_end:.17g}",
        f"march_stall = {m.stall_tol:.17g}",
        f"march_cfl = {m.cfl_limit:.17g}",
        f"newton_tol = {n.tol_abs:.17g}",
        f"newton_max_iters = {n.max_iters}",
        f"newton_damping = {n.damping:.17g}",
        f"continuation_start = {cfg.solver.continuation_start:.17g}",
        f"continuation_step = {cfg.solver.continuation_step:.17g}",
        "",
        "[output]",
        f"precision = {cfg.output.precision}",
        f"fields_file = {cfg.output.fields_file}",
        "",
    ]
    return "\n".join(lines)
