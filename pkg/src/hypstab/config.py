"""Flat ``key = value`` experiment configuration files."""
from __future__ import annotations

from dataclasses import replace

from .harness import ExperimentConfig
from .models import DEFAULT_STEADY, INITIAL_VARIANTS, MODELS, SteadyState


class ConfigError(ValueError):
    pass


def _float(v: str) -> float:
    return float(v)


def _floats(v: str) -> tuple:
    return tuple(float(p) for p in v.replace(";", ",").split(",") if p.strip())


def _ints(v: str) -> tuple:
    out = []
    for p in v.replace(";", ",").split(","):
        if not p.strip():
            continue
        f = float(p)
        if f != int(f):
            raise ValueError(f"{p!r} is not an integer")
        out.append(int(f))
    return tuple(out)


def _bool(v: str) -> bool:
    lv = v.strip().lower()
    if lv in ("1", "true", "yes", "on"):
        return True
    if lv in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{v!r} is not a boolean")


def _choice(options):
    def parse(v: str) -> str:
        if v not in options:
            raise ValueError(f"{v!r} is not one of {', '.join(options)}")
        return v
    return parse


# config key -> (ExperimentConfig field, parser)
_KEYS = {
    "model": ("model", _choice(MODELS)),
    "J": ("J", _ints),
    "cfl": ("cfl", _float),
    "mu": ("mu", _floats),
    "T": ("T", _float),
    "tol": ("tol", _float),
    "initial": ("initial", _choice(INITIAL_VARIANTS)),
    "scheme": ("scheme", _choice(("viscous", "plain"))),
    "out": ("out", str),
    "functional": ("functional", _choice(("ghost", "interior"))),
    "quadrature": ("quadrature", _choice(("dx", "dt", "none"))),
    "center_initial_data": ("center_initial_data", _bool),
}
# steady-state keys, merged into a SteadyState after parsing
_STEADY_KEYS = {"q_star": "flux_star", "rho_star": "primary_star", "h_star": "primary_star",
                "sound_speed": "constant", "gravity": "constant", "c": "constant"}

KNOWN_KEYS = tuple(_KEYS) + tuple(_STEADY_KEYS)


def _check(cfg: ExperimentConfig, where: dict) -> None:
    if not 0.0 < cfg.cfl <= 1.0:
        raise ConfigError(f"{where.get('cfl', '')}cfl = {cfg.cfl} violates the CFL condition "
                          "max(a+, |a-|) dt/dx <= 1 (need 0 < cfl <= 1)")
    if any(j < 2 for j in cfg.J):
        raise ConfigError(f"{where.get('J', '')}every J must be >= 2, got {cfg.J}")
    if any(m <= 0.0 for m in cfg.mu):
        raise ConfigError(f"{where.get('mu', '')}every mu must be positive, got {cfg.mu}")
    if cfg.T < 0.0:
        raise ConfigError(f"{where.get('T', '')}T must be non-negative, got {cfg.T}")
    if cfg.tol < 0.0:
        raise ConfigError(f"{where.get('tol', '')}tol must be non-negative, got {cfg.tol}")


def apply_settings(base: ExperimentConfig, settings: dict, where: dict | None = None) -> ExperimentConfig:
    """Apply already-split ``{key: raw string}`` settings on top of ``base``."""
    where = where or {}
    updates = {}
    steady = {}
    for key, raw in settings.items():
        loc = where.get(key, "")
        if key in _STEADY_KEYS:
            try:
                steady[_STEADY_KEYS[key]] = float(raw)
            except ValueError:
                raise ConfigError(f"{loc}cannot parse {key} = {raw!r} as a number") from None
            continue
        if key not in _KEYS:
            raise ConfigError(f"{loc}unknown key {key!r}; known keys: {', '.join(KNOWN_KEYS)}")
        name, parse = _KEYS[key]
        try:
            updates[name] = parse(raw)
        except ValueError as exc:
            raise ConfigError(f"{loc}bad value for {key}: {exc}") from None
    try:
        cfg = replace(base, **updates)
        if steady:
            ref = cfg.steady or DEFAULT_STEADY[cfg.model]
            cfg = replace(cfg, steady=replace(ref, **steady))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _check(cfg, where)
    return cfg


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    settings, where = {}, {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (s.strip() for s in body.split("=", 1))
        settings[key] = value
        where[key] = f"line {lineno} ({line.strip()}): "
    return apply_settings(base or ExperimentConfig(), settings, where)


def format_config(cfg: ExperimentConfig) -> str:
    """Inverse of :func:`parse_config` for every field it understands."""
    lines = []
    for key, (name, _) in _KEYS.items():
        value = getattr(cfg, name)
        if isinstance(value, tuple):
            value = ", ".join(repr(v) for v in value)
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    if cfg.steady is not None:
        s: SteadyState = cfg.steady
        primary = "h_star" if cfg.model == "saint-venant" else "rho_star"
        constant = {"wave": "c", "euler": "sound_speed", "saint-venant": "gravity"}[cfg.model]
        lines += [f"{primary} = {s.primary_star!r}", f"q_star = {s.flux_star!r}",
                  f"{constant} = {s.constant!r}"]
    return "\n".join(lines) + "\n"

