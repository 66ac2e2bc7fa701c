"""Flat key=value scenario configuration: parsing with full error
collection, validation, canonical serialization and hashing.

The format is line-oriented ``key = value`` with ``#`` comments.  All
quantities are in normalized units.  The box length is always an integer
number of perturbation wavelengths, L = 2 pi periods / k, so the seeded
mode is commensurate by construction.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields as dataclass_fields

MODELS = ("vlasov", "wigner", "hartree", "fluid")
EQUILIBRIA = ("waterbag1d", "fd3d_projected_T0", "fd3d_projected")


class ConfigError(ValueError):
    """Carries every validation problem found, not just the first."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class ScenarioConfig:
    model: str
    equilibrium: str = "fd3d_projected"
    t_over_tf: float = 0.01
    alpha: float = 0.1
    k: float = 1.0
    h: float = 0.0
    periods: int = 1
    n_x: int = 256
    n_v: int = 256
    v_max: float = 3.0
    dt: float = 0.05
    t_end: float = 50.0
    output_every: int = 1
    snapshot_times: tuple = ()
    save_final: bool = False
    out_dir: str = "."
    gamma: float = 3.0
    p0: float = 1.0 / 3.0
    n_streams: int = 4

    @property
    def length(self) -> float:
        return 2.0 * 3.141592653589793 * self.periods / self.k

    def to_text(self) -> str:
        """Canonical serialization; parse_config(to_text()) round-trips."""
        lines = []
        for f in dataclass_fields(self):
            v = getattr(self, f.name)
            if f.name == "snapshot_times":
                v = ",".join(repr(float(t)) for t in v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:12]


_BOOL = {"true": True, "false": False, "1": True, "0": False,
         "yes": True, "no": False}


def _parse_bool(s: str) -> bool:
    try:
        return _BOOL[s.strip().lower()]
    except KeyError:
        raise ValueError(f"not a boolean: {s!r}")


def _parse_times(s: str) -> tuple:
    s = s.strip()
    if not s:
        return ()
    return tuple(float(tok) for tok in s.split(","))


_PARSERS = {
    "model": str, "equilibrium": str, "out_dir": str,
    "t_over_tf": float, "alpha": float, "k": float, "h": float,
    "v_max": float, "dt": float, "t_end": float, "gamma": float, "p0": float,
    "periods": int, "n_x": int, "n_v": int, "output_every": int,
    "n_streams": int,
    "snapshot_times": _parse_times, "save_final": _parse_bool,
}


def validate(cfg: ScenarioConfig):
    """All range/consistency violations as a list of messages."""
    problems = []

    def check(ok, msg):
        if not ok:
            problems.append(msg)

    check(cfg.model in MODELS, f"model must be one of {MODELS}, got {cfg.model!r}")
    if cfg.model in ("vlasov", "wigner"):
        check(cfg.equilibrium in EQUILIBRIA,
              f"equilibrium must be one of {EQUILIBRIA}, got {cfg.equilibrium!r}")
    check(0.0 <= cfg.alpha <= 1.0, f"alpha must be in [0, 1], got {cfg.alpha}")
    check(cfg.k > 0, f"k must be positive, got {cfg.k}")
    check(cfg.h >= 0, f"h must be nonnegative, got {cfg.h}")
    if cfg.model in ("wigner", "hartree", "fluid"):
        check(cfg.h > 0, f"model {cfg.model!r} requires h > 0")
    check(cfg.t_over_tf >= 0, f"t_over_tf must be nonnegative, got {cfg.t_over_tf}")
    check(cfg.periods >= 1, f"periods must be at least 1, got {cfg.periods}")
    check(cfg.n_x >= 8, f"n_x must be at least 8, got {cfg.n_x}")
    check(cfg.n_v >= 8 and cfg.n_v % 2 == 0,
          f"n_v must be even and at least 8, got {cfg.n_v}")
    check(cfg.v_max > 0, f"v_max must be positive, got {cfg.v_max}")
    check(cfg.dt > 0, f"dt must be positive, got {cfg.dt}")
    check(cfg.t_end > 0, f"t_end must be positive, got {cfg.t_end}")
    check(cfg.output_every >= 1,
          f"output_every must be at least 1, got {cfg.output_every}")
    check(all(t >= 0 for t in cfg.snapshot_times),
          "snapshot_times must be nonnegative")
    if cfg.model == "fluid":
        check(cfg.gamma >= 1.0, f"gamma must be at least 1, got {cfg.gamma}")
        check(cfg.p0 > 0, f"p0 must be positive, got {cfg.p0}")
    if cfg.model == "hartree":
        check(cfg.n_streams >= 1,
              f"n_streams must be at least 1, got {cfg.n_streams}")
    return problems


def parse_config(text: str, overrides=None) -> ScenarioConfig:
    """Parse and validate; raises ConfigError listing every problem with
    its line number.  `overrides` is an iterable of extra "key=value"
    strings applied after the file (line number reported as override)."""
    problems = []
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected key = value, got {raw!r}")
            continue
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _PARSERS:
            problems.append(f"line {lineno}: unknown key {key!r}")
            continue
        try:
            values[key] = _PARSERS[key](val)
        except ValueError:
            problems.append(
                f"line {lineno}: bad value for {key!r}: {val!r}")
    for item in overrides or ():
        if "=" not in item:
            problems.append(f"override {item!r}: expected key=value")
            continue
        key, _, val = item.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _PARSERS:
            problems.append(f"override: unknown key {key!r}")
            continue
        try:
            values[key] = _PARSERS[key](val)
        except ValueError:
            problems.append(f"override: bad value for {key!r}: {val!r}")
    if "model" not in values and not problems:
        problems.append("missing required key 'model'")
    if problems:
        raise ConfigError(problems)
    cfg = ScenarioConfig(**values)
    range_problems = validate(cfg)
    if range_problems:
        # attach line numbers where we can
        lines = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if "=" in line:
                lines[line.partition("=")[0].strip()] = lineno
        annotated = []
        for p in range_problems:
            key = p.split(" ", 1)[0]
            if key in lines:
                annotated.append(f"line {lines[key]}: {p}")
            else:
                annotated.append(p)
        raise ConfigError(annotated)
    return cfg
