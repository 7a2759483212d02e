"""Plain-text run configuration: ``key = value`` lines, ``#`` starts a comment.

Recognised keys::

    L, N, S_window          s/spinor grid half width and size, representation window
    kappa                   deformation parameter for single-kappa checks
    kappa_list              comma list for the commutative-limit sweep
    n_low                   number of oscillator levels checked
    epsilon_list            regulators for the witness scan
    beta_bounds             two reals
    sign                    +1 or -1, the representation used for states
    exhaustive              true/false, let any witness decide a verdict
    state                   base Gaussian "center,width,momentum"
    output_dir, seed
    tol.<name>              override one tolerance (see DEFAULT_TOLERANCES)
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

MAX_S_WINDOW = 6.0

DEFAULT_TOLERANCES = {
    "krein": 1e-8,
    "dt": 1e-6,
    "spectrum": 1e-3,
    "slope": 0.05,
    "algebra": 1e-5,
    "kappa_slope": 0.10,
    "inner": 1e-4,
    "twisted": 1e-5,
    "margin": 1e-6,
    "fit": 1e-6,
    "witness": 1e-6,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GridConfig:
    L: float = 10.0
    N: int = 512
    S_window: float = 6.0


@dataclass(frozen=True)
class RunConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    kappa: float = 1.0
    kappa_list: tuple[float, ...] = (1e2, 1e3, 1e4)
    n_low: int = 20
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    epsilon_list: tuple[float, ...] = (1.0, 0.1, 0.01, 0.001)
    beta_bounds: tuple[float, float] = (-1.0, 1.0)
    sign: int = 1
    exhaustive: bool = False
    state: tuple[float, float, float] = (0.0, 1.0, 0.0)
    output_dir: str | None = None
    seed: int = 0

    def __post_init__(self):
        g = self.grid
        if g.N < 8 or g.N & (g.N - 1):
            raise ConfigError(f"N must be a power of two >= 8, got {g.N}")
        if not g.L > 0:
            raise ConfigError("L must be positive")
        if not 0 < g.S_window <= MAX_S_WINDOW:
            raise ConfigError(f"S_window must lie in (0, {MAX_S_WINDOW:g}]")
        if not self.kappa > 0 or any(not k > 0 for k in self.kappa_list):
            raise ConfigError("kappa values must be positive")
        if not self.kappa_list:
            raise ConfigError("kappa_list is empty")
        bad = sorted(k for k, v in self.tolerances.items() if not v > 0)
        if bad:
            raise ConfigError(f"tolerances must be positive: {', '.join(bad)}")
        if not self.epsilon_list or any(not e > 0 for e in self.epsilon_list):
            raise ConfigError("epsilon_list needs positive entries")
        if self.beta_bounds[0] > self.beta_bounds[1]:
            raise ConfigError("beta_bounds must be ordered")
        if self.sign not in (1, -1):
            raise ConfigError("sign must be +1 or -1")
        if not 1 <= self.n_low <= g.N // 4:
            raise ConfigError(f"n_low must lie in [1, N/4] = [1, {g.N // 4}]")
        if not self.state[1] > 0:
            raise ConfigError("state width must be positive")

    def tol(self, name: str) -> float:
        return self.tolerances[name]

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        """sha256 of the canonical JSON form; ``output_dir`` does not enter."""
        d = self.to_dict()
        d.pop("output_dir")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config(text: str) -> RunConfig:
    grid, top, tols = {}, {}, dict(DEFAULT_TOLERANCES)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not eq or not key:
            raise ConfigError(f"line {lineno}: expected key = value")
        try:
            if key in ("L", "S_window"):
                grid[key] = float(value)
            elif key == "N":
                grid[key] = int(value)
            elif key.startswith("tol."):
                name = key[4:]
                if name not in DEFAULT_TOLERANCES:
                    raise ConfigError(f"line {lineno}: unknown tolerance {name!r}")
                tols[name] = float(value)
            elif key in ("kappa",):
                top[key] = float(value)
            elif key in ("n_low", "seed", "sign"):
                top[key] = int(value)
            elif key in ("kappa_list", "epsilon_list"):
                top[key] = _floats(value)
            elif key == "beta_bounds":
                b = _floats(value)
                if len(b) != 2:
                    raise ConfigError(f"line {lineno}: beta_bounds takes two values")
                top[key] = b
            elif key == "state":
                st = _floats(value)
                if len(st) != 3:
                    raise ConfigError(f"line {lineno}: state takes center,width,momentum")
                top[key] = st
            elif key == "exhaustive":
                top[key] = _bool(value)
            elif key == "output_dir":
                top[key] = value
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from exc
    return RunConfig(grid=GridConfig(**grid), tolerances=tols, **top)


def load_config(path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(text)
