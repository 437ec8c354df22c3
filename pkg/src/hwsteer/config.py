"""Tolerance and run configuration records.

Every numerical tolerance used by the package lives in one explicit record
so that check thresholds are visible in one place and can be overridden
together.  Functions take a ``Tolerances`` instance (defaulting to
``DEFAULT_TOLS``) rather than scattering magic numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path

#: Environment variable consulted for the default scan thread count.
THREADS_ENV = "HWSTEER_THREADS"


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds for the verification suites.

    All values are absolute tolerances on the quantity named; norms on
    matrices are operator 2-norms unless stated otherwise.
    """

    unitary: float = 1e-9          # ||B B^dag - 1||
    psd: float = 1e-9              # most negative eigenvalue allowed
    hermitian: float = 1e-10       # ||S - S^dag|| max entry
    zero_sum: float = 1e-12        # phase column sums (mod 2*pi)
    orthogonality: float = 1e-12   # gamma row/column Gram deviation
    realness: float = 1e-10        # imaginary part of real-by-construction sums
    power_identity: float = 1e-10  # B^(n) vs matrix power, inversion identity
    stabilizer: float = 1e-12      # stabilizer fixed-point residual
    relations: float = 1e-10       # (A (x) B~) rho = rho residual
    projectivity: float = 1e-10    # unitarity of B~ and B_{n|y}
    recovery: float = 1e-8         # measurement recovery deviation
    eigengap: float = 1e-8         # degeneracy threshold for top eigenspace
    state_rank: float = 1e-10      # eigenvalue cutoff for state support
    solver_residual: float = 1e-9  # orthogonality system residual at solution
    quantum_bound: float = 1e-9    # lambda_max vs d(d-1), SOS gap negativity
    tie: float = 1e-9              # argmax tie window in the classical search
    behavior_norm: float = 1e-10   # sum_{a,b} p(ab|xy) - 1
    behavior_nonneg: float = 1e-12 # allowed negativity of probabilities


DEFAULT_TOLS = Tolerances()

_TOL_FIELDS = {f.name for f in fields(Tolerances)}


class ConfigError(ValueError):
    """Raised for malformed configuration files or values."""


@dataclass
class Config:
    """Run configuration for the command line, file-loadable.

    A config file is plain text, one ``key = value`` per line, ``#``
    comments allowed.  Keys match the field names below; tolerance
    overrides use the ``tol_`` prefix (e.g. ``tol_unitary = 1e-8``).
    Unknown keys are rejected.  Command-line flags take precedence over
    file values.
    """

    d: int = 3
    family: str | None = None
    phi00: float | None = None
    phi10: float | None = None
    threads: int | None = None
    rng_seed: int = 0
    resolution: tuple[int, int] = (201, 201)
    phi00_start: float = 0.0
    phi00_stop: float = 6.283185307179586
    phi10_start: float = 0.0
    phi10_stop: float = 6.283185307179586
    out: str | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)


_INT_KEYS = {"d", "threads", "rng_seed"}
_FLOAT_KEYS = {"phi00", "phi10", "phi00_start", "phi00_stop", "phi10_start", "phi10_stop"}
_STR_KEYS = {"family", "out"}


def parse_resolution(text: str) -> tuple[int, int]:
    """Parse an ``NxM`` (or single ``N``) grid resolution string."""
    parts = text.lower().split("x")
    try:
        if len(parts) == 1:
            n = int(parts[0])
            res = (n, n)
        elif len(parts) == 2:
            res = (int(parts[0]), int(parts[1]))
        else:
            raise ValueError
    except ValueError:
        raise ConfigError(f"bad resolution {text!r}, expected N or NxM") from None
    if res[0] < 2 or res[1] < 2:
        raise ConfigError(f"resolution must be >= 2 per axis, got {text!r}")
    return res


def load_config(path: str | Path) -> Config:
    """Load a Config from a ``key = value`` text file; unknown keys reject."""
    cfg = Config()
    tol_overrides: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in _INT_KEYS:
            setattr(cfg, key, int(value))
        elif key in _FLOAT_KEYS:
            setattr(cfg, key, float(value))
        elif key in _STR_KEYS:
            setattr(cfg, key, value)
        elif key == "resolution":
            cfg.resolution = parse_resolution(value)
        elif key.startswith("tol_") and key[4:] in _TOL_FIELDS:
            tol_overrides[key[4:]] = float(value)
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    if tol_overrides:
        cfg.tolerances = replace(cfg.tolerances, **tol_overrides)
    return cfg
