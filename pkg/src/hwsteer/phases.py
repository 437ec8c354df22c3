"""Phase tables, the gamma coefficient tensor, and the orthogonality system.

Bob's reference measurements are parameterized by real phases phi[j][y]
(j, y = 0..d-1) with zero column sums, sum_j phi_{j,y} = 0 (mod 2*pi).
The coupling coefficients

    gamma_{yk}^{(n)} = (1/d) w^{k n(n-1)/2} sum_l e^{-i sum_{m=1}^n phi_{l+m,y}} w^{knl}

tie powers of XZ^k to Bob's observables.  A phase table is *admissible*
when the rows of each gamma^{(n)} matrix are orthonormal,

    sum_k (gamma_{y'k}^{(n)})^* gamma_{yk}^{(n)} = delta_{yy'}   (all n),

equivalently (the matrices being square) the columns are orthonormal too.
For d = 3 the general solution splits into two analytic families, A and B,
parameterized by (phi_{0,0}, phi_{1,0}); for other d a multi-start
least-squares solver looks for solutions numerically.

Angles are stored wrapped to (-pi, pi]; every formula downstream depends
on them only mod 2*pi, so the zero-sum constraint is enforced mod 2*pi.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .algebra import root_powers
from .config import DEFAULT_TOLS, Tolerances

TWO_PI = 2.0 * np.pi


def wrap_angle(x):
    """Wrap angles to the canonical interval (-pi, pi]."""
    w = np.mod(np.asarray(x, dtype=float) + np.pi, TWO_PI) - np.pi
    return np.where(w <= -np.pi, w + TWO_PI, w)


@dataclass(frozen=True)
class PhaseSet:
    """Zero-column-sum phase table, phi[j][y] = phi_{j,y} in (-pi, pi]."""

    d: int
    phi: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        if phi.shape != (self.d, self.d):
            raise ValueError(f"phi must be {self.d}x{self.d}, got {phi.shape}")
        phi = wrap_angle(phi)
        sums = wrap_angle(phi.sum(axis=0))
        worst = np.abs(sums).max()
        if worst > DEFAULT_TOLS.zero_sum * self.d:
            raise ValueError(
                f"column sums must vanish mod 2*pi, worst deviation {worst:.3e}")
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_free(cls, d: int, free) -> "PhaseSet":
        """Build from the (d-1) x d free angles; the last row is derived.

        free[j][y] for j < d-1; row d-1 is fixed by the zero-sum constraint
        phi_{d-1,y} = -sum_{j<d-1} phi_{j,y}.
        """
        free = np.asarray(free, dtype=float)
        if free.shape != (d - 1, d):
            raise ValueError(f"free angles must be {(d - 1, d)}, got {free.shape}")
        phi = np.vstack([free, -free.sum(axis=0)])
        return cls(d, phi)

    def to_text(self) -> str:
        """Serialize: dimension line, then d rows of d angles (17 sig digits)."""
        lines = [str(self.d)]
        for j in range(self.d):
            lines.append(" ".join(f"{v:.17g}" for v in self.phi[j]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PhaseSet":
        rows = [line for line in text.splitlines() if line.strip()]
        if not rows:
            raise ValueError("empty phase table")
        d = int(rows[0])
        if len(rows) != d + 1:
            raise ValueError(f"expected {d} angle rows, found {len(rows) - 1}")
        phi = np.array([[float(tok) for tok in row.split()] for row in rows[1:]])
        return cls(d, phi)


class SolutionFamily(enum.Enum):
    """The two analytic qutrit solution families of the orthogonality system."""

    A = "A"
    B = "B"

    @classmethod
    def coerce(cls, value) -> "SolutionFamily":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown solution family {value!r}, expected A or B") from None


@dataclass(frozen=True)
class GammaTensor:
    """gamma coefficients; values[n-1, y, k] = gamma_{yk}^{(n)}."""

    d: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.d - 1, self.d, self.d):
            raise ValueError(
                f"gamma tensor must be {(self.d - 1, self.d, self.d)}, got {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def matrix(self, n: int) -> np.ndarray:
        """The d x d matrix gamma^{(n)} with rows y and columns k."""
        if not 1 <= n <= self.d - 1:
            raise ValueError(f"n must lie in 1..{self.d - 1}, got {n}")
        return self.values[n - 1]


def _window_sums(phi: np.ndarray, n: int) -> np.ndarray:
    """ps[l, y] = sum_{m=1..n} phi[(l+m) % d, y]."""
    d = phi.shape[0]
    idx = (np.arange(d)[:, None] + np.arange(1, n + 1)[None, :]) % d
    return phi[idx, :].sum(axis=1)


def gamma(phases: PhaseSet) -> GammaTensor:
    """Coefficient tensor gamma_{yk}^{(n)} for n = 1..d-1."""
    d = phases.d
    roots = root_powers(d)
    l = np.arange(d)
    k = np.arange(d)
    out = np.empty((d - 1, d, d), dtype=complex)
    for n in range(1, d):
        ps = _window_sums(phases.phi, n)              # (l, y)
        e = np.exp(-1j * ps).T                        # (y, l)
        w = roots[(n * np.outer(k, l)) % d]           # (k, l)
        pref = roots[(k * n * (n - 1) // 2) % d]      # (k,)
        out[n - 1] = (e @ w.T) * pref[None, :] / d
    return GammaTensor(d, out)


@dataclass(frozen=True)
class OrthogonalityReport:
    row_ok: bool
    col_ok: bool
    max_violation: float

    @property
    def ok(self) -> bool:
        return self.row_ok and self.col_ok


def check_orthogonality(g: GammaTensor,
                        tol: float = DEFAULT_TOLS.orthogonality) -> OrthogonalityReport:
    """Check row (and dual column) orthonormality of every gamma^{(n)}.

    Row condition: sum_k (gamma_{y'k})^* gamma_{yk} = delta_{yy'}; the dual
    column condition follows for square matrices but is measured separately.
    """
    eye = np.eye(g.d)
    row_dev = 0.0
    col_dev = 0.0
    for n in range(1, g.d):
        m = g.matrix(n)
        row_dev = max(row_dev, np.abs(m @ m.conj().T - eye).max())
        col_dev = max(col_dev, np.abs(m.conj().T @ m - eye).max())
    return OrthogonalityReport(
        row_ok=row_dev <= tol,
        col_ok=col_dev <= tol,
        max_violation=float(max(row_dev, col_dev)),
    )


def qutrit_family(phi00: float, phi10: float, family) -> PhaseSet:
    """Analytic d=3 solution families of the orthogonality system.

    Family A:  phi_{0,1} = phi00 - 2pi/3, phi_{1,1} = phi10,
               phi_{0,2} = phi00 - 2pi/3, phi_{1,2} = phi10 + 2pi/3.
    Family B swaps the y = 1 and y = 2 assignments of the phi_{1,y} shifts.
    The third row of each column is fixed by the zero-sum constraint.
    """
    family = SolutionFamily.coerce(family)
    shift = TWO_PI / 3
    if family is SolutionFamily.A:
        free = [
            [phi00, phi00 - shift, phi00 - shift],
            [phi10, phi10, phi10 + shift],
        ]
    else:
        free = [
            [phi00, phi00 - shift, phi00 - shift],
            [phi10, phi10 + shift, phi10],
        ]
    return PhaseSet.from_free(3, free)


# ---- numeric solver for the orthogonality system ------------------------

def orthogonality_residual(phases: PhaseSet) -> float:
    """Max modulus of (1/d) sum_l e^{i sum_m (phi_{l+m,y'} - phi_{l+m,y})} over y != y', n.

    Zero for admissible tables; the quantity the numeric solver drives down.
    """
    d = phases.d
    worst = 0.0
    for n in range(1, d):
        ps = _window_sums(phases.phi, n)  # (l, y)
        for y1 in range(d):
            for y2 in range(y1 + 1, d):
                c = np.exp(1j * (ps[:, y2] - ps[:, y1])).sum() / d
                worst = max(worst, abs(c))
    return float(worst)


@dataclass(frozen=True)
class SolveOutcome:
    """Result of the numeric phase search; phases is None when unconverged."""

    phases: PhaseSet | None
    residual: float
    restarts_used: int

    @property
    def converged(self) -> bool:
        return self.phases is not None


def _solver_tables(d: int, seed, frozen):
    seed = np.asarray(seed, dtype=float)
    if seed.shape != (d - 1,):
        raise ValueError(f"seed_row must supply {d - 1} angles, got shape {seed.shape}")
    frozen = dict(frozen or {})
    for (j, y) in frozen:
        if not (0 <= j < d - 1 and 1 <= y < d):
            raise ValueError(f"frozen key {(j, y)} out of range (j < d-1, 1 <= y < d)")
    free_slots = [(j, y) for y in range(1, d) for j in range(d - 1)
                  if (j, y) not in frozen]
    windows = []
    for n in range(1, d):
        wnd = np.zeros((d, d))
        for l in range(d):
            wnd[l, (l + np.arange(1, n + 1)) % d] = 1.0
        windows.append(wnd)  # windows[n-1][l, r]
    return seed, frozen, free_slots, windows


def _assemble_phi(x, d, seed, frozen, free_slots):
    phi = np.zeros((d, d))
    phi[: d - 1, 0] = seed
    for (j, y), v in frozen.items():
        phi[j, y] = v
    for t, (j, y) in enumerate(free_slots):
        phi[j, y] = x[t]
    phi[d - 1, :] = -phi[: d - 1, :].sum(axis=0)
    return phi


def _pair_terms(phi, d, windows):
    """Per (y1<y2, n): the unit phasors e^{i D_l} and their mean."""
    out = []
    for n in range(1, d):
        ps = _window_sums(phi, n)
        for y1 in range(d):
            for y2 in range(y1 + 1, d):
                phasors = np.exp(1j * (ps[:, y2] - ps[:, y1]))
                out.append((n, y1, y2, phasors, phasors.sum() / d))
    return out


def _residual_vec(x, d, seed, frozen, free_slots, windows):
    phi = _assemble_phi(x, d, seed, frozen, free_slots)
    res = []
    for (_n, _y1, _y2, _phasors, c) in _pair_terms(phi, d, windows):
        res.extend((c.real, c.imag))
    return np.asarray(res)


def _residual_jac(x, d, seed, frozen, free_slots, windows):
    phi = _assemble_phi(x, d, seed, frozen, free_slots)
    terms = _pair_terms(phi, d, windows)
    jac = np.zeros((2 * len(terms), len(free_slots)))
    for row, (n, y1, y2, phasors, _c) in enumerate(terms):
        wnd = windows[n - 1]
        # d D_l / d phi_{r,y} = +window for y2, -window for y1; the derived
        # last row contributes -window(d-1) through the chain rule.
        eff = wnd[:, :-1] - wnd[:, -1:]
        grad_l = 1j * phasors / d  # (l,)
        for t, (j, y) in enumerate(free_slots):
            if y == y2:
                sign = 1.0
            elif y == y1:
                sign = -1.0
            else:
                continue
            dc = sign * (grad_l * eff[:, j]).sum()
            jac[2 * row, t] = dc.real
            jac[2 * row + 1, t] = dc.imag
    return jac


def solve_phases_numeric(d: int, seed_row, rng_seed: int = 0, *,
                         restarts: int = 80, frozen=None,
                         tols: Tolerances = DEFAULT_TOLS) -> SolveOutcome:
    """Multi-start least-squares search for an admissible phase table.

    The y=0 column is pinned to ``seed_row`` (its last entry derived);
    optional ``frozen`` entries {(j, y): angle} pin further angles, which
    makes deliberately infeasible systems expressible.  Deterministic for
    a given rng_seed.  Convergence means every orthogonality component of
    the system sits below ``tols.solver_residual``; otherwise the outcome
    carries the best residual found and no phase table.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    seed, frozen, free_slots, windows = _solver_tables(d, seed_row, frozen)
    rng = np.random.default_rng(rng_seed)
    args = (d, seed, frozen, free_slots, windows)
    best_x, best_res = None, np.inf
    used = 0
    for attempt in range(max(1, restarts)):
        used = attempt + 1
        x0 = rng.uniform(-np.pi, np.pi, len(free_slots))
        if free_slots:
            sol = least_squares(_residual_vec, x0, jac=_residual_jac, args=args,
                                method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
            x, res = sol.x, np.abs(sol.fun).max()
        else:
            x = x0[:0]
            res = np.abs(_residual_vec(x, *args)).max()
        if res < best_res:
            best_x, best_res = x, res
        if best_res < 1e-11:
            break
    if best_res <= tols.solver_residual:
        phi = _assemble_phi(best_x, d, seed, frozen, free_slots)
        return SolveOutcome(PhaseSet(d, phi), float(best_res), used)
    return SolveOutcome(None, float(best_res), used)
