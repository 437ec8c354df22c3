"""Classical (LHS) bound of the steering functional.

A local-hidden-state strategy that saturates the classical maximum can be
taken deterministic: Alice announces outcome a_k for setting k and Bob b_y
for setting y, so the functional collapses to

    beta(a, b) = sum_{n=1}^{d-1} sum_{k,y} gamma_{yk}^{(n)} w^{a_k n} w^{b_y n}.

For odd d the n and d-n terms are complex conjugates (the gamma tensors
satisfy gamma^(d-n) = conj(gamma^(n))), so the sum is real.  At even d the
self-paired n = d/2 term breaks that argument and the sum can carry an
imaginary part; the value of the strategy against the Hermitian functional
is then the real part, which is what all routines here optimize.  The
classical bound is the maximum over all d^(2d) assignments.

Two searches are provided: a direct enumeration over every (a, b) pair and
a faster factorized search exploiting that, once b is fixed, each a_k can
be optimized independently.  Both resolve ties toward the lexicographically
smallest (b, a) (within ``tie_eps``), report the same assignment, and
return the value that assignment actually attains.

``scan`` maps the qutrit classical-bound landscape over a grid of the two
free family parameters.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .phases import GammaTensor, SolutionFamily, gamma, qutrit_family
from .steering import Behavior

BRUTE_FORCE_DMAX = 5


@dataclass(frozen=True)
class Assignment:
    """Deterministic strategy: outcome a[x] for Alice, b[y] for Bob."""

    a: tuple
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))
        object.__setattr__(self, "b", tuple(int(v) for v in self.b))


def _check_assignment(assignment: Assignment, d: int):
    if len(assignment.a) != d or len(assignment.b) != d:
        raise ValueError(f"assignment must fix {d} outcomes per side")
    for v in (*assignment.a, *assignment.b):
        if not 0 <= v < d:
            raise ValueError(f"outcome {v} outside 0..{d - 1}")


@functools.lru_cache(maxsize=8)
def _strategy_tables(d: int):
    """Root table R[alpha, n] = w^{alpha n} (n = 1..d-1) and all outcome tuples."""
    r = np.exp(2j * np.pi * np.outer(np.arange(d), np.arange(1, d)) / d)
    tuples = np.array(list(itertools.product(range(d), repeat=d)), dtype=np.intp)
    return r, tuples


def deterministic_value(assignment: Assignment, gammas: GammaTensor,
                        tols: Tolerances = DEFAULT_TOLS) -> float:
    """Functional value of one deterministic strategy.

    For odd d the strategy sum is real by the n <-> d-n conjugate pairing
    and a residual imaginary part is treated as an error.  For even d the
    pairing argument is unavailable and the real part (the value against
    the Hermitian functional) is returned without complaint.
    """
    d = gammas.d
    _check_assignment(assignment, d)
    r, _ = _strategy_tables(d)
    wa = r[list(assignment.a)]        # (k, n)
    wb = r[list(assignment.b)]        # (y, n)
    val = complex(np.einsum("nyk,kn,yn->", gammas.values, wa, wb))
    if d % 2 == 1 and abs(val.imag) > tols.realness * d * d:
        raise ValueError(f"deterministic value has imaginary part {val.imag:.3e}")
    return float(val.real)


def deterministic_behavior(assignment: Assignment, d: int) -> Behavior:
    """The behavior of a deterministic strategy: p(ab|xy) = [a = a_x][b = b_y]."""
    _check_assignment(assignment, d)
    p = np.zeros((d, d, d, d))
    for x in range(d):
        for y in range(d):
            p[assignment.a[x], assignment.b[y], x, y] = 1.0
    return Behavior(d, p)


def _bob_score_tables(gammas: GammaTensor):
    """C[i, k, alpha] = best-response table of a_k against the i-th b tuple.

    With b fixed, beta(a, b) = sum_k C[i, k, a_k] where
    C[i, k, alpha] = sum_n Re( (sum_y gamma_{yk}^{(n)} w^{b_y n}) w^{alpha n} ).
    """
    d = gammas.d
    r, tuples = _strategy_tables(d)
    rb = r[tuples]                                   # (i, y, n)
    w = np.einsum("iyn,nyk->ink", rb, gammas.values)  # (i, n, k)
    c = np.einsum("ink,an->ika", w, r).real           # (i, k, alpha)
    return c, tuples


def _first_within(values: np.ndarray, eps: float) -> int:
    """Index of the first entry within eps of the maximum."""
    return int(np.argmax(values >= values.max() - eps))


def brute_force_bound(gammas: GammaTensor,
                      tie_eps: float = DEFAULT_TOLS.tie) -> tuple[float, Assignment]:
    """Classical bound by enumerating every deterministic strategy.

    Guarded to d <= 5 (d^(2d) strategies).  Ties are broken toward the
    lexicographically smallest (b, a); the returned value is the one the
    returned assignment attains.
    """
    d = gammas.d
    if d > BRUTE_FORCE_DMAX:
        raise ValueError(
            f"brute-force enumeration covers d <= {BRUTE_FORCE_DMAX}; "
            f"d = {d} means {d ** (2 * d):.2e} strategies")
    c, tuples = _bob_score_tables(gammas)
    k_idx = np.arange(d)
    per_b_max = np.empty(len(tuples))
    for i in range(len(tuples)):
        vals = c[i][k_idx, tuples].sum(axis=1)       # all a tuples against b_i
        per_b_max[i] = vals.max()
    best = per_b_max.max()
    i = _first_within(per_b_max, tie_eps)
    vals = c[i][k_idx, tuples].sum(axis=1)
    j = int(np.argmax(vals >= best - tie_eps))
    assignment = Assignment(tuple(tuples[j]), tuple(tuples[i]))
    return deterministic_value(assignment, gammas), assignment


def separable_bound(gammas: GammaTensor,
                    tie_eps: float = DEFAULT_TOLS.tie) -> tuple[float, Assignment]:
    """Classical bound via the factorized search over Bob's strategies.

    For each of the d^d tuples b the optimal Alice response decomposes
    coordinate-wise, costing O(d^d * d^2 (d-1)) overall.  Tie-breaking and
    the returned (value, assignment) contract match ``brute_force_bound``.
    """
    d = gammas.d
    c, tuples = _bob_score_tables(gammas)
    per_b = c.max(axis=2).sum(axis=1)                # (i,)
    i = _first_within(per_b, tie_eps)
    a = tuple(_first_within(c[i, k], tie_eps) for k in range(d))
    assignment = Assignment(a, tuple(tuples[i]))
    return deterministic_value(assignment, gammas), assignment


# ---- qutrit landscape scan ------------------------------------------------

@dataclass(frozen=True)
class ScanResult:
    """Classical bound over an inclusive grid of qutrit family parameters."""

    family: SolutionFamily
    phi00: np.ndarray            # (n0,)
    phi10: np.ndarray            # (n1,)
    values: np.ndarray           # (n0, n1)
    arg_a: np.ndarray            # (n0, n1, 3)
    arg_b: np.ndarray            # (n0, n1, 3)

    @property
    def min_value(self) -> float:
        return float(self.values.min())

    @property
    def max_value(self) -> float:
        return float(self.values.max())

    def cell(self, i: int, j: int) -> tuple[float, Assignment]:
        return float(self.values[i, j]), Assignment(
            tuple(self.arg_a[i, j]), tuple(self.arg_b[i, j]))


def _scan_row(args):
    p00, phi10_axis, family, tie_eps = args
    vals = np.empty(len(phi10_axis))
    arg_a = np.empty((len(phi10_axis), 3), dtype=np.int8)
    arg_b = np.empty((len(phi10_axis), 3), dtype=np.int8)
    for j, p10 in enumerate(phi10_axis):
        g = gamma(qutrit_family(p00, p10, family))
        val, assignment = separable_bound(g, tie_eps)
        vals[j] = val
        arg_a[j] = assignment.a
        arg_b[j] = assignment.b
    return vals, arg_a, arg_b


def scan(phi00_range=(0.0, 2.0 * np.pi), phi10_range=(0.0, 2.0 * np.pi),
         resolution=(201, 201), family=SolutionFamily.A, *,
         tie_eps: float = DEFAULT_TOLS.tie, map_fn=map) -> ScanResult:
    """Classical bound of a qutrit family over an inclusive parameter grid.

    The grid is ``linspace(start, stop, n)`` in each axis — both endpoints
    included, step (stop-start)/(n-1).  ``map_fn`` maps the per-row worker
    (the CLI passes a thread-pool map; results are assembled in order, so
    output is identical for any thread count).
    """
    family = SolutionFamily.coerce(family)
    n0, n1 = int(resolution[0]), int(resolution[1])
    if n0 < 1 or n1 < 1:
        raise ValueError(f"resolution must be at least 1x1, got {n0}x{n1}")
    phi00_axis = np.linspace(float(phi00_range[0]), float(phi00_range[1]), n0)
    phi10_axis = np.linspace(float(phi10_range[0]), float(phi10_range[1]), n1)
    rows = list(map_fn(_scan_row,
                       [(p00, phi10_axis, family, tie_eps) for p00 in phi00_axis]))
    values = np.stack([r[0] for r in rows])
    arg_a = np.stack([r[1] for r in rows])
    arg_b = np.stack([r[2] for r in rows])
    return ScanResult(family, phi00_axis, phi10_axis, values, arg_a, arg_b)


def scan_to_csv(result: ScanResult) -> str:
    """Serialize a scan row-major; angles to 17 and bounds to 15 significant digits."""
    lines = ["phi00,phi10,classical_bound,argmax_a,argmax_b,family"]
    for i, p00 in enumerate(result.phi00):
        for j, p10 in enumerate(result.phi10):
            a = ";".join(str(v) for v in result.arg_a[i, j])
            b = ";".join(str(v) for v in result.arg_b[i, j])
            lines.append(f"{p00:.17g},{p10:.17g},{result.values[i, j]:.15g},"
                         f"{a},{b},{result.family.value}")
    return "\n".join(lines) + "\n"
