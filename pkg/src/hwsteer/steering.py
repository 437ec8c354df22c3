"""Steering operators, quantum values, and behaviors.

The steering functional pairs Alice's Heisenberg-Weyl powers with linear
combinations of Bob's (untrusted) measurement operators,

    S = sum_{n=1}^{d-1} sum_k A_k^n (x) Btilde_k^{(n)},
    Btilde_k^{(n)} = sum_y gamma_{yk}^{(n)} B_{n|y},

where Alice's side is trusted and fixed to A_k = (XZ^k)^*.  For the
reference measurements on the maximally entangled state the value reaches
d(d-1), which is also the largest eigenvalue of S — certified by the
sum-of-squares identity

    d(d-1) 1 - S = (1/2) sum_{n,k} P_{nk}^dagger P_{nk},
    P_{nk} = 1 - A_k^n (x) Btilde_k^{(n)}.

Behaviors p(ab|xy) arise from realizations through the Born rule with the
d-outcome POVMs attached to the unitary observables; the functional acts
on behaviors through the correlators sum_{ab} w^{an} w^{bn} p(ab|k,y).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (alice_observable, alice_power, dag, is_hermitian,
                      max_entangled, observable_to_povm)
from .config import DEFAULT_TOLS, Tolerances
from .phases import GammaTensor
from .reference import b_bar_n
from .reporting import Check, Report


@dataclass(frozen=True)
class Realization:
    """A bipartite state with Bob's measurement operators B_{n|y}.

    ``state`` is a ket of length d*dim_b or a density matrix of that size;
    ``bob_ops[n-1, y]`` is the operator Bob reports for the n-th power of
    his y-th observable.  Alice is trusted: ``alice_obs[x]`` defaults to
    (and is validated against) the reference observables (XZ^x)^*.
    """

    d: int
    state: np.ndarray
    bob_ops: np.ndarray
    alice_obs: np.ndarray | None = None

    def __post_init__(self):
        d = self.d
        bob = np.asarray(self.bob_ops, dtype=complex)
        if bob.ndim != 4 or bob.shape[:2] != (d - 1, d) or bob.shape[2] != bob.shape[3]:
            raise ValueError(f"bob_ops must be (d-1, d, K, K), got {bob.shape}")
        k = bob.shape[-1]
        state = np.asarray(self.state, dtype=complex)
        if state.shape not in ((d * k,), (d * k, d * k)):
            raise ValueError(
                f"state must be a ket of length {d * k} or a {d * k}x{d * k} density matrix")
        alice = self.alice_obs
        if alice is None:
            alice = np.stack([alice_observable(x, d) for x in range(d)])
        else:
            alice = np.asarray(alice, dtype=complex)
            if alice.shape != (d, d, d):
                raise ValueError(f"alice_obs must be (d, d, d), got {alice.shape}")
        for arr in (state, bob, alice):
            arr.setflags(write=False)
        object.__setattr__(self, "state", state)
        object.__setattr__(self, "bob_ops", bob)
        object.__setattr__(self, "alice_obs", alice)

    @property
    def dim_b(self) -> int:
        return self.bob_ops.shape[-1]

    def density(self) -> np.ndarray:
        if self.state.ndim == 1:
            return np.outer(self.state, self.state.conj())
        return self.state


def validate_realization(r: Realization, tols: Tolerances = DEFAULT_TOLS) -> Report:
    """Structural checks: state validity, trusted Alice, Bob's power relations.

    Bob's operators must pair under the adjoint, B_{d-n|y} = B_{n|y}^dagger,
    and be contractions, B^dagger B <= 1.
    """
    d = r.d
    report = Report()

    if r.state.ndim == 1:
        dev = abs(np.linalg.norm(r.state) - 1.0)
        report.add("state_normalized", dev <= tols.realness, float(dev))
    else:
        rho = r.state
        herm = np.abs(rho - dag(rho)).max()
        tr = abs(np.trace(rho).real - 1.0) + abs(np.trace(rho).imag)
        evs = np.linalg.eigvalsh((rho + dag(rho)) / 2)
        neg = max(0.0, -evs.min())
        dev = max(herm, tr, neg)
        report.add("state_density", dev <= tols.psd * rho.shape[0], float(dev))

    dev = max(np.abs(r.alice_obs[x] - alice_observable(x, d)).max() for x in range(d))
    report.add("alice_trusted", dev <= tols.unitary, float(dev))

    dev = 0.0
    for y in range(d):
        for n in range(1, d):
            dev = max(dev, np.abs(r.bob_ops[d - n - 1, y] - dag(r.bob_ops[n - 1, y])).max())
    report.add("bob_adjoint_pairs", dev <= tols.hermitian, float(dev))

    eye = np.eye(r.dim_b)
    dev = 0.0
    for y in range(d):
        for n in range(1, d):
            b = r.bob_ops[n - 1, y]
            gram = eye - dag(b) @ b
            evs = np.linalg.eigvalsh((gram + dag(gram)) / 2)
            dev = max(dev, max(0.0, -evs.min()))
    report.add("bob_contractions", dev <= tols.psd, float(dev))

    return report


def reference_realization(gammas: GammaTensor) -> Realization:
    """Maximally entangled state with Bob's reference measurement powers."""
    d = gammas.d
    bob = np.stack([
        np.stack([b_bar_n(y, n, gammas) for y in range(d)])
        for n in range(1, d)
    ])
    return Realization(d, max_entangled(d), bob)


def conjugate_bob(r: Realization, u: np.ndarray) -> Realization:
    """Rotate Bob's side by a unitary: B -> U B U^dag, psi -> (1 (x) U) psi."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (r.dim_b, r.dim_b):
        raise ValueError(f"unitary must be {r.dim_b}x{r.dim_b}, got {u.shape}")
    bob = np.einsum("ij,nyjk,lk->nyil", u, r.bob_ops, u.conj())
    big = np.kron(np.eye(r.d), u)
    if r.state.ndim == 1:
        state = big @ r.state
    else:
        state = big @ r.state @ dag(big)
    return Realization(r.d, state, bob, r.alice_obs)


def ancilla_realization(gammas: GammaTensor, ancilla: np.ndarray) -> Realization:
    """Append an ancilla on Bob's side that his reported operators ignore.

    The state becomes phi+ (x) ancilla and the operators Bbar^n (x) 1; the
    steering operator then has a degenerate top eigenspace, which is the
    situation the recovery check must flag rather than misread.
    """
    d = gammas.d
    ref = reference_realization(gammas)
    anc = np.asarray(ancilla, dtype=complex)
    if anc.ndim == 1:
        k = anc.shape[0]
        state = np.kron(ref.state, anc)
    elif anc.ndim == 2 and anc.shape[0] == anc.shape[1]:
        k = anc.shape[0]
        state = np.kron(ref.density(), anc)
    else:
        raise ValueError(f"ancilla must be a ket or square density matrix, got {anc.shape}")
    eye = np.eye(k)
    bob = np.stack([
        np.stack([np.kron(ref.bob_ops[n - 1, y], eye) for y in range(d)])
        for n in range(1, d)
    ])
    return Realization(d, state, bob)


def b_tilde(k: int, n: int, gammas: GammaTensor, bob_ops: np.ndarray) -> np.ndarray:
    """Btilde_k^{(n)} = sum_y gamma_{yk}^{(n)} B_{n|y}."""
    d = gammas.d
    bob_ops = np.asarray(bob_ops, dtype=complex)
    return np.tensordot(gammas.values[n - 1, :, k], bob_ops[n - 1], axes=(0, 0))


def build_steering_operator(gammas: GammaTensor, bob_ops: np.ndarray,
                            tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """Assemble S = sum_{n,k} A_k^n (x) Btilde_k^{(n)} and insist it is Hermitian."""
    d = gammas.d
    bob_ops = np.asarray(bob_ops, dtype=complex)
    dim = d * bob_ops.shape[-1]
    s = np.zeros((dim, dim), dtype=complex)
    for n in range(1, d):
        for k in range(d):
            s += np.kron(alice_power(k, n, d), b_tilde(k, n, gammas, bob_ops))
    dev = np.abs(s - dag(s)).max()
    if dev > tols.hermitian * dim:
        raise ValueError(f"steering operator not Hermitian, deviation {dev:.3e}")
    return s


def quantum_value(s: np.ndarray, state: np.ndarray,
                  tols: Tolerances = DEFAULT_TOLS) -> float:
    """<S> on a ket or density matrix, checked to be real."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        val = complex(state.conj() @ s @ state)
    else:
        val = complex(np.trace(state @ s))
    if abs(val.imag) > tols.realness * s.shape[0]:
        raise ValueError(f"expectation value has imaginary part {val.imag:.3e}")
    return float(val.real)


def max_eigenvalue(s: np.ndarray, tols: Tolerances = DEFAULT_TOLS) -> float:
    """Largest eigenvalue of a Hermitian operator; rejects non-Hermitian input."""
    s = np.asarray(s)
    if not is_hermitian(s, tol=tols.hermitian * s.shape[0]):
        raise ValueError("operator is not Hermitian")
    return float(np.linalg.eigvalsh(s)[-1])


def sos_gap(s: np.ndarray, d: int, tols: Tolerances = DEFAULT_TOLS) -> float:
    """d(d-1) - lambda_max(S); nonnegative (to tolerance) for valid realizations."""
    return d * (d - 1) - max_eigenvalue(s, tols=tols)


# ---- behaviors -----------------------------------------------------------

@dataclass(frozen=True)
class Behavior:
    """Conditional outcome table p[a, b, x, y] for d settings and outcomes each."""

    d: int
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        d = self.d
        if p.shape != (d, d, d, d):
            raise ValueError(f"behavior table must be {(d,) * 4}, got {p.shape}")
        if p.min() < -DEFAULT_TOLS.behavior_nonneg:
            raise ValueError(f"negative probability {p.min():.3e}")
        norms = p.sum(axis=(0, 1))
        dev = np.abs(norms - 1.0).max()
        if dev > DEFAULT_TOLS.behavior_norm * d * d:
            raise ValueError(f"outcome distributions must normalize, deviation {dev:.3e}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def correlator(self, n: int, x: int, y: int) -> complex:
        """sum_{ab} w^{an} w^{bn} p(ab|xy)."""
        d = self.d
        w = np.exp(2j * np.pi * n * np.arange(d) / d)
        return complex(w @ self.p[:, :, x, y] @ w)


def born_behavior(r: Realization, bob_povms=None,
                  tols: Tolerances = DEFAULT_TOLS) -> Behavior:
    """Born-rule behavior of a realization.

    POVMs default to the spectral ones attached to the unitary observables
    (Alice's always; Bob's from B_{1|y} when it is unitary with B^d = 1 —
    supply ``bob_povms[y][b]`` explicitly for anything else).
    """
    d = r.d
    rho = r.density()
    alice = [observable_to_povm(r.alice_obs[x], d) for x in range(d)]
    if bob_povms is None:
        bob_povms = [observable_to_povm(r.bob_ops[0, y], d) for y in range(d)]
    p = np.empty((d, d, d, d))
    for x in range(d):
        for y in range(d):
            for a in range(d):
                for b in range(d):
                    val = np.trace(rho @ np.kron(alice[x][a], bob_povms[y][b]))
                    if abs(val.imag) > tols.realness * rho.shape[0]:
                        raise ValueError(
                            f"Born probability has imaginary part {val.imag:.3e}")
                    p[a, b, x, y] = val.real
    return Behavior(d, p)


def functional_from_behavior(behavior: Behavior, gammas: GammaTensor,
                             tols: Tolerances = DEFAULT_TOLS) -> float:
    """Evaluate the steering functional on a behavior.

    beta = sum_n sum_{k,y} gamma_{yk}^{(n)} sum_{ab} w^{an} w^{bn} p(ab|k,y).

    At odd d the sum is real: correlators satisfy E(d-n) = conj(E(n)) for
    any behavior and the gamma tensors pair up the same way, so a residual
    imaginary part means corrupted inputs and raises.  At even d the
    self-paired n = d/2 term breaks the argument, so the real part — the
    value against the Hermitian functional — is returned directly.
    """
    d = behavior.d
    if gammas.d != d:
        raise ValueError("behavior and gamma tensor dimensions differ")
    val = 0.0 + 0.0j
    for n in range(1, d):
        for k in range(d):
            for y in range(d):
                val += gammas.values[n - 1, y, k] * behavior.correlator(n, k, y)
    if d % 2 == 1 and abs(val.imag) > tols.realness * d * d:
        raise ValueError(f"functional value has imaginary part {val.imag:.3e}")
    return float(val.real)


# ---- text serialization (used by the CLI dump option) --------------------

def _format_complex_block(arr: np.ndarray) -> list[str]:
    return [f"{v.real:.17g} {v.imag:.17g}" for v in arr.reshape(-1)]


def _parse_complex_block(lines, count: int) -> np.ndarray:
    vals = np.empty(count, dtype=complex)
    for i in range(count):
        re, im = lines[i].split()
        vals[i] = complex(float(re), float(im))
    return vals


def realization_to_text(r: Realization) -> str:
    kind = "ket" if r.state.ndim == 1 else "density"
    lines = [
        "realization",
        f"d {r.d}",
        f"dim_b {r.dim_b}",
        f"state {kind}",
    ]
    lines += _format_complex_block(r.state)
    lines.append("bob_ops")
    lines += _format_complex_block(r.bob_ops)
    lines.append("alice_obs")
    lines += _format_complex_block(r.alice_obs)
    return "\n".join(lines) + "\n"


def realization_from_text(text: str) -> Realization:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "realization":
        raise ValueError("not a realization dump")
    d = int(lines[1].split()[1])
    dim_b = int(lines[2].split()[1])
    kind = lines[3].split()[1]
    pos = 4
    n_state = d * dim_b if kind == "ket" else (d * dim_b) ** 2
    state = _parse_complex_block(lines[pos:], n_state)
    if kind == "density":
        state = state.reshape(d * dim_b, d * dim_b)
    pos += n_state
    if lines[pos] != "bob_ops":
        raise ValueError("malformed realization dump: expected bob_ops")
    pos += 1
    n_bob = (d - 1) * d * dim_b * dim_b
    bob = _parse_complex_block(lines[pos:], n_bob).reshape(d - 1, d, dim_b, dim_b)
    pos += n_bob
    if lines[pos] != "alice_obs":
        raise ValueError("malformed realization dump: expected alice_obs")
    pos += 1
    alice = _parse_complex_block(lines[pos:], d * d * d).reshape(d, d, d)
    return Realization(d, state, bob, alice)


def behavior_to_text(b: Behavior) -> str:
    lines = ["behavior", f"d {b.d}"]
    lines += [f"{v:.17g}" for v in b.p.reshape(-1)]
    return "\n".join(lines) + "\n"


def behavior_from_text(text: str) -> Behavior:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "behavior":
        raise ValueError("not a behavior dump")
    d = int(lines[1].split()[1])
    p = np.array([float(v) for v in lines[2:2 + d ** 4]]).reshape(d, d, d, d)
    return Behavior(d, p)
