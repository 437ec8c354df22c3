"""Heisenberg-Weyl operator algebra in dimension d.

The generalized Pauli matrices

    X = sum_i |i+1><i|,      Z = sum_i w^i |i><i|,      w = exp(2*pi*i/d),

with all indices mod d (|d> is |0>), obey ZX = w XZ and X^d = Z^d = 1.
Alice's trusted observables are A_x = XZ^{-x} = (XZ^x)^*, and powers of
XZ^k have the closed form

    (XZ^k)^n = w^{k n(n-1)/2} sum_l w^{nkl} |l+n><l|,

which this module implements directly instead of by repeated
multiplication.  The pair (XZ^{-k})^n (x) (XZ^k)^n stabilizes the
maximally entangled state |phi_d+> = (1/sqrt d) sum_i |ii> for every k, n.

Everything is a dense complex numpy array; the largest objects downstream
are two-qudit operators of size d^2 x d^2.

A caution on conjugation identities: (XZ^k)^{d-n} = ((XZ^k)^n)^dag holds
for odd d (any k) but picks up a sign (-1)^k for even d, because
(XZ^k)^d = w^{k d(d-1)/2} 1 is -1 for odd k when d is even.  Checks that
rely on it are therefore scoped to odd d.
"""

from __future__ import annotations

import numpy as np

from .config import DEFAULT_TOLS


def _check_dim(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")


def omega(d: int) -> complex:
    """Primitive d-th root of unity exp(2*pi*i/d)."""
    _check_dim(d)
    return complex(np.exp(2j * np.pi / d))


def root_powers(d: int) -> np.ndarray:
    """All d-th roots of unity, root_powers(d)[m] = w^m for m = 0..d-1."""
    _check_dim(d)
    return np.exp(2j * np.pi * np.arange(d) / d)


def pauli_x(d: int) -> np.ndarray:
    """Cyclic shift X = sum_i |i+1><i| (mod d)."""
    _check_dim(d)
    x = np.zeros((d, d), dtype=complex)
    x[(np.arange(d) + 1) % d, np.arange(d)] = 1.0
    return x


def pauli_z(d: int) -> np.ndarray:
    """Clock matrix Z = diag(1, w, ..., w^{d-1})."""
    _check_dim(d)
    return np.diag(root_powers(d))


def dag(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return m.conj().T


def hw_power(k: int, n: int, d: int) -> np.ndarray:
    """n-th power of XZ^k from the closed form.

    (XZ^k)^n = w^{k n(n-1)/2} sum_l w^{nkl} |l+n><l|.  Exponents are
    reduced mod d and taken from a precomputed root table, so no drift
    accumulates for large k*n*l.
    """
    _check_dim(d)
    if not 0 <= k < d:
        raise ValueError(f"k must lie in 0..{d - 1}, got {k}")
    if not 1 <= n <= d - 1:
        raise ValueError(f"n must lie in 1..{d - 1}, got {n}")
    roots = root_powers(d)
    prefactor = roots[(k * n * (n - 1) // 2) % d]
    l = np.arange(d)
    m = np.zeros((d, d), dtype=complex)
    m[(l + n) % d, l] = prefactor * roots[(n * k * l) % d]
    return m


def alice_observable(x: int, d: int) -> np.ndarray:
    """Alice's trusted observable A_x = XZ^{-x} = (XZ^x)^*."""
    _check_dim(d)
    if not 0 <= x < d:
        raise ValueError(f"x must lie in 0..{d - 1}, got {x}")
    return (pauli_x(d) @ np.linalg.matrix_power(pauli_z(d), x)).conj()


def alice_power(k: int, n: int, d: int) -> np.ndarray:
    """A_k^n, computed as the entry-wise conjugate of (XZ^k)^n."""
    return hw_power(k, n, d).conj()


def max_entangled(d: int) -> np.ndarray:
    """|phi_d+> = (1/sqrt d) sum_i |ii> as a flat d^2 ket."""
    _check_dim(d)
    ket = np.zeros(d * d, dtype=complex)
    ket[np.arange(d) * d + np.arange(d)] = 1.0 / np.sqrt(d)
    return ket


# ---- matrix predicates -------------------------------------------------

def is_unitary(m: np.ndarray, tol: float = DEFAULT_TOLS.unitary) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.abs(m @ dag(m) - np.eye(m.shape[0])).max() <= tol)


def is_hermitian(m: np.ndarray, tol: float = DEFAULT_TOLS.hermitian) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.abs(m - dag(m)).max() <= tol)


def is_psd(m: np.ndarray, tol: float = DEFAULT_TOLS.psd) -> bool:
    if not is_hermitian(m, tol=max(tol, 1e-9)):
        return False
    return bool(np.linalg.eigvalsh((m + dag(m)) / 2).min() >= -tol)


def observable_to_povm(b: np.ndarray, d: int,
                       tol: float = DEFAULT_TOLS.unitary) -> list[np.ndarray]:
    """POVM elements of a d-outcome unitary observable with B^d = 1.

    M_a = (1/d) sum_k w^{-ak} B^k.  Because B's spectrum consists of d-th
    roots of unity, each M_a is the (possibly zero) projector onto the
    eigenvalue-w^a subspace; the Fourier relation sum_a w^{an} M_a = B^n
    inverts the construction.  B may act on a space larger than d
    (an ancilla factor); only its spectrum is constrained.
    """
    _check_dim(d)
    b = np.asarray(b, dtype=complex)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError(f"expected a square observable, got shape {b.shape}")
    dim = b.shape[0]
    if not is_unitary(b, tol=tol):
        raise ValueError("observable must be unitary")
    powers = [np.eye(dim, dtype=complex)]
    for _ in range(d - 1):
        powers.append(powers[-1] @ b)
    if np.abs(powers[-1] @ b - np.eye(dim)).max() > tol:
        raise ValueError("observable spectrum is not the d-th roots of unity (B^d != 1)")
    roots = root_powers(d)
    povm = []
    for a in range(d):
        m = sum(roots[(-a * k) % d] * powers[k] for k in range(d)) / d
        povm.append((m + dag(m)) / 2)  # exactly Hermitian for downstream eigh
    return povm
