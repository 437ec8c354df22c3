"""Bob's reference measurements built from a phase table.

For an admissible phase table the operators

    Bbar_y = sum_l e^{i phi_{l+1,y}} |l+1><l|        (indices mod d)

are unitary with Bbar_y^d = 1, and the gamma tensor links their powers to
the Heisenberg-Weyl operators two ways:

    Bbar_y^{(n)} := sum_k (gamma_{yk}^{(n)})^* (XZ^k)^n = Bbar_y^n,
    (XZ^k)^n      = sum_y gamma_{yk}^{(n)} Bbar_y^{(n)}.

This module constructs the operators and verifies those identities plus
the adjoint-power relation Bbar_y^{(d-n)} = (Bbar_y^{(n)})^dagger.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import dag, hw_power
from .config import DEFAULT_TOLS, Tolerances
from .phases import GammaTensor, PhaseSet, gamma
from .reporting import Check, Report


def b_bar(y: int, phases: PhaseSet) -> np.ndarray:
    """Bob's y-th reference observable, sum_l e^{i phi_{l+1,y}} |l+1><l|."""
    d = phases.d
    if not 0 <= y < d:
        raise ValueError(f"y must lie in 0..{d - 1}, got {y}")
    b = np.zeros((d, d), dtype=complex)
    for l in range(d):
        b[(l + 1) % d, l] = np.exp(1j * phases.phi[(l + 1) % d, y])
    return b


def b_bar_n(y: int, n: int, gammas: GammaTensor) -> np.ndarray:
    """The n-th power of Bbar_y reconstructed from the gamma coefficients.

    Bbar_y^{(n)} = sum_k (gamma_{yk}^{(n)})^* (XZ^k)^n, valid for 1 <= n <= d-1.
    """
    d = gammas.d
    if not 0 <= y < d:
        raise ValueError(f"y must lie in 0..{d - 1}, got {y}")
    if not 1 <= n <= d - 1:
        raise ValueError(f"n must lie in 1..{d - 1}, got {n}")
    coeffs = gammas.values[n - 1, y].conj()
    out = np.zeros((d, d), dtype=complex)
    for k in range(d):
        out += coeffs[k] * hw_power(k, n, d)
    return out


def hw_from_reference(k: int, n: int, gammas: GammaTensor, b_bars) -> np.ndarray:
    """Invert the expansion: (XZ^k)^n = sum_y gamma_{yk}^{(n)} Bbar_y^n."""
    d = gammas.d
    out = np.zeros((d, d), dtype=complex)
    for y in range(d):
        out += gammas.values[n - 1, y, k] * np.linalg.matrix_power(b_bars[y], n)
    return out


@dataclass(frozen=True)
class ReferenceSet:
    """A phase table with its gamma tensor and reference observables."""

    d: int
    phases: PhaseSet
    gammas: GammaTensor
    b_bars: tuple

    @classmethod
    def build(cls, phases: PhaseSet) -> "ReferenceSet":
        g = gamma(phases)
        ops = tuple(b_bar(y, phases) for y in range(phases.d))
        return cls(phases.d, phases, g, ops)

    def bob_power(self, y: int, n: int) -> np.ndarray:
        """Bbar_y^n as a dense matrix (n = 1..d-1)."""
        return np.linalg.matrix_power(self.b_bars[y], n)


def verify_reference(phases: PhaseSet, tols: Tolerances = DEFAULT_TOLS) -> Report:
    """Check the operator identities the reference construction promises.

    Covers unitarity, Bbar_y^d = 1, agreement of the gamma reconstruction
    with plain matrix powers, the adjoint-power relation, and the inversion
    back to the Heisenberg-Weyl operators.
    """
    d = phases.d
    ref = ReferenceSet.build(phases)
    eye = np.eye(d)
    report = Report()

    dev = max(np.abs(b @ dag(b) - eye).max() for b in ref.b_bars)
    report.add("reference_unitary", dev <= tols.unitary, float(dev))

    dev = max(np.abs(np.linalg.matrix_power(b, d) - eye).max() for b in ref.b_bars)
    report.add("reference_dth_power", dev <= tols.power_identity, float(dev))

    dev = 0.0
    for y in range(d):
        for n in range(1, d):
            dev = max(dev, np.abs(b_bar_n(y, n, ref.gammas) - ref.bob_power(y, n)).max())
    report.add("power_consistency", dev <= tols.power_identity, float(dev))

    dev = 0.0
    for y in range(d):
        for n in range(1, d):
            dev = max(dev, np.abs(
                b_bar_n(y, d - n, ref.gammas) - dag(b_bar_n(y, n, ref.gammas))).max())
    report.add("adjoint_power", dev <= tols.power_identity, float(dev))

    dev = 0.0
    for k in range(d):
        for n in range(1, d):
            dev = max(dev, np.abs(
                hw_from_reference(k, n, ref.gammas, ref.b_bars) - hw_power(k, n, d)).max())
    report.add("hw_inversion", dev <= tols.power_identity, float(dev))

    return report
