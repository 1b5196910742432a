"""Multiport beamsplitters and cavity leakage.

A cavity photon leaves either straight into its own free-space mode
(:func:`leak_cavity_direct`) or through a passive N-port network whose
single-photon transfer amplitudes form the unitary ``U``
(:func:`leak_cavity_through_network`). Leakage is treated as an instantaneous
relabeling of the photon's mode; polarisation is never changed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, DomainError, NonUnitaryError
from .hilbert import (
    POLS,
    BasisLabel,
    StateVector,
    apply_linear,
    external_mode,
    port_mode,
)

UNITARITY_TOL = 1e-12


def unitarity_residual(matrix: np.ndarray) -> float:
    """Max-norm of ``U^dag U - I``."""
    m = np.asarray(matrix)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


@dataclass(frozen=True, eq=False)
class ScatteringMatrix:
    """Validated N x N unitary; ``entry(i, j)`` is the amplitude for input
    port ``i`` to output port ``j`` (both 1-based)."""

    matrix: np.ndarray
    name: str = "custom"
    tol: float = UNITARITY_TOL

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionError(f"scattering matrix must be square, got shape {m.shape}")
        residual = unitarity_residual(m)
        if residual > self.tol:
            raise NonUnitaryError(residual, self.tol)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def entry(self, i: int, j: int) -> complex:
        return complex(self.matrix[i - 1, j - 1])

    def to_config(self) -> list[list[list[float]]]:
        return [[[z.real, z.imag] for z in row] for row in self.matrix.tolist()]

    @classmethod
    def from_config(cls, data, name: str = "custom", tol: float = UNITARITY_TOL) -> "ScatteringMatrix":
        """Load from a row-major list of ``[re, im]`` pairs.

        Accepts nested rows (``[[[re, im], ...], ...]``) or a flat list of
        ``n*n`` pairs.
        """
        arr = np.asarray(data, dtype=float)
        if arr.shape[-1] != 2:
            raise DimensionError("matrix entries must be [re, im] pairs")
        if arr.ndim == 2:
            n = math.isqrt(arr.shape[0])
            if n * n != arr.shape[0]:
                raise DimensionError(f"flat matrix has {arr.shape[0]} entries, not a square count")
            arr = arr.reshape(n, n, 2)
        if arr.ndim != 3:
            raise DimensionError(f"cannot read a matrix from data of shape {arr.shape}")
        return cls(arr[..., 0] + 1j * arr[..., 1], name=name, tol=tol)


def identity(n: int) -> ScatteringMatrix:
    if n < 1:
        raise ValueError("identity network needs n >= 1")
    return ScatteringMatrix(np.eye(n), name="identity")


def beamsplitter_50_50() -> ScatteringMatrix:
    """U11 = U12 = U21 = -U22 = 1/sqrt(2)."""
    r = 1 / math.sqrt(2)
    return ScatteringMatrix(np.array([[r, r], [r, -r]]), name="bs5050")


def dft_multiport(n: int) -> ScatteringMatrix:
    """Symmetric N-port: U_jk = exp(2 pi i (j-1)(k-1) / n) / sqrt(n)."""
    if n < 2:
        raise ValueError(f"DFT multiport needs n >= 2, got {n}")
    jk = np.outer(np.arange(n), np.arange(n)) % n
    return ScatteringMatrix(np.exp(2j * np.pi * jk / n) / math.sqrt(n), name="dft")


def _bs5050_for(n: int) -> ScatteringMatrix:
    if n != 2:
        raise DimensionError("the 50:50 beamsplitter has exactly 2 ports")
    return beamsplitter_50_50()


NETWORKS: dict[str, tuple[Callable[[int], ScatteringMatrix], str]] = {
    "identity": (identity, "no interference: port j receives cavity j"),
    "bs5050": (_bs5050_for, "50:50 beamsplitter, U11=U12=U21=-U22=1/sqrt(2) (n=2 only)"),
    "dft": (dft_multiport, "symmetric discrete-Fourier multiport, n >= 2"),
}


def network_by_name(name: str, n: int) -> ScatteringMatrix:
    try:
        factory, _ = NETWORKS[name]
    except KeyError:
        raise ValueError(f"unknown network {name!r}; built-ins: {', '.join(NETWORKS)}") from None
    return factory(n)


def _check_site(site: int, psi: StateVector) -> None:
    if not 1 <= site <= psi.n_sites:
        raise DimensionError(f"site {site} outside 1..{psi.n_sites}")


def _leak(site: int, psi: StateVector, targets: Callable) -> StateVector:
    def act(label: BasisLabel):
        s = label.sites[site - 1]
        for pol in POLS:
            n = s.cavity(pol)
            if not n:
                continue
            emptied = label.with_site(site, s.with_cavity(pol, n - 1))
            for mode, amp in targets(pol):
                m = emptied.occupancy(mode)
                yield emptied.with_occupancy(mode, m + 1), amp * math.sqrt(n) * math.sqrt(m + 1)

    return apply_linear(psi, act)


def leak_cavity_direct(site: int, psi: StateVector) -> StateVector:
    """Apply sum_pol a_pol(site) b_pol(site)^dag.

    A site with an empty cavity contributes nothing, so a state with no
    photon at ``site`` maps to the zero vector.
    """
    _check_site(site, psi)
    return _leak(site, psi, lambda pol: [(external_mode(site, pol), 1.0)])


def leak_cavity_through_network(site: int, u: ScatteringMatrix, psi: StateVector) -> StateVector:
    """Apply sum_pol sum_j U[site, j] a_pol(site) c_pol(j)^dag."""
    if u.n != psi.n_sites:
        raise DimensionError(f"network has {u.n} ports but the state has {psi.n_sites} sites")
    _check_site(site, psi)
    row = [(j, u.entry(site, j)) for j in range(1, u.n + 1) if u.entry(site, j) != 0]
    return _leak(site, psi, lambda pol: [(port_mode(j, pol), amp) for j, amp in row])


def leak_all(
    u: ScatteringMatrix | None, psi: StateVector, order: Sequence[int] | None = None
) -> StateVector:
    """Leak every cavity, directly (``u=None``) or through the network.

    Every label in ``psi`` must hold exactly one photon in every cavity.
    The result does not depend on ``order``.
    """
    n = psi.n_sites
    for label in psi:
        for i, s in enumerate(label.sites, 1):
            if s.cavity_plus + s.cavity_minus != 1:
                raise DomainError(f"site {i} does not hold exactly one cavity photon in {label}")
    order = list(range(1, n + 1)) if order is None else list(order)
    if sorted(order) != list(range(1, n + 1)):
        raise ValueError(f"order must be a permutation of 1..{n}, got {order}")
    for i in order:
        psi = leak_cavity_direct(i, psi) if u is None else leak_cavity_through_network(i, u, psi)
    return psi
