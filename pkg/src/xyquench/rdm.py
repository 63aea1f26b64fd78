"""One- and two-site reduced density matrices of the evolved chain."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correlators import CorrelatorSet
from .entanglement import hermitian_eigenvalues_4x4
from .errors import DomainError, PhysicalityError

POS_TOL = 1e-8
TRACE_TOL = 1e-12

SX = 0.5 * np.array([[0, 1], [1, 0]], dtype=complex)
SY = 0.5 * np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = 0.5 * np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
SWAP = np.eye(4)[[0, 2, 1, 3]]


@dataclass(frozen=True)
class PhysicalityReport:
    trace_error: float
    min_eigenvalue: float
    marginal_error: float

    def ok(self, pos_tol=POS_TOL, trace_tol=TRACE_TOL, marginal_tol=1e-10):
        return (self.trace_error <= trace_tol and self.min_eigenvalue >= -pos_tol
                and self.marginal_error <= marginal_tol)


@dataclass(frozen=True)
class TwoSiteRDM:
    matrix: np.ndarray
    m_z: float


def single_site_rdm(m_z):
    """rho_1 = I/2 + 2 m_z S^z = diag(1/2 + m_z, 1/2 - m_z)."""
    if abs(m_z) > 0.5 + 1e-9:
        raise DomainError(f"|m_z| must not exceed 1/2, got {m_z!r}")
    return 0.5 * I2 + 2.0 * m_z * SZ


def build_two_site_matrix(c: CorrelatorSet):
    """Sum of Kronecker products in the {uu, ud, du, dd} basis."""
    return (0.25 * np.kron(I2, I2)
            + c.m_z * (np.kron(SZ, I2) + np.kron(I2, SZ))
            + c.t_xy * (np.kron(SX, SY) + np.kron(SY, SX))
            + c.t_xx * np.kron(SX, SX)
            + c.t_yy * np.kron(SY, SY)
            + c.t_zz * np.kron(SZ, SZ))


def partial_traces(m):
    r = np.asarray(m).reshape(2, 2, 2, 2)
    return np.einsum("ikjk->ij", r), np.einsum("kikj->ij", r)


def validate_physicality(rho, m_z=None) -> PhysicalityReport:
    m = np.asarray(getattr(rho, "matrix", rho))
    if m_z is None:
        m_z = getattr(rho, "m_z", None)
    trace_error = abs(complex(np.trace(m)) - 1.0)
    min_ev = float(hermitian_eigenvalues_4x4(m)[0])
    first, second = partial_traces(m)
    if m_z is None:
        m_z = 0.5 * float(np.real(first[0, 0] - first[1, 1]))
    ref = single_site_rdm(max(-0.5, min(0.5, m_z)))
    marginal_error = float(max(np.max(np.abs(first - ref)), np.max(np.abs(second - ref))))
    return PhysicalityReport(float(trace_error), min_ev, marginal_error)


def two_site_rdm(c: CorrelatorSet, pos_tol=POS_TOL) -> TwoSiteRDM:
    m = build_two_site_matrix(c)
    rho = TwoSiteRDM(m, c.m_z)
    rep = validate_physicality(rho)
    if rep.trace_error > TRACE_TOL or rep.min_eigenvalue < -pos_tol:
        raise PhysicalityError(
            f"two-site RDM unphysical: trace error {rep.trace_error:.2e}, "
            f"min eigenvalue {rep.min_eigenvalue:.3e}"
        )
    return rho
