"""Negativity and logarithmic negativity of two-qubit states."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian

HERMITIAN_TOL = 1e-12
_PAIRS = [(p, q) for p in range(4) for q in range(p + 1, 4)]


@dataclass(frozen=True)
class EntanglementResult:
    negativity: float
    log_negativity: float
    min_pt_eigenvalue: float


def _as_matrix(rho):
    return np.asarray(getattr(rho, "matrix", rho), dtype=complex)


def partial_transpose(rho):
    """Transpose on the first qubit: (i j),(k l) -> (k j),(i l)."""
    m = _as_matrix(rho).reshape(2, 2, 2, 2)
    return m.transpose(2, 1, 0, 3).reshape(4, 4)


def hermitian_eigenvalues_4x4(m, max_sweeps=30):
    """Eigenvalues of a 4x4 Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot with a diagonal unitary,
    then applies the real symmetric Jacobi rotation.  Returned ascending.
    """
    a = np.array(m, dtype=complex)
    if a.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))))
    if float(np.max(np.abs(a - a.conj().T))) > HERMITIAN_TOL * scale:
        raise NotHermitian("matrix is not Hermitian to 1e-12")
    a = 0.5 * (a + a.conj().T)
    floor = (1e-17 * scale) ** 2
    for _ in range(max_sweeps):
        off = sum(abs(a[p, q]) ** 2 for p, q in _PAIRS)
        if off <= floor:
            break
        for p, q in _PAIRS:
            apq = a[p, q]
            r = abs(apq)
            if r == 0.0:
                continue
            ph = apq.conjugate() / r
            a[:, q] *= ph
            a[q, :] *= ph.conjugate()
            app, aqq = a[p, p].real, a[q, q].real
            theta = (aqq - app) / (2.0 * r)
            t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            cp = a[:, p].copy()
            cq = a[:, q].copy()
            a[:, p] = c * cp - s * cq
            a[:, q] = s * cp + c * cq
            rp = a[p, :].copy()
            rq = a[q, :].copy()
            a[p, :] = c * rp - s * rq
            a[q, :] = s * rp + c * rq
            # pivot entries from the textbook update: fewer roundings than the products above
            a[p, p] = app - t * r
            a[q, q] = aqq + t * r
            a[p, q] = a[q, p] = 0.0
    return np.sort(a.diagonal().real)


def x_state_pt_eigenvalues(rho):
    """Closed-form partial-transpose spectrum of an X-shaped two-qubit matrix."""
    m = _as_matrix(rho)
    d = m.diagonal().real
    u = abs(m[0, 3])
    v = abs(m[1, 2])
    outer_mid, outer_half = 0.5 * (d[0] + d[3]), 0.5 * (d[0] - d[3])
    inner_mid, inner_half = 0.5 * (d[1] + d[2]), 0.5 * (d[1] - d[2])
    ro = math.hypot(outer_half, v)
    ri = math.hypot(inner_half, u)
    return np.sort([outer_mid - ro, outer_mid + ro, inner_mid - ri, inner_mid + ri])


def negativity(rho) -> EntanglementResult:
    ev = hermitian_eigenvalues_4x4(partial_transpose(rho))
    n = 0.0 - float(ev[ev < 0].sum())
    return EntanglementResult(n, math.log2(2.0 * n + 1.0), float(ev[0]))


def log_negativity(rho) -> float:
    return negativity(rho).log_negativity
