"""Brute-force reference on the full 2^N spin Hilbert space of a periodic ring."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from ..errors import BadSize, TooLarge
from ..model import Temperature

MAX_SITES = 10

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "i": np.eye(2, dtype=complex),
}


def _site_op(p, site, n):
    return sp.kron(
        sp.kron(sp.identity(2 ** site, format="csr"), sp.csr_matrix(_PAULI[p])),
        sp.identity(2 ** (n - site - 1), format="csr"),
        format="csr",
    )


@lru_cache(maxsize=16)
def _hamiltonian_parts(n):
    """(bond_xx, bond_yy, field_z) sums of Pauli products on the ring, dense."""
    xs = [_site_op("x", j, n) for j in range(n)]
    ys = [_site_op("y", j, n) for j in range(n)]
    zs = [_site_op("z", j, n) for j in range(n)]
    if n == 2:
        bonds = [(0, 1), (1, 0)]
    else:
        bonds = [(j, (j + 1) % n) for j in range(n)]
    hxx = sum(xs[i] @ xs[j] for i, j in bonds)
    hyy = sum(ys[i] @ ys[j] for i, j in bonds)
    hz = sum(zs)
    return hxx.toarray(), hyy.toarray(), hz.toarray()


def spin_hamiltonian(n_sites, gamma, h):
    """Dense H = sum (1+g) S^x S^x + (1-g) S^y S^y - h sum S^z with S = sigma/2."""
    hxx, hyy, hz = _hamiltonian_parts(n_sites)
    return 0.25 * (1 + gamma) * hxx + 0.25 * (1 - gamma) * hyy - 0.5 * h * hz


def initial_state(n_sites, gamma, a, temperature: Temperature, degeneracy_tol=1e-9):
    e, v = np.linalg.eigh(spin_hamiltonian(n_sites, gamma, a))
    if temperature.is_zero:
        ground = e <= e[0] + degeneracy_tol * max(1.0, abs(e[0]))
        vg = v[:, ground]
        return vg @ vg.conj().T / vg.shape[1]
    w = np.exp(-temperature.beta * (e - e[0]))
    return (v * (w / w.sum())) @ v.conj().T


def evolve(rho, n_sites, gamma, t):
    """rho(t) = exp(-i H(0) t) rho exp(+i H(0) t), by spectral decomposition."""
    if t == 0:
        return rho
    e, v = np.linalg.eigh(spin_hamiltonian(n_sites, gamma, 0.0))
    u = (v * np.exp(-1j * e * t)) @ v.conj().T
    return u @ rho @ u.conj().T


def reduce_to_pair(rho, n_sites):
    """Partial trace onto sites (0, 1); basis |uu>, |ud>, |du>, |dd>."""
    rest = 2 ** (n_sites - 2)
    r = rho.reshape(4, rest, 4, rest)
    return np.einsum("ikjk->ij", r)


def pair_observables(rho12):
    """Pauli expectations <sigma^j (x) sigma^k> of a two-site matrix, plus <sigma^z_0>."""
    out = {}
    for name in ("xx", "yy", "zz", "xy", "yx", "xz", "zx", "yz", "zy"):
        op = np.kron(_PAULI[name[0]], _PAULI[name[1]])
        out[name] = float(np.real(np.trace(op @ rho12)))
    out["z"] = float(np.real(np.trace(np.kron(_PAULI["z"], _PAULI["i"]) @ rho12)))
    out["z1"] = float(np.real(np.trace(np.kron(_PAULI["i"], _PAULI["z"]) @ rho12)))
    out["x"] = float(np.real(np.trace(np.kron(_PAULI["x"], _PAULI["i"]) @ rho12)))
    out["y"] = float(np.real(np.trace(np.kron(_PAULI["y"], _PAULI["i"]) @ rho12)))
    return out


def exact_diag_reference(n_sites, gamma, a, temperature: Temperature, t):
    """Correlators, two-site RDM and log-negativity from brute force.

    Returns a dict with keys ``correlators`` (CorrelatorSet), ``rho12``,
    ``pauli`` (all two-site Pauli expectations), ``log_negativity`` and
    ``min_pt_eigenvalue``.
    """
    from ..correlators import CorrelatorSet
    from ..entanglement import negativity

    if n_sites > MAX_SITES:
        raise TooLarge(f"exact diagonalization limited to N <= {MAX_SITES}, got {n_sites}")
    if n_sites < 2:
        raise BadSize("need at least two sites")
    rho0 = initial_state(n_sites, gamma, a, temperature)
    rho_t = evolve(rho0, n_sites, gamma, t)
    rho12 = reduce_to_pair(rho_t, n_sites)
    pauli = pair_observables(rho12)
    ent = negativity(rho12)
    return {
        "correlators": CorrelatorSet.from_pauli(pauli),
        "rho12": rho12,
        "pauli": pauli,
        "log_negativity": ent.log_negativity,
        "min_pt_eigenvalue": ent.min_pt_eigenvalue,
        "energy": float(np.real(np.trace(rho_t @ spin_hamiltonian(n_sites, gamma, 0.0)))),
    }
