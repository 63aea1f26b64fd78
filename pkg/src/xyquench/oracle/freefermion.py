"""Finite-ring free-fermion (Majorana covariance) simulator.

Jordan-Wigner convention, sites j = 0..N-1 with Majoranas x_j = c_{2j}, y_j = c_{2j+1}:

    c_{2j}   = (prod_{l<j} sigma^z_l) sigma^x_j
    c_{2j+1} = (prod_{l<j} sigma^z_l) sigma^y_j

so that sigma^z_j = -i x_j y_j, sigma^x_j sigma^x_{j+1} = -i y_j x_{j+1},
sigma^y_j sigma^y_{j+1} = i x_j y_{j+1}.  The spin ring maps onto two quadratic
forms, one per eigenvalue s of the parity P = prod_j sigma^z_j; the wrap-around
bond carries a factor -s (s = +1: antiperiodic fermions, s = -1: periodic).

Quadratic forms are stored as H = (i/4) sum_mn A_mn c_m c_n with A real and
antisymmetric.  Heisenberg evolution is c(t) = exp(A t) c.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from ..errors import BadSize, DimensionMismatch
from ..model import Temperature
from .majorana import canonical_word, parity_word, word_expectation

SECTORS = {"even": 1, "odd": -1, 1: 1, -1: -1}

# Pauli observables on sites (0, 1) as (coefficient, Majorana word).
NN_OBSERVABLES = {
    "z": (-1j, (0, 1)),
    "xx": (-1j, (1, 2)),
    "yy": (1j, (0, 3)),
    "xy": (-1j, (1, 3)),
    "yx": (1j, (0, 2)),
    "zz": (-1.0, (0, 1, 2, 3)),
}


@dataclass(frozen=True)
class QuadraticForm:
    n_sites: int
    gamma: float
    h: float
    sector: int
    generator: np.ndarray

    @property
    def dim(self):
        return 2 * self.n_sites


@dataclass(frozen=True)
class CovarianceState:
    matrix: np.ndarray

    @property
    def n_sites(self):
        return self.matrix.shape[0] // 2

    def spectral_radius(self):
        return float(np.max(np.abs(np.linalg.eigvalsh(1j * self.matrix))))


def _bond_blocks(gamma, h):
    """On-site and nearest-neighbour 2x2 blocks of the generator (cell j -> j+1)."""
    onsite = np.array([[0.0, h], [-h, 0.0]])
    hop = np.array([[0.0, (1.0 - gamma) / 2.0], [-(1.0 + gamma) / 2.0, 0.0]])
    return onsite, hop


def build_quadratic_form(n_sites, gamma, h, sector="even") -> QuadraticForm:
    if n_sites < 4 or n_sites % 2:
        raise BadSize(f"ring size must be even and >= 4, got {n_sites}")
    try:
        s = SECTORS[sector]
    except KeyError:
        raise ValueError(f"unknown parity sector {sector!r}") from None
    onsite, hop = _bond_blocks(gamma, h)
    a = np.zeros((2 * n_sites, 2 * n_sites))
    for j in range(n_sites):
        a[2 * j:2 * j + 2, 2 * j:2 * j + 2] = onsite
        k = (j + 1) % n_sites
        sign = -s if k == 0 else 1.0
        a[2 * j:2 * j + 2, 2 * k:2 * k + 2] += sign * hop
        a[2 * k:2 * k + 2, 2 * j:2 * j + 2] -= sign * hop.T
    return QuadraticForm(n_sites, float(gamma), float(h), s, a)


def normal_form(generator, zero_tol=1e-10):
    """Orthogonal W and energies eps >= 0 with A = W^T (+)_k [[0, eps_k], [-eps_k, 0]] W."""
    n2 = generator.shape[0]
    lam, vec = np.linalg.eigh(1j * generator)
    pos = lam > zero_tol
    rows = []
    eps = []
    for e, v in zip(lam[pos], vec[:, pos].T):
        rows.append(np.sqrt(2.0) * v.imag)
        rows.append(np.sqrt(2.0) * v.real)
        eps.append(e)
    n_zero = n2 - 2 * int(pos.sum())
    if n_zero:
        z = np.abs(lam) <= zero_tol
        cand = np.concatenate([vec[:, z].real, vec[:, z].imag], axis=1)
        u, sv, _ = np.linalg.svd(cand, full_matrices=False)
        basis = u[:, :n_zero]
        for i in range(n_zero):
            rows.append(basis[:, i])
        eps.extend([0.0] * (n_zero // 2))
    w = np.array(rows)
    return w, np.array(eps)


def _blocks(values):
    """Block-diagonal antisymmetric matrix (+)_k [[0, v_k], [-v_k, 0]]."""
    n = len(values)
    d = np.zeros((2 * n, 2 * n))
    idx = np.arange(n)
    d[2 * idx, 2 * idx + 1] = values
    d[2 * idx + 1, 2 * idx] = -np.asarray(values)
    return d


def thermal_covariance(q: QuadraticForm, temperature: Temperature) -> CovarianceState:
    """Gibbs state of the quadratic form over the full fermionic Fock space.

    Mode occupations give <i b'_k b''_k> = -tanh(beta eps_k / 2); at zero
    temperature the tanh becomes 1 for eps_k > 0 and 0 for exact zero modes.
    """
    w, eps = normal_form(q.generator)
    if temperature.is_zero:
        tau = (eps > 0).astype(float)
    else:
        tau = np.tanh(0.5 * temperature.beta * eps)
    return CovarianceState(w.T @ _blocks(-tau) @ w)


def propagator(q: QuadraticForm, t):
    return expm(q.generator * t)


def evolve_covariance(state: CovarianceState, q0: QuadraticForm, t) -> CovarianceState:
    if state.matrix.shape[0] != q0.dim:
        raise DimensionMismatch(
            f"state has {state.n_sites} sites, Hamiltonian has {q0.n_sites}"
        )
    if t == 0:
        return state
    r = propagator(q0, t)
    return CovarianceState(r @ state.matrix @ r.T)


def gaussian_energy(state: CovarianceState, q: QuadraticForm):
    """<H> = (i/4) sum A_mn <c_m c_n> = (1/4) sum A_mn Gamma_mn."""
    return 0.25 * float(np.sum(q.generator * state.matrix))


def nn_expectations(gamma_matrix, parity_twist=False):
    """Expectations of the nearest-neighbour Pauli observables on sites (0, 1).

    With ``parity_twist`` each observable O is replaced by P O.
    """
    out = {}
    n = gamma_matrix.shape[0] // 2
    pc, pw = parity_word(n)
    for name, (coef, word) in NN_OBSERVABLES.items():
        if parity_twist:
            val = pc * coef * word_expectation(gamma_matrix, pw + word)
        else:
            val = coef * word_expectation(gamma_matrix, word)
        out[name] = val
    return out


def covariance_observables(state: CovarianceState):
    """CorrelatorSet of a Gaussian state, read off sites (0, 1)."""
    from ..correlators import CorrelatorSet

    g = state.matrix
    if g.shape[0] < 4:
        raise BadSize("need at least two sites")
    sub = g[:4, :4]
    return CorrelatorSet.from_pauli(_real(_nn_from_sub(sub)))


def _nn_from_sub(sub):
    out = {}
    for name, (coef, word) in NN_OBSERVABLES.items():
        out[name] = coef * word_expectation(sub, word)
    return out


def _real(values, tol=1e-9):
    res = {}
    for k, v in values.items():
        v = complex(v)
        if abs(v.imag) > tol:
            raise ArithmeticError(f"observable {k} has imaginary part {v.imag:.3e}")
        res[k] = v.real
    return res


# ---------------------------------------------------------------------------
# exact spin-ring state: both parity sectors, projected


def _parity_of(w, u):
    """Parity <P> of the Fock state with mode signs u (+1 empty, -1 occupied)."""
    return float(np.sign(np.linalg.det(w))) * float(np.prod(u))


def ring_observables(n_sites, gamma, a, temperature: Temperature, t, degeneracy_tol=1e-9):
    """Nearest-neighbour Pauli expectations of the quenched spin ring, exactly.

    The spin ring state is sum_s P_s exp(-beta H_s) P_s / Z with P_s = (1 + s P)/2.
    Each sector contributes Z_s [<O>_s + s <P O>_s] / 2 where <.>_s is the
    unprojected Gaussian expectation; P O is a long Majorana word evaluated with
    a Pfaffian, so this path is meant for small rings.
    """
    parts = []
    for s in (1, -1):
        qa = build_quadratic_form(n_sites, gamma, a, s)
        q0 = build_quadratic_form(n_sites, gamma, 0.0, s)
        w, eps = normal_form(qa.generator)
        parts.append((s, qa, q0, w, eps))

    if temperature.is_zero:
        return _ring_ground(parts, n_sites, t, degeneracy_tol)

    beta = temperature.beta
    log_z = []
    for s, qa, q0, w, eps in parts:
        x = 0.5 * beta * eps
        log_z.append(float(np.sum(x + np.log1p(np.exp(-2 * x)))))
    ref = max(log_z)
    num = {k: 0j for k in NN_OBSERVABLES}
    den = 0j
    for (s, qa, q0, w, eps), lz in zip(parts, log_z):
        weight = np.exp(lz - ref)
        tau = np.tanh(0.5 * beta * eps)
        g0 = w.T @ _blocks(-tau) @ w
        pc, pw = parity_word(n_sites)
        p_exp = pc * word_expectation(g0, pw)
        gt = evolve_covariance(CovarianceState(g0), q0, t).matrix
        plain = nn_expectations(gt)
        twisted = nn_expectations(gt, parity_twist=True)
        for k in num:
            num[k] += weight * (plain[k] + s * twisted[k])
        den += weight * (1 + s * p_exp)
    return _real({k: v / den for k, v in num.items()})


def _ring_ground(parts, n_sites, t, tol):
    candidates = []
    for s, qa, q0, w, eps in parts:
        nmodes = len(eps)
        base = -0.5 * float(np.sum(eps))
        u = np.ones(nmodes)
        if _parity_of(w, u) == s:
            candidates.append((base, s, q0, w, u))
        else:
            for k in range(nmodes):
                uk = u.copy()
                uk[k] = -1.0
                candidates.append((base + eps[k], s, q0, w, uk))
    e_min = min(c[0] for c in candidates)
    chosen = [c for c in candidates if c[0] <= e_min + tol * max(1.0, abs(e_min))]
    acc = {k: 0j for k in NN_OBSERVABLES}
    for _, s, q0, w, u in chosen:
        g0 = w.T @ _blocks(-u) @ w
        gt = evolve_covariance(CovarianceState(g0), q0, t).matrix
        vals = nn_expectations(gt)
        for k in acc:
            acc[k] += vals[k] / len(chosen)
    return _real(acc)


# ---------------------------------------------------------------------------
# momentum-space path for large rings (single sector, unprojected)


def sector_momenta(n_sites, sector="even"):
    s = SECTORS[sector]
    m = np.arange(n_sites)
    if s == 1:
        return np.pi * (2 * m + 1) / n_sites
    return 2 * np.pi * m / n_sites


def generator_symbol(gamma, h, phi):
    """Fourier symbol A(phi) = A_0 + A_+ e^{i phi} + A_- e^{-i phi}, shape (len(phi), 2, 2)."""
    onsite, hop = _bond_blocks(gamma, h)
    e = np.exp(1j * np.asarray(phi))[:, None, None]
    return onsite[None] + hop[None] * e - hop.T[None] / e


def momentum_covariance_blocks(n_sites, gamma, a, temperature: Temperature, t, sector="even",
                               separations=(0, 1)):
    """Covariance blocks Gamma_{j, j+d} of the quenched Gaussian state.

    Translation invariance reduces every matrix function to 2x2 symbols, so the
    cost is O(N) per time point.
    """
    phi = sector_momenta(n_sites, sector)
    ha = 1j * generator_symbol(gamma, a, phi)
    lam, vec = np.linalg.eigh(ha)
    if temperature.is_zero:
        f = np.where(lam > 1e-12, 1.0, np.where(lam < -1e-12, -1.0, 0.0))
    else:
        f = np.tanh(0.5 * temperature.beta * lam)
    g = 1j * np.einsum("nij,nj,nkj->nik", vec, f, vec.conj())
    if t != 0:
        h0 = 1j * generator_symbol(gamma, 0.0, phi)
        lam0, vec0 = np.linalg.eigh(h0)
        # exp(A t) = exp(-i (iA) t)
        r = np.einsum("nij,nj,nkj->nik", vec0, np.exp(-1j * lam0 * t), vec0.conj())
        g = r @ g @ np.conj(np.transpose(r, (0, 2, 1)))
    out = {}
    for d in separations:
        blk = np.einsum("nij,n->ij", g, np.exp(-1j * phi * d)) / n_sites
        out[d] = blk
    return out


def momentum_observables(n_sites, gamma, a, temperature: Temperature, t, sector="even"):
    """Nearest-neighbour Pauli expectations from the momentum-space path."""
    b = momentum_covariance_blocks(n_sites, gamma, a, temperature, t, sector)
    b0 = b[0].real
    b1 = b[1].real
    sub = np.block([[b0, b1], [-b1.T, b0]])
    return _real(_nn_from_sub(sub))


def observables_to_correlators(values):
    from ..correlators import CorrelatorSet

    return CorrelatorSet.from_pauli(values)


def free_fermion_correlators(n_sites, gamma, a, temperature: Temperature, t, projection="auto"):
    """CorrelatorSet of the quenched ring of ``n_sites``.

    ``projection``: ``"exact"`` keeps both parity sectors (small rings),
    ``"even"`` uses the unprojected antiperiodic sector via momentum space,
    ``"auto"`` picks exact for N <= 16.
    """
    if projection == "auto":
        projection = "exact" if n_sites <= 16 else "even"
    if projection == "exact":
        vals = ring_observables(n_sites, gamma, a, temperature, t)
    elif projection == "even":
        vals = momentum_observables(n_sites, gamma, a, temperature, t, "even")
    else:
        raise ValueError(f"unknown projection {projection!r}")
    return observables_to_correlators(vals)


__all__ = [
    "QuadraticForm",
    "CovarianceState",
    "build_quadratic_form",
    "normal_form",
    "thermal_covariance",
    "evolve_covariance",
    "gaussian_energy",
    "covariance_observables",
    "ring_observables",
    "momentum_observables",
    "momentum_covariance_blocks",
    "free_fermion_correlators",
    "canonical_word",
]
