"""Magnetization and nearest-neighbour correlators of the quenched infinite chain.

Every quantity is a single integral over phi in [0, pi] with the common weight

    W(phi) = tanh(beta Lambda(a) / 2) / (Lambda(a) Lambda(0)^2)

and oscillating factors cos(2 Lambda(0) t), sin(2 Lambda(0) t).

Sign convention.  The integrals G(R, t) and sigma(t) are the textbook ones for
the chain with couplings -(1 +/- gamma).  For the couplings +(1 +/- gamma)
used here, rotating every second spin by pi about z flips the sign of
S^x S^x, S^y S^y and S^x S^y on a bond and leaves S^z untouched, so

    t_xx = G(-1, t),   t_yy = G(1, t),   t_xy = -sigma(t),
    t_zz = 4 m_z^2 - G(1, t) G(-1, t) + sigma(t)^2.

The finite-ring simulator in :mod:`xyquench.oracle` fixes these signs
independently; entanglement is unchanged by the local rotation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import NonConvergence
from .model import ModelParams, dispersion, thermal_weight
from .quadrature import DEFAULT_ABS_TOL, integrate

BOND_SIGN = -1.0  # antiferromagnetic sign of the couplings relative to the G/sigma integrals


@dataclass(frozen=True)
class CorrelatorSet:
    """Magnetization and the nonvanishing nearest-neighbour correlators.

    ``m_z`` is in spin units (|m_z| <= 1/2); the ``t_jk`` are
    <sigma^j sigma^k> = 4 <S^j S^k>.
    """

    m_z: float
    g_plus: float
    g_minus: float
    sigma: float
    t_xx: float
    t_yy: float
    t_zz: float
    t_xy: float

    @classmethod
    def assemble(cls, m_z, g_plus, g_minus, sigma):
        return cls(
            m_z=m_z,
            g_plus=g_plus,
            g_minus=g_minus,
            sigma=sigma,
            t_xx=-BOND_SIGN * g_minus,
            t_yy=-BOND_SIGN * g_plus,
            t_zz=4.0 * m_z * m_z - g_plus * g_minus + sigma * sigma,
            t_xy=BOND_SIGN * sigma,
        )

    @classmethod
    def from_pauli(cls, values):
        """Build from Pauli expectations {'z', 'xx', 'yy', 'zz', 'xy'} on a bond."""
        return cls(
            m_z=0.5 * values["z"],
            g_plus=-BOND_SIGN * values["yy"],
            g_minus=-BOND_SIGN * values["xx"],
            sigma=BOND_SIGN * values["xy"],
            t_xx=values["xx"],
            t_yy=values["yy"],
            t_zz=values["zz"],
            t_xy=values["xy"],
        )

    @classmethod
    def zero(cls):
        return cls(*([0.0] * 8))

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def max_abs_diff(self, other):
        return max(abs(getattr(self, f.name) - getattr(other, f.name)) for f in fields(self))


def _common(params: ModelParams, phi):
    g = params.gamma
    lam_a = dispersion(params.field_a, g, phi)
    lam_0 = dispersion(0.0, g, phi)
    weight = thermal_weight(params.temperature, lam_a) / lam_a
    return lam_a, lam_0, weight


def magnetization_integrand(params: ModelParams):
    g2 = params.gamma ** 2
    a = params.field_a
    t = params.time_t

    def f(phi):
        lam_a, lam_0, w = _common(params, phi)
        s2 = np.sin(phi) ** 2
        c = np.cos(phi)
        brace = np.cos(2 * lam_0 * t) * g2 * a * s2 - c * ((c - a) * c + g2 * s2)
        return w / (lam_0 * lam_0) * brace / (2 * math.pi)

    return f


def g_integrands(params: ModelParams, r: int):
    """The two pieces (sine part, cosine part) of G(R, t); G = first - second."""
    if r not in (1, -1):
        raise ValueError("R must be +1 or -1")
    g = params.gamma
    g2 = g * g
    a = params.field_a
    t = params.time_t

    def first(phi):
        lam_a, lam_0, w = _common(params, phi)
        s = np.sin(phi)
        c = np.cos(phi)
        bracket = g2 * s * s + (c - a) * c + a * c * np.cos(2 * lam_0 * t)
        return g / math.pi * np.sin(r * phi) * s * w / (lam_0 * lam_0) * bracket

    def second(phi):
        lam_a, lam_0, w = _common(params, phi)
        s2 = np.sin(phi) ** 2
        c = np.cos(phi)
        bracket = (g2 * s2 + (c - a) * c) * c - a * g2 * s2 * np.cos(2 * lam_0 * t)
        return np.cos(r * phi) / math.pi * w / (lam_0 * lam_0) * bracket

    return first, second


def g_integrand(params: ModelParams, r: int):
    first, second = g_integrands(params, r)
    return lambda phi: first(phi) - second(phi)


def sigma_integrand(params: ModelParams, thermal=True):
    """Integrand of sigma(t), where S(1, t) = i sigma(t).

    Carries the same thermal factor tanh(beta Lambda(a)/2) as the other
    correlators, so sigma vanishes in the infinite-temperature limit.
    ``thermal=False`` drops that factor (the zero-temperature sigma at every
    beta); this variant is not a physical state of the chain and exists only to
    reproduce curves computed that way.
    """
    g = params.gamma
    a = params.field_a
    t = params.time_t

    def f(phi):
        lam_a, lam_0, w = _common(params, phi)
        if not thermal:
            w = 1.0 / lam_a
        return g * a / math.pi * np.sin(phi) ** 2 * w * np.sin(2 * t * lam_0) / lam_0

    return f


def _quad(f, params, abs_tol, label):
    try:
        return integrate(f, abs_tol=abs_tol, osc_scale=2.0 * params.time_t, label=label).value
    except NonConvergence as exc:
        exc.label = label
        raise


def magnetization(params: ModelParams, abs_tol=DEFAULT_ABS_TOL) -> float:
    return _quad(magnetization_integrand(params), params, abs_tol, "m_z")


def g_correlator(params: ModelParams, r: int, abs_tol=DEFAULT_ABS_TOL) -> float:
    return _quad(g_integrand(params, r), params, abs_tol, f"G({r:+d})")


def s_correlator(params: ModelParams, abs_tol=DEFAULT_ABS_TOL, thermal=True) -> float:
    return _quad(sigma_integrand(params, thermal), params, abs_tol, "sigma")


def correlator_set(params: ModelParams, abs_tol=DEFAULT_ABS_TOL, sigma_thermal=True) -> CorrelatorSet:
    """All four integrals at ``abs_tol``; NonConvergence carries the failing label."""
    m = magnetization(params, abs_tol)
    gp = g_correlator(params, 1, abs_tol)
    gm = g_correlator(params, -1, abs_tol)
    s = s_correlator(params, abs_tol, thermal=sigma_thermal)
    return CorrelatorSet.assemble(m, gp, gm, s)
