"""Quench parameters, dispersion relation and thermal occupation weight.

The chain Hamiltonian is

    H = sum_i [(1 + gamma) S^x_i S^x_{i+1} + (1 - gamma) S^y_i S^y_{i+1}] - h(t) sum_i S^z_i

with spin-1/2 operators S = sigma / 2, and a step field h(t) = a for t <= 0 and
h(t) = 0 afterwards.  Units: hbar = k_B = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class Temperature:
    """Temperature of the initial Gibbs state.

    ``beta=None`` is the zero-temperature variant (beta -> infinity), kept
    distinct from any finite float so the limit is always taken analytically.
    """

    beta: float | None = None

    def __post_init__(self):
        if self.beta is not None:
            b = float(self.beta)
            if not (b > 0) or math.isinf(b) or math.isnan(b):
                raise ConfigError(f"inverse temperature must be finite and > 0, got {self.beta!r}")
            object.__setattr__(self, "beta", b)

    @classmethod
    def zero(cls) -> "Temperature":
        return cls(None)

    @classmethod
    def finite(cls, beta: float) -> "Temperature":
        return cls(beta)

    @classmethod
    def parse(cls, text) -> "Temperature":
        """Parse a beta value; ``inf`` (any case) maps to :meth:`zero`."""
        if isinstance(text, Temperature):
            return text
        s = str(text).strip().lower()
        if s in ("inf", "+inf", "infinity", "zero", "t0"):
            return cls.zero()
        try:
            b = float(s)
        except ValueError as exc:
            raise ConfigError(f"cannot parse beta {text!r}") from exc
        if math.isinf(b) and b > 0:
            return cls.zero()
        return cls(b)

    @property
    def is_zero(self) -> bool:
        return self.beta is None

    def __str__(self):
        return "inf" if self.beta is None else repr(self.beta)


@dataclass(frozen=True)
class ModelParams:
    gamma: float
    field_a: float
    temperature: Temperature = Temperature.zero()
    time_t: float = 0.0

    def __post_init__(self):
        g, a, t = float(self.gamma), float(self.field_a), float(self.time_t)
        for name, v in (("gamma", g), ("field_a", a), ("time_t", t)):
            if not math.isfinite(v):
                raise ConfigError(f"{name} must be finite, got {v!r}")
        if g == 0.0:
            raise ConfigError(
                "gamma must be nonzero: with zero anisotropy the field term commutes "
                "with the interaction and the quench is trivial"
            )
        if t < 0:
            raise ConfigError(f"time_t must be >= 0, got {t!r}")
        if not isinstance(self.temperature, Temperature):
            object.__setattr__(self, "temperature", Temperature.parse(self.temperature))
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "field_a", a)
        object.__setattr__(self, "time_t", t)

    @property
    def no_quench(self) -> bool:
        """Flag for a = 0: the initial state is already stationary."""
        return self.field_a == 0.0

    @property
    def beta(self) -> float | None:
        return self.temperature.beta

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


def dispersion(h, gamma, phi):
    """Quasiparticle energy sqrt(gamma^2 sin^2 phi + (h - cos phi)^2).

    Works elementwise on arrays.
    """
    s = np.sin(phi)
    d = h - np.cos(phi)
    return np.sqrt(gamma * gamma * s * s + d * d)


def thermal_weight(temperature: Temperature, lambda_a):
    """tanh(beta * Lambda / 2), or exactly 1 at zero temperature."""
    if temperature.is_zero:
        return np.ones_like(np.asarray(lambda_a, dtype=float))[()]
    return np.tanh(0.5 * temperature.beta * np.asarray(lambda_a, dtype=float))[()]
