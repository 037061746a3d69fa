"""Physical parameters and radial potential models.

Natural units throughout: energies in GeV, lengths in GeV^-1, ``hbar = 1``
unless overridden.  Every potential is a frozen dataclass; the union of them
is :data:`PotentialSpec`.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Union

import numpy as np
from scipy.interpolate import PchipInterpolator


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class UnsupportedSpecError(TypeError):
    """Operation not defined for the given potential variant."""


def reduced_mass(m_q: float, m_qbar: float) -> float:
    if m_q <= 0 or m_qbar <= 0:
        raise DomainError(f"masses must be positive, got {m_q}, {m_qbar}")
    if math.isinf(m_qbar):
        return float(m_q)
    if math.isinf(m_q):
        return float(m_qbar)
    return m_q * m_qbar / (m_q + m_qbar)


@dataclass(frozen=True)
class QuarkoniumParams:
    """Inputs of the Cornell + spin-spin model.

    ``b`` may take any real value; bound states are only guaranteed for
    ``b > 0``.
    """

    alpha_s: float
    b: float
    sigma: float
    m_q: float
    m_qbar: float
    s: int = 0
    hbar: float = 1.0

    def __post_init__(self):
        if not self.alpha_s > 0:
            raise DomainError(f"alpha_s must be positive, got {self.alpha_s}")
        if not self.sigma >= 0:
            raise DomainError(f"sigma must be non-negative, got {self.sigma}")
        if not (self.m_q > 0 and self.m_qbar > 0):
            raise DomainError("quark masses must be positive")
        if not self.hbar > 0:
            raise DomainError(f"hbar must be positive, got {self.hbar}")
        if isinstance(self.s, bool) or int(self.s) != self.s or self.s not in (0, 1):
            raise DomainError(f"spin must be 0 or 1, got {self.s!r}")
        if not math.isfinite(self.b):
            raise DomainError("string tension must be finite")
        object.__setattr__(self, "s", int(self.s))

    @property
    def mu(self) -> float:
        return reduced_mass(self.m_q, self.m_qbar)

    @property
    def c_s(self) -> float:
        return spin_coupling(self)

    @property
    def kinetic_scale(self) -> float:
        """``hbar^2 / (2 mu)``."""
        return self.hbar**2 / (2.0 * self.mu)

    def replace(self, **changes) -> "QuarkoniumParams":
        data = asdict(self)
        data.update(changes)
        return QuarkoniumParams(**data)

    @classmethod
    def for_reduced_mass(cls, mu: float, hbar: float = 1.0, **kw) -> "QuarkoniumParams":
        """Kinematic context with equal masses ``2*mu`` (for model-free oracles)."""
        kw.setdefault("alpha_s", 1.0)
        kw.setdefault("b", 0.0)
        kw.setdefault("sigma", 0.0)
        return cls(m_q=2.0 * mu, m_qbar=2.0 * mu, hbar=hbar, **kw)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "QuarkoniumParams":
        required = {"alpha_s", "b", "sigma", "m_q", "m_qbar", "s"}
        allowed = required | {"hbar"}
        keys = set(data)
        if not required <= keys or not keys <= allowed:
            raise ValueError(
                f"params object needs keys {sorted(required)} (+ optional hbar), got {sorted(keys)}"
            )
        kw = {k: float(data[k]) for k in allowed - {"s"} if k in data}
        s = data["s"]
        if isinstance(s, bool) or not isinstance(s, (int, float)) or int(s) != s:
            raise DomainError(f"spin must be an integer, got {s!r}")
        return cls(s=int(s), **kw)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "QuarkoniumParams":
        return cls.from_dict(json.loads(text))


def spin_factor(s: int) -> float:
    return s * (s + 1) - 1.5


def spin_coupling(params: QuarkoniumParams) -> float:
    """Amplitude of the Gaussian hyperfine term."""
    p = params
    return (
        16.0 * p.alpha_s * math.pi * (p.sigma / math.sqrt(math.pi)) ** 3
        * spin_factor(p.s) / (9.0 * p.m_q * p.m_qbar)
    )


# -- potential variants ------------------------------------------------------


@dataclass(frozen=True)
class CornellSpin:
    """-4 alpha_s/(3r) + b r + C_s exp(-sigma^2 r^2)"""

    params: QuarkoniumParams


@dataclass(frozen=True)
class TruncatedOEA:
    """Gaussian replaced by its quadratic Taylor polynomial."""

    params: QuarkoniumParams


@dataclass(frozen=True)
class KratzerEffective:
    """(hbar^2/2mu) (A/r^2 - B/r); ``A`` already holds the centrifugal part."""

    A: float
    B: float


@dataclass(frozen=True)
class Coulomb:
    k: float


@dataclass(frozen=True)
class Oscillator:
    omega: float


@dataclass(frozen=True)
class Tabulated:
    r: tuple
    values: tuple
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size < 2:
            raise DomainError("tabulated potential needs matching 1-D samples (>= 2)")
        if r[0] <= 0 or np.any(np.diff(r) <= 0):
            raise DomainError("sample radii must be positive and strictly increasing")
        if not np.all(np.isfinite(v)):
            raise DomainError("tabulated values must be finite")
        object.__setattr__(self, "r", tuple(r.tolist()))
        object.__setattr__(self, "values", tuple(v.tolist()))
        object.__setattr__(self, "_interp", PchipInterpolator(r, v, extrapolate=False))

    @property
    def r_range(self) -> tuple[float, float]:
        return self.r[0], self.r[-1]


PotentialSpec = Union[CornellSpin, TruncatedOEA, KratzerEffective, Coulomb, Oscillator, Tabulated]


def _coulomb_strength(p: QuarkoniumParams) -> float:
    return 4.0 * p.alpha_s / 3.0


def _context(spec, params):
    if params is None:
        raise DomainError(f"{type(spec).__name__} needs a kinematic context (params)")
    return params


def evaluate_potential(spec: PotentialSpec, r, params: QuarkoniumParams | None = None):
    """Evaluate ``spec`` at ``r`` (scalar or array, all ``r > 0``).

    ``params`` supplies ``mu`` and ``hbar`` for the variants defined in
    kinetic units (oscillator, Kratzer); the Cornell variants carry their own.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(~(r_arr > 0)):
        raise DomainError("potential is defined for r > 0 only")
    out = _evaluate(spec, r_arr, params)
    return float(out) if np.ndim(out) == 0 else out


def _evaluate(spec, r, params):
    if isinstance(spec, CornellSpin):
        p = spec.params
        return -_coulomb_strength(p) / r + p.b * r + p.c_s * np.exp(-(p.sigma * r) ** 2)
    if isinstance(spec, TruncatedOEA):
        p = spec.params
        c_s = p.c_s
        return c_s - _coulomb_strength(p) / r + p.b * r - c_s * p.sigma**2 * r**2
    if isinstance(spec, Coulomb):
        return -spec.k / r
    if isinstance(spec, Oscillator):
        mu = _context(spec, params).mu
        return 0.5 * mu * spec.omega**2 * r**2
    if isinstance(spec, KratzerEffective):
        scale = _context(spec, params).kinetic_scale
        return scale * (spec.A / r**2 - spec.B / r)
    if isinstance(spec, Tabulated):
        lo, hi = spec.r_range
        if np.any(r < lo) or np.any(r > hi):
            raise DomainError(f"r outside tabulated range [{lo}, {hi}]")
        return spec._interp(r)
    raise UnsupportedSpecError(f"unknown potential variant {type(spec).__name__}")


def laurent_coefficients(spec: PotentialSpec, params: QuarkoniumParams | None = None):
    """Small-r expansion ``V = sum_k v[k] r^k`` for k = -2..4, or None.

    Returned as a dict; used to start the outward integration on the
    regular branch.  Tabulated data has no expansion.
    """
    v = dict.fromkeys(range(-2, 5), 0.0)
    if isinstance(spec, (CornellSpin, TruncatedOEA)):
        p = spec.params
        c_s, s2 = p.c_s, p.sigma**2
        v[-1] = -_coulomb_strength(p)
        v[0] = c_s
        v[1] = p.b
        v[2] = -c_s * s2
        if isinstance(spec, CornellSpin):
            v[4] = 0.5 * c_s * s2 * s2
        return v
    if isinstance(spec, Coulomb):
        v[-1] = -spec.k
        return v
    if isinstance(spec, Oscillator):
        v[2] = 0.5 * _context(spec, params).mu * spec.omega**2
        return v
    if isinstance(spec, KratzerEffective):
        scale = _context(spec, params).kinetic_scale
        v[-2] = scale * spec.A
        v[-1] = -scale * spec.B
        return v
    if isinstance(spec, Tabulated):
        return None
    raise UnsupportedSpecError(f"unknown potential variant {type(spec).__name__}")


@dataclass(frozen=True)
class Feasibility:
    bounded_below: bool
    confining: bool
    reason: str


def boundedness_check(spec: PotentialSpec) -> Feasibility:
    if isinstance(spec, TruncatedOEA):
        p = spec.params
        curvature = p.c_s * p.sigma**2
        if curvature > 0:
            return Feasibility(
                False, False,
                f"-C_s sigma^2 r^2 with C_s sigma^2 = {curvature:.6g} > 0 makes the "
                "truncated potential unbounded from below (no bound states)",
            )
        if curvature < 0:
            return Feasibility(True, True, "positive quadratic term confines")
        if p.b > 0:
            return Feasibility(True, True, "sigma = 0: linear term confines")
        if p.b < 0:
            return Feasibility(False, False, "negative string tension: unbounded from below")
        return Feasibility(True, False, "Coulomb-like, bound states below 0")
    if isinstance(spec, CornellSpin):
        b = spec.params.b
        if b > 0:
            return Feasibility(True, True, "linear term b r dominates at large r")
        if b < 0:
            return Feasibility(False, False, "negative string tension: unbounded from below")
        return Feasibility(True, False, "b = 0: Coulomb-like, bound states below 0")
    raise UnsupportedSpecError(
        f"boundedness_check supports CornellSpin and TruncatedOEA, not {type(spec).__name__}"
    )
