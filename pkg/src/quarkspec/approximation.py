"""The chain of approximations that turns the Cornell problem into Kratzer's.

Steps, in order:

1. Gaussian truncated at second order (:class:`~quarkspec.model.TruncatedOEA`).
2. ``q = 1/r``, giving ``phi'' + (2/q) phi' + q^-4 (eps + a q - c/q + d/q^2 - L q^2) phi = 0``
   (:func:`q_transform`).
3. ``c/q`` and ``d/q^2`` replaced by quadratics tangent at ``q = delta``
   (:func:`taylor_quadratic`).
4. Powers of ``q`` collected into ``-A q^2 + B q - C`` (:func:`assemble_kratzer`),
   which in ``r`` is the Kratzer-Fues equation.

Each step has a numerical oracle here as well.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .closed_form import KratzerCoefficients, kratzer_levels
from .model import DomainError, QuarkoniumParams, TruncatedOEA, evaluate_potential

DEFAULT_DELTA = 0.7

EXPANSION_HEADER = (
    "q", "exact_inv", "approx_inv", "rel_err_inv", "exact_invsq", "approx_invsq", "rel_err_invsq",
)


@dataclass(frozen=True)
class QTransformCoeffs:
    """Coefficients of the equation in ``q = 1/r``.

    ``eps_factor`` and ``c_s`` define ``eps = eps_factor * (E - c_s)``.
    """

    a: float
    c: float
    d: float
    L: int
    eps_factor: float
    c_s: float

    def epsilon(self, E: float) -> float:
        return self.eps_factor * (E - self.c_s)

    def energy(self, eps: float) -> float:
        return self.c_s + eps / self.eps_factor


def q_transform(params: QuarkoniumParams, l: int) -> QTransformCoeffs:
    if l < 0 or int(l) != l:
        raise DomainError("l must be a non-negative integer")
    K = 2.0 * params.mu / params.hbar**2
    c_s = params.c_s
    return QTransformCoeffs(
        a=K * 4.0 * params.alpha_s / 3.0,
        c=K * params.b,
        d=K * c_s * params.sigma**2,
        L=int(l) * (int(l) + 1),
        eps_factor=K,
        c_s=c_s,
    )


def taylor_quadratic(kind: str, coeff: float, delta: float, q):
    """Second-order expansion of ``coeff/q`` or ``coeff/q^2`` about ``q = delta``.

    Written in ``t = q/delta`` so that ``q = 2 delta`` reproduces ``coeff/delta``
    exactly in floating point.
    """
    if not delta > 0:
        raise DomainError(f"expansion point must be positive, got {delta}")
    t = np.asarray(q, dtype=float) / delta
    if kind == "inverse":
        out = coeff * (3.0 - 3.0 * t + t * t) / delta
    elif kind == "inverse-square":
        out = coeff * (6.0 - 8.0 * t + 3.0 * t * t) / (delta * delta)
    else:
        raise ValueError(f"kind must be 'inverse' or 'inverse-square', got {kind!r}")
    return float(out) if np.ndim(out) == 0 else out


def expansion_error_table(delta: float, q_grid) -> list[tuple[float, ...]]:
    """Rows ``(q, 1/q, approx, rel_err, 1/q^2, approx, rel_err)`` for each grid point."""
    q = np.asarray(q_grid, dtype=float)
    if np.any(~(q > 0)):
        raise DomainError("q values must be positive")
    if not delta > 0:
        raise DomainError(f"expansion point must be positive, got {delta}")
    inv, invsq = 1.0 / q, 1.0 / (q * q)
    a_inv = taylor_quadratic("inverse", 1.0, delta, q)
    a_invsq = taylor_quadratic("inverse-square", 1.0, delta, q)
    rows = zip(q, inv, a_inv, np.abs(a_inv - inv) / inv, invsq, a_invsq, np.abs(a_invsq - invsq) / invsq)
    return [tuple(float(x) for x in row) for row in sorted(rows)]


def expansion_table_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EXPANSION_HEADER)
    for row in rows:
        w.writerow([f"{x:.12g}" for x in row])
    return buf.getvalue()


def assemble_kratzer(coeffs: QTransformCoeffs, delta: float = DEFAULT_DELTA) -> KratzerCoefficients:
    if not delta > 0:
        raise DomainError(f"expansion point must be positive, got {delta}")
    a, c, d = coeffs.a, coeffs.c, coeffs.d
    return KratzerCoefficients(
        A=coeffs.L + c / delta**3 - 3.0 * d / delta**4,
        B=a + 3.0 * c / delta**2 - 8.0 * d / delta**3,
        W=3.0 * c / delta - 6.0 * d / delta**2,
        delta=delta,
    )


# -- residual oracles --------------------------------------------------------


def _derivatives(fn: Callable, x, h: float, order: int):
    """Central differences for f, f', f'' (2nd order, or 4th via 5-point stencils)."""
    x = np.asarray(x, dtype=float)
    f0 = fn(x)
    if order == 2:
        fp, fm = fn(x + h), fn(x - h)
        return f0, (fp - fm) / (2 * h), (fp - 2 * f0 + fm) / (h * h)
    if order == 4:
        fp, fm, fp2, fm2 = fn(x + h), fn(x - h), fn(x + 2 * h), fn(x - 2 * h)
        d1 = (fm2 - 8 * fm + 8 * fp - fp2) / (12 * h)
        d2 = (-fm2 + 16 * fm - 30 * f0 + 16 * fp - fp2) / (12 * h * h)
        return f0, d1, d2
    raise ValueError("order must be 2 or 4")


def radial_residual(params: QuarkoniumParams, l: int, E: float, f: Callable, r, h: float = 1e-4,
                    order: int = 2):
    """``f'' - (2mu/hbar^2)(V_OEA - E) f - l(l+1)/r^2 f`` by finite differences."""
    K = 2.0 * params.mu / params.hbar**2
    r = np.asarray(r, dtype=float)
    f0, _, f2 = _derivatives(f, r, h, order)
    v = evaluate_potential(TruncatedOEA(params), r)
    return f2 - K * (v - E) * f0 - l * (l + 1) / r**2 * f0


def q_residual(coeffs: QTransformCoeffs, eps: float, phi: Callable, q, h: float = 1e-4, order: int = 2):
    """Residual of the transformed equation in ``q``."""
    q = np.asarray(q, dtype=float)
    p0, p1, p2 = _derivatives(phi, q, h, order)
    bracket = eps + coeffs.a * q - coeffs.c / q + coeffs.d / q**2 - coeffs.L * q**2
    return p2 + 2.0 / q * p1 + bracket / q**4 * p0


def residual_oracle(params: QuarkoniumParams, l: int, E: float, test_function: Callable, q_points,
                    h: float = 1e-4, order: int = 2) -> float:
    """Max ``|R_r(1/q) - q^4 R_q(q)|`` for a trial function ``f(r)``.

    The two residuals agree identically when the coefficients of the
    ``q``-equation are right, so the mismatch is pure finite-difference error.
    The ``r``-side step is scaled by ``1/q^2`` so both sides resolve the same
    feature width.
    """
    coeffs = q_transform(params, l)
    q = np.asarray(q_points, dtype=float)
    if np.any(~(q > 0)):
        raise DomainError("q points must be positive")

    def phi(x):
        return test_function(1.0 / x)

    r = 1.0 / q
    r_side = np.array([radial_residual(params, l, E, test_function, ri, h / qi**2, order)
                       for ri, qi in zip(r, q)])
    q_side = q**4 * q_residual(coeffs, coeffs.epsilon(E), phi, q, h, order)
    return float(np.max(np.abs(r_side - q_side)))


def kratzer_q_residual(k: KratzerCoefficients, C: float, phi: Callable, q, h: float = 1e-4, order: int = 2):
    q = np.asarray(q, dtype=float)
    p0, p1, p2 = _derivatives(phi, q, h, order)
    return p2 + 2.0 / q * p1 + (-k.A * q**2 + k.B * q - C) / q**4 * p0


def kratzer_r_residual(k: KratzerCoefficients, C: float, f: Callable, r, h: float = 1e-4, order: int = 2):
    r = np.asarray(r, dtype=float)
    f0, _, f2 = _derivatives(f, r, h, order)
    return f2 + (k.B / r - k.A / r**2 - C) * f0


def back_transform_check(kratzer: KratzerCoefficients, test_function: Callable, r_points,
                         C: float | None = None, h: float = 1e-4, order: int = 2) -> float:
    """Max ``|R_r(r) - q^4 R_q(1/r)|`` between the Kratzer equation in r and in q.

    ``C`` defaults to the ground-state eigen-constant.
    """
    if C is None:
        C = kratzer_levels(kratzer, 0)
    r = np.asarray(r_points, dtype=float)
    if np.any(~(r > 0)):
        raise DomainError("r points must be positive")
    q = 1.0 / r

    def phi(x):
        return test_function(1.0 / x)

    r_side = np.array([kratzer_r_residual(kratzer, C, test_function, ri, h / qi**2, order)
                       for ri, qi in zip(r, q)])
    q_side = q**4 * kratzer_q_residual(kratzer, C, phi, q, h, order)
    return float(np.max(np.abs(r_side - q_side)))
