"""Least-squares fits of model parameters to meson masses.

Masses are ``m_q + m_qbar + E(n_r, l, s)`` with ``E`` from one of three
backends.  Minimization is a deterministic Nelder-Mead simplex on the free
parameters; no gradients are needed, which matters because the shooting
solver has none to offer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .approximation import DEFAULT_DELTA, assemble_kratzer, q_transform
from .closed_form import oea_gammas, oea_spectrum
from .model import CornellSpin, DomainError, QuarkoniumParams, TruncatedOEA
from .numerov import NoBoundStateError, SolverConfig, SolverError, find_eigenvalue

BACKENDS = ("cornell-numerov", "truncated-numerov", "oea-closed-form")
FIT_PARAMETERS = ("alpha_s", "b", "sigma", "m_q", "m_qbar")


class FitInputError(ValueError):
    pass


class InfeasibleStartError(ValueError):
    pass


@dataclass(frozen=True)
class MesonObservation:
    label: str
    n_r: int
    l: int
    s: int
    mass: float
    weight: float = 1.0

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError(f"{self.label}: mass must be positive")
        if min(self.n_r, self.l, self.s) < 0:
            raise DomainError(f"{self.label}: quantum numbers must be non-negative")
        if not self.weight >= 0:
            raise DomainError(f"{self.label}: weight must be non-negative")


def load_observations(text: str) -> list[MesonObservation]:
    data = json.loads(text)
    if not isinstance(data, list):
        raise FitInputError("observations file must hold a JSON array")
    out = []
    for item in data:
        extra = set(item) - {"label", "n_r", "l", "s", "mass", "weight"}
        if extra:
            raise FitInputError(f"unexpected observation keys {sorted(extra)}")
        out.append(MesonObservation(
            label=str(item["label"]), n_r=int(item["n_r"]), l=int(item["l"]), s=int(item["s"]),
            mass=float(item["mass"]), weight=float(item.get("weight", 1.0)),
        ))
    return out


def dump_observations(observations: Sequence[MesonObservation]) -> str:
    return json.dumps([o.__dict__ for o in observations], indent=2) + "\n"


def binding_energy(params: QuarkoniumParams, backend: str, n_r: int, l: int, s: int,
                   delta: float = DEFAULT_DELTA, config: SolverConfig | None = None) -> float:
    p = params if params.s == s else params.replace(s=s)
    if backend == "cornell-numerov":
        return find_eigenvalue(CornellSpin(p), p, l, n_r, config).energy
    if backend == "truncated-numerov":
        return find_eigenvalue(TruncatedOEA(p), p, l, n_r, config).energy
    if backend == "oea-closed-form":
        g = oea_gammas(assemble_kratzer(q_transform(p, l), delta), p.c_s, p.mu, p.hbar)
        return oea_spectrum(g, p.mu, p.hbar, n_r)
    raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")


def mass_model(params: QuarkoniumParams, backend: str, n_r: int, l: int, s: int,
               delta: float = DEFAULT_DELTA, config: SolverConfig | None = None) -> float:
    return params.m_q + params.m_qbar + binding_energy(params, backend, n_r, l, s, delta, config)


# -- simplex ------------------------------------------------------------------


@dataclass
class SimplexResult:
    x: np.ndarray
    fun: float
    iterations: int
    converged: bool
    trace: list[float]


def nelder_mead(fun: Callable[[np.ndarray], float], x0, steps, xtol: float = 1e-6,
                max_iter: int = 500) -> SimplexResult:
    """Minimize ``fun`` from ``x0``; vertex ``i`` starts at ``x0 + steps[i] e_i``.

    Stops once every vertex lies within ``xtol`` of the best one, relative
    to the magnitude of each coordinate (absolute below 1).
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    simplex = [x0.copy()]
    for i in range(n):
        v = x0.copy()
        v[i] += steps[i]
        simplex.append(v)
    values = [fun(v) for v in simplex]
    trace: list[float] = []

    def diameter():
        best = simplex[0]
        scale = np.maximum(np.abs(best), 1.0)
        return max(float(np.max(np.abs(v - best) / scale)) for v in simplex[1:])

    it = 0
    converged = False
    while True:
        order = sorted(range(n + 1), key=lambda k: values[k])
        simplex = [simplex[k] for k in order]
        values = [values[k] for k in order]
        trace.append(values[0])
        if diameter() < xtol:
            converged = True
            break
        if it >= max_iter:
            break
        it += 1
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = centroid + (centroid - worst)
        fr = fun(xr)
        if values[0] <= fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[0]:
            xe = centroid + 2.0 * (centroid - worst)
            fe = fun(xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = centroid + 0.5 * (xr - centroid)
            fc = fun(xc)
            if fc <= fr:
                simplex[-1], values[-1] = xc, fc
                continue
        else:
            xc = centroid + 0.5 * (worst - centroid)
            fc = fun(xc)
            if fc < values[-1]:
                simplex[-1], values[-1] = xc, fc
                continue
        best = simplex[0]
        for k in range(1, n + 1):
            simplex[k] = best + 0.5 * (simplex[k] - best)
            values[k] = fun(simplex[k])
    return SimplexResult(simplex[0], values[0], it, converged, trace)


# -- fitting -------------------------------------------------------------------


@dataclass(frozen=True)
class FitConfig:
    backend: str = "oea-closed-form"
    delta: float = DEFAULT_DELTA
    solver: SolverConfig | None = None
    xtol: float = 1e-6
    max_iter: int = 500


@dataclass
class FitResult:
    params: QuarkoniumParams
    objective: float
    iterations: int
    converged: bool
    residuals: list[dict]
    free: tuple[str, ...]
    underdetermined: bool
    trace: list[float] = field(default_factory=list)

    def to_json(self) -> str:
        doc = {
            "params": self.params.to_dict(),
            "objective": self.objective,
            "iterations": self.iterations,
            "converged": self.converged,
            "free": list(self.free),
            "underdetermined": self.underdetermined,
            "residuals": self.residuals,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _objective_terms(params, observations, cfg):
    terms = []
    for obs in observations:
        model = mass_model(params, cfg.backend, obs.n_r, obs.l, obs.s, cfg.delta, cfg.solver)
        terms.append(obs.weight * (model - obs.mass) ** 2)
    return math.fsum(terms)


def fit(observations: Sequence[MesonObservation], initial: QuarkoniumParams,
        free: Sequence[str] = ("alpha_s", "b"), config: FitConfig | None = None) -> FitResult:
    """Weighted least-squares fit of the ``free`` parameters."""
    cfg = config or FitConfig()
    if cfg.backend not in BACKENDS:
        raise ValueError(f"unknown backend {cfg.backend!r}; choose from {BACKENDS}")
    if not observations:
        raise FitInputError("at least one observation is required")
    free = tuple(free)
    bad = [name for name in free if name not in FIT_PARAMETERS]
    if bad or not free or len(set(free)) != len(free):
        raise FitInputError(f"free parameters must be distinct names from {FIT_PARAMETERS}, got {free}")

    base = initial.to_dict()

    def unpack(x):
        d = dict(base)
        d.update({name: float(v) for name, v in zip(free, x)})
        return QuarkoniumParams(**d)

    def objective(x):
        try:
            return _objective_terms(unpack(x), observations, cfg)
        except (DomainError, SolverError, NoBoundStateError, ZeroDivisionError, ValueError):
            return math.inf

    x0 = np.array([base[name] for name in free], dtype=float)
    steps = np.maximum(0.05 * np.abs(x0), 1e-3)
    if all(math.isinf(objective(x0 + dx)) for dx in [np.zeros_like(x0), *np.diag(steps)]):
        raise InfeasibleStartError("objective undefined at every vertex of the initial simplex")

    res = nelder_mead(objective, x0, steps, cfg.xtol, cfg.max_iter)
    best = unpack(res.x)
    residuals = []
    for obs in observations:
        model = mass_model(best, cfg.backend, obs.n_r, obs.l, obs.s, cfg.delta, cfg.solver)
        residuals.append({
            "label": obs.label, "n_r": obs.n_r, "l": obs.l, "s": obs.s,
            "observed": obs.mass, "model": model, "residual": model - obs.mass,
        })
    return FitResult(
        params=best, objective=res.fun, iterations=res.iterations, converged=res.converged,
        residuals=residuals, free=free, underdetermined=len(free) > len(observations),
        trace=res.trace,
    )
