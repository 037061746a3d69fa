"""Bound states of the reduced radial equation by Numerov shooting.

The equation solved is ``u'' = (2 mu / hbar^2) (V_eff - E) u`` with
``V_eff = V + hbar^2 l(l+1) / (2 mu r^2)`` on a uniform mesh starting at
``r_min``.  Eigenvalues are located by bisection on the node count of the
outward solution, which for a Dirichlet wall at ``r_max`` equals the number
of levels below the trial energy.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from . import _kernels
from .model import (
    Coulomb,
    CornellSpin,
    DomainError,
    KratzerEffective,
    Oscillator,
    QuarkoniumParams,
    Tabulated,
    TruncatedOEA,
    boundedness_check,
    evaluate_potential,
    laurent_coefficients,
)


class SolverError(RuntimeError):
    pass


class NoBoundStateError(SolverError):
    """No normalizable state with the requested node count exists."""


class ConvergenceError(SolverError):
    pass


class FallToCenterError(NoBoundStateError):
    """Attractive 1/r^2 core stronger than -1/4 (in kinetic units)."""


@dataclass(frozen=True)
class SolverConfig:
    """Numerov/shooting settings.

    ``r_max=None`` selects the adaptive outer boundary: ``buffer`` times the
    outer classical turning point for confining potentials, or
    ``max(50/kappa, 20, buffer*r_t)`` below a finite threshold.
    """

    r_min: float = 1e-6
    r_max: float | None = None
    buffer: float = 2.5
    grid_points: int = 20000
    energy_tolerance: float = 1e-10
    max_bisections: int = 200
    energy_bracket: tuple[float, float] | None = None

    def __post_init__(self):
        if not self.r_min > 0:
            raise DomainError("r_min must be positive")
        if self.r_max is not None and not self.r_max > self.r_min:
            raise DomainError("r_max must exceed r_min")
        if self.grid_points < 100:
            raise DomainError("grid_points must be >= 100")
        if not self.energy_tolerance > 0:
            raise DomainError("energy_tolerance must be positive")
        if not self.buffer > 1:
            raise DomainError("buffer factor must exceed 1")
        if self.energy_bracket is not None:
            lo, hi = self.energy_bracket
            if not lo < hi:
                raise DomainError(f"degenerate or inverted energy bracket {self.energy_bracket}")


@dataclass
class NumerovTrial:
    energy: float
    r: np.ndarray
    psi: np.ndarray
    terminal: float
    nodes: int


@dataclass
class Eigensolution:
    n_r: int
    l: int
    s: int
    energy: float
    nodes_observed: int
    converged: bool
    r: np.ndarray = field(repr=False)
    wavefunction: np.ndarray = field(repr=False)
    norm_residual: float
    bisections: int = 0
    bracket: tuple[float, float] = (math.nan, math.nan)

    def to_csv(self) -> str:
        """Two-column ``r,psi`` export."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "psi"])
        for r, p in zip(self.r, self.wavefunction):
            w.writerow([f"{r:.12g}", f"{p:.12g}"])
        return buf.getvalue()


@dataclass
class SpectrumEntry:
    n_r: int
    l: int
    s: int
    energy: float
    nodes: int
    converged: bool
    error: str = ""
    solution: Eigensolution | None = field(default=None, repr=False)


# -- problem setup -----------------------------------------------------------

_SERIES_TERMS = 6
_RESOLUTION = 0.5  # max h*k over the oscillatory region
_TAIL_DECAY = 18.0  # e-folds of amplitude decay required before the outer wall


class _Radial:
    """One (potential, l) channel with its kinematic constants."""

    def __init__(self, spec, params: QuarkoniumParams, l: int, config: SolverConfig):
        if l < 0 or int(l) != l:
            raise DomainError(f"l must be a non-negative integer, got {l}")
        self.spec, self.params, self.l, self.config = spec, params, int(l), config
        self.K = 2.0 * params.mu / params.hbar**2
        self.L = self.l * (self.l + 1)
        self.r_lo = config.r_min
        self.r_hi = math.inf
        self.threshold = math.inf  # V_eff(r -> inf); inf means confining
        self._classify()

        self.laurent = laurent_coefficients(spec, params)
        g_m2 = self.L + (self.K * self.laurent[-2] if self.laurent else 0.0)
        if 1.0 + 4.0 * g_m2 < 0:
            raise FallToCenterError(
                f"inverse-square strength {g_m2:.6g} < -1/4: Hamiltonian unbounded below"
            )
        self.p = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * g_m2))
        self._grid_cache: dict[float, tuple] = {}

    def _classify(self):
        spec = self.spec
        if isinstance(spec, (CornellSpin, TruncatedOEA)):
            feas = boundedness_check(spec)
            if not feas.bounded_below:
                raise NoBoundStateError(f"{type(spec).__name__}: {feas.reason}")
            if not feas.confining:
                self.threshold = 0.0
        elif isinstance(spec, Coulomb):
            if spec.k <= 0:
                raise NoBoundStateError("repulsive Coulomb potential has no bound states")
            self.threshold = 0.0
        elif isinstance(spec, KratzerEffective):
            if spec.B <= 0:
                raise NoBoundStateError(f"Kratzer B = {spec.B} <= 0: no bound states")
            self.threshold = 0.0
        elif isinstance(spec, Oscillator):
            if spec.omega <= 0:
                raise DomainError("oscillator frequency must be positive")
        elif isinstance(spec, Tabulated):
            lo, hi = spec.r_range
            self.r_lo = max(self.config.r_min, lo)
            self.r_hi = hi
        else:
            raise DomainError(f"unsupported potential {type(spec).__name__}")

    @property
    def confining(self) -> bool:
        return math.isinf(self.threshold)

    def veff(self, r):
        v = evaluate_potential(self.spec, r, self.params)
        return v + self.L / (self.K * np.asarray(r) ** 2)

    # -- boundary placement --------------------------------------------------

    def outer_turning_point(self, E: float) -> float | None:
        if E >= self.threshold:
            return None
        R = max(1.0, 10.0 * self.r_lo)
        limit = self.r_hi if math.isfinite(self.r_hi) else 1e12
        # move out past the well: above E and still rising
        while R < limit and not (self.veff(R) > E and self.veff(1.01 * R) > self.veff(R)):
            R *= 2.0
        R = min(R, limit)
        probe = np.geomspace(self.r_lo, R, 2000)
        below = np.nonzero(self.veff(probe) < E)[0]
        if below.size == 0:
            return None
        i = below[-1]
        if i == probe.size - 1:
            return float(probe[-1])
        return brentq(lambda x: self.veff(x) - E, probe[i], probe[i + 1], xtol=1e-12 * probe[i + 1])

    def r_max_for(self, E: float) -> float:
        cfg = self.config
        if cfg.r_max is not None:
            return min(cfg.r_max, self.r_hi)
        if isinstance(self.spec, Tabulated):
            return self.r_hi
        rt = self.outer_turning_point(E)
        if self.confining:
            if rt is None:
                r = cfg.buffer * self._well_position()
            else:
                r = max(cfg.buffer * rt, self._decay_length(E, rt))
        else:
            kappa = math.sqrt(self.K * (self.threshold - E))
            r = max(50.0 / kappa, 20.0, cfg.buffer * rt if rt is not None else 0.0)
        return min(max(r, 1000.0 * self.r_lo), self.r_hi)

    def _decay_length(self, E: float, rt: float) -> float:
        """Radius where the WKB tail exp(-int kappa dr) past ``rt`` reaches e^-_TAIL_DECAY."""
        r_end = 2.0 * rt
        for _ in range(60):
            x = np.linspace(rt, r_end, 400)
            kappa = np.sqrt(np.maximum(self.K * (self.veff(x) - E), 0.0))
            if np.trapezoid(kappa, x) >= _TAIL_DECAY or r_end >= self.r_hi:
                break
            r_end *= 1.5
        return r_end

    def _well_position(self) -> float:
        probe = np.geomspace(self.r_lo, 1e4, 4000)
        return float(probe[np.argmin(self.veff(probe))])

    def grid(self, r_max: float):
        cached = self._grid_cache.get(r_max)
        if cached is None:
            r = np.linspace(self.r_lo, r_max, self.config.grid_points)
            cached = (r, r[1] - r[0], self.K * self.veff(r))
            if len(self._grid_cache) > 8:
                self._grid_cache.clear()
            self._grid_cache[r_max] = cached
        return cached

    # -- integration ---------------------------------------------------------

    def start_values(self, E: float, r0: float, r1: float):
        """Regular Frobenius branch r^p (1 + c1 r + ...) at the first two nodes."""
        p = self.p
        if self.laurent is None:
            return r0**p, r1**p
        g = {m: self.K * v for m, v in self.laurent.items()}
        g[0] = self.K * (self.laurent[0] - E)
        c = [1.0]
        for j in range(1, _SERIES_TERMS + 1):
            acc = sum(g[m] * c[j - 2 - m] for m in range(-1, j - 1) if m in g)
            c.append(acc / (j * (2.0 * p + j - 1.0)))

        def series(r):
            total, term_prev = 0.0, math.inf
            for j, cj in enumerate(c):
                term = cj * r**j
                if j > 1 and abs(term) > abs(term_prev):
                    break  # outside the useful radius; keep the converging part
                total += term
                term_prev = term if term != 0.0 else term_prev
            return total if total > 0 else 1.0

        return r0**p * series(r0), r1**p * series(r1)

    def weights(self, E: float, r_max: float):
        r, h, kv = self.grid(r_max)
        g = kv - self.K * E
        return r, h, 1.0 - (h * h / 12.0) * g, g

    def resolved(self, E: float, r_max: float) -> bool:
        r, h, kv = self.grid(r_max)
        k2 = self.K * E - kv[10:]
        # oscillatory region: h*k small; forbidden region: Numerov weight f >= 1/2
        return h * h * float(k2.max()) <= _RESOLUTION**2 and h * h * float(-k2.min()) <= 6.0

    def shoot(self, E: float, r_max: float):
        r, h, f, _ = self.weights(E, r_max)
        u0, u1 = self.start_values(E, r[0], r[1])
        return _kernels.shoot(f, u0, u1)

    def count(self, E: float, r_max: float | None = None) -> int:
        return self.shoot(E, r_max if r_max is not None else self.r_max_for(E))[1]


def _trial(ch: _Radial, E: float, r_max: float) -> NumerovTrial:
    r, h, f, _ = ch.weights(E, r_max)
    u0, u1 = ch.start_values(E, r[0], r[1])
    psi = _kernels.profile(f, u0, u1)
    nodes = _sign_changes(psi)
    return NumerovTrial(E, r, psi, float(psi[-1]), nodes)


def _sign_changes(u: np.ndarray) -> int:
    s = np.sign(u)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def integrate_numerov(spec, params: QuarkoniumParams, l: int, E: float,
                      config: SolverConfig | None = None) -> NumerovTrial:
    """Outward Numerov solution at trial energy ``E`` (unnormalized)."""
    ch = _Radial(spec, params, l, config or SolverConfig())
    return _trial(ch, E, ch.r_max_for(E))


# -- eigenvalue search ---------------------------------------------------------


def _lower_bound(ch: _Radial) -> float:
    """Energy below every level of the channel.

    With a singular core ``v2/r^2 + v1/r`` the bound is the exact Kratzer
    ground state of the core plus the infimum of the remainder; otherwise
    the minimum of ``V_eff`` on a probe mesh.
    """
    hi = ch.r_hi if math.isfinite(ch.r_hi) else 1e4
    probe = np.geomspace(ch.r_lo, hi, 4000)
    v1 = ch.laurent[-1] if ch.laurent else 0.0
    if v1 < 0:
        v2 = ch.laurent[-2]
        rest = evaluate_potential(ch.spec, probe, ch.params) - v2 / probe**2 - v1 / probe
        core = -((ch.K * v1) ** 2) / (4.0 * ch.p**2) / ch.K
        bound = core + float(np.min(rest))
    else:
        bound = float(np.min(ch.veff(probe)))
    return bound - 1e-6 * max(1.0, abs(bound))


def _auto_bracket(ch: _Radial, n_r: int) -> tuple[float, float, int]:
    """Expand upward from a lower bound until the node count exceeds ``n_r``.

    Candidates the mesh cannot resolve are pulled back toward the last
    accepted energy before they are counted.
    """
    lo = lo0 = _lower_bound(ch)
    if ch.count(lo) > n_r:
        raise SolverError("lower energy bound already exceeds the requested level")
    evals, j = 1, 0
    step = 1e-3 * max(1.0, abs(lo0))
    while j < 200:
        if ch.confining:
            cand = lo0 + step * 2.0**j
        else:
            cand = ch.threshold - (ch.threshold - lo0) / 4.0 ** (j + 1)
        upper = cand
        r_max = ch.r_max_for(upper)
        while not ch.resolved(upper, r_max):
            upper = 0.5 * (lo + upper)
            if upper - lo <= 1e-12 * max(1.0, abs(lo)):
                raise SolverError(
                    f"grid of {ch.config.grid_points} points cannot resolve level "
                    f"n_r={n_r}; increase grid_points"
                )
            r_max = ch.r_max_for(upper)
        evals += 1
        if ch.count(upper, r_max) > n_r:
            return lo, upper, evals
        lo = upper
        if upper == cand:
            j += 1
    raise NoBoundStateError(f"no bound state with {n_r} nodes below threshold {ch.threshold}")


def auto_bracket(spec, params: QuarkoniumParams, l: int, n_r: int,
                 config: SolverConfig | None = None) -> tuple[float, float]:
    """Automatic starting bracket: ``count(lo) <= n_r < count(hi)``."""
    ch = _Radial(spec, params, l, config or SolverConfig())
    lo, hi, _ = _auto_bracket(ch, n_r)
    return lo, hi


def find_eigenvalue(spec, params: QuarkoniumParams, l: int, n_r: int,
                    config: SolverConfig | None = None) -> Eigensolution:
    """Level with ``n_r`` radial nodes in channel ``l``.

    Raises :class:`NoBoundStateError` when the potential (or the supplied
    bracket) holds no such level and :class:`ConvergenceError` when the
    bisection budget runs out.
    """
    config = config or SolverConfig()
    if n_r < 0 or int(n_r) != n_r:
        raise DomainError("n_r must be a non-negative integer")
    ch = _Radial(spec, params, l, config)

    if config.energy_bracket is not None:
        lo, hi = map(float, config.energy_bracket)
        if hi > ch.threshold:
            hi = ch.threshold - 1e-12 * max(1.0, abs(ch.threshold))
        c_lo, c_hi = ch.count(lo), ch.count(hi)
        if not (c_lo <= n_r < c_hi):
            raise NoBoundStateError(
                f"bracket [{lo}, {hi}] holds levels {c_lo}..{c_hi - 1}, not n_r={n_r}"
            )
        used = 2
    else:
        lo, hi, used = _auto_bracket(ch, n_r)

    # coarse stage: each trial energy gets its own adaptive outer boundary
    while hi - lo > 1e-4 * max(abs(lo), abs(hi), 1e-12) and used < config.max_bisections:
        mid = 0.5 * (lo + hi)
        used += 1
        if ch.count(mid) > n_r:
            hi = mid
        else:
            lo = mid

    # fine stage on one fixed mesh (the widest one in the bracket)
    r_max = ch.r_max_for(hi)
    for _ in range(60):
        if ch.count(lo, r_max) <= n_r:
            break
        lo -= (hi - lo)
    for _ in range(60):
        if ch.count(hi, r_max) > n_r:
            break
        hi += (hi - lo)
        if hi >= ch.threshold:
            raise NoBoundStateError(f"level n_r={n_r} merges with the threshold")

    converged = False
    while used < config.max_bisections:
        if hi - lo <= config.energy_tolerance * max(abs(lo), abs(hi), 1e-300):
            converged = True
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            converged = True
            break
        used += 1
        if ch.count(mid, r_max) > n_r:
            hi = mid
        else:
            lo = mid
    if not converged:
        raise ConvergenceError(
            f"bisection did not reach tolerance in {config.max_bisections} steps "
            f"(bracket [{lo}, {hi}])"
        )

    E = 0.5 * (lo + hi)
    r, psi = _stitched(ch, E, r_max)
    norm = np.trapezoid(psi**2, r)
    psi = psi / math.sqrt(norm)
    if psi[np.nonzero(psi)[0][0]] < 0:
        psi = -psi
    residual = abs(float(simpson(psi**2, x=r)) - 1.0)
    nodes = _sign_changes(psi)
    return Eigensolution(
        n_r=n_r, l=ch.l, s=getattr(getattr(spec, "params", None), "s", params.s),
        energy=E, nodes_observed=nodes,
        converged=nodes == n_r and residual < 1e-6,
        r=r, wavefunction=psi, norm_residual=residual,
        bisections=used, bracket=(lo, hi),
    )


def _stitched(ch: _Radial, E: float, r_max: float):
    """Outward solution up to the turning point, inward solution beyond it."""
    r, h, f, _ = ch.weights(E, r_max)
    u0, u1 = ch.start_values(E, r[0], r[1])
    out = _kernels.profile(f, u0, u1)
    n = r.size
    rt = ch.outer_turning_point(E)
    m = n - 3 if rt is None else int(np.clip(np.searchsorted(r, rt), n // 20, n - 3))
    inward = _kernels.profile(np.ascontiguousarray(f[::-1]), 0.0, 1e-30)[::-1]
    # avoid matching on an accidental zero of either branch
    while m > 2 and (abs(inward[m]) < 1e-300 or abs(out[m]) < 1e-12 * np.max(np.abs(out[: m + 1]))):
        m -= 1
    scale = out[m] / inward[m]
    psi = np.concatenate([out[: m + 1], scale * inward[m + 1:]])
    return r, psi


class Spectrum(list):
    """Converged entries; channels that failed are kept in ``diagnostics``."""

    def __init__(self, entries=(), diagnostics=()):
        super().__init__(entries)
        self.diagnostics: list[SpectrumEntry] = list(diagnostics)


def solve_spectrum(spec, params: QuarkoniumParams, l_max: int, n_r_max: int,
                   config: SolverConfig | None = None, workers: int = 1) -> Spectrum:
    """All channels ``n_r <= n_r_max``, ``l <= l_max`` sorted by ``(l, n_r)``.

    Failures are not fatal: they land in ``.diagnostics`` with the error text.
    Channels are independent, so ``workers > 1`` runs them on a thread pool
    (the compiled kernel releases the GIL).
    """
    config = config or SolverConfig()
    s = getattr(getattr(spec, "params", None), "s", params.s)
    jobs = [(n, l) for l in range(l_max + 1) for n in range(n_r_max + 1)]

    def run(job):
        n, l = job
        try:
            sol = find_eigenvalue(spec, params, l, n, config)
        except (SolverError, DomainError) as exc:
            return SpectrumEntry(n, l, s, math.nan, -1, False, f"{type(exc).__name__}: {exc}")
        return SpectrumEntry(n, l, s, sol.energy, sol.nodes_observed, sol.converged, "", sol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(run, jobs))
    else:
        entries = [run(j) for j in jobs]
    entries.sort(key=lambda e: (e.l, e.n_r))
    return Spectrum([e for e in entries if not e.error], [e for e in entries if e.error])


SPECTRUM_HEADER = ("n_r", "l", "s", "E", "nodes", "converged")


def spectrum_to_csv(entries: list[SpectrumEntry]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SPECTRUM_HEADER)
    for e in entries:
        if e.error or not math.isfinite(e.energy):
            continue
        w.writerow([e.n_r, e.l, e.s, f"{e.energy:.12g}", e.nodes, str(e.converged).lower()])
    return buf.getvalue()
