"""Side-by-side spectra of the full, truncated and Kratzer-reduced models.

The reduced (OEA) spectrum saturates at ``Gamma0`` while a linearly confining
potential keeps climbing; :func:`compare_spectra` measures both and
:class:`Audit` records whether that contrast shows up numerically.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .approximation import DEFAULT_DELTA, assemble_kratzer, q_transform
from .closed_form import OEAGammas, oea_gammas, oea_spectrum
from .model import CornellSpin, DomainError, QuarkoniumParams, TruncatedOEA, boundedness_check
from .numerov import SolverConfig, SolverError, find_eigenvalue

REPORT_HEADER = ("n_r", "l", "s", "E_cornell", "E_truncated", "E_oea", "flags")

# growth law for level spacings under linear confinement: spacing ~ n^(-1/3)
_LINEAR_SPACING_EXPONENT = 1.0 / 3.0


@dataclass
class ComparisonRow:
    n_r: int
    l: int
    s: int
    E_cornell: float = math.nan
    E_truncated: float = math.nan
    E_oea: float = math.nan
    flags: list[str] = field(default_factory=list)


@dataclass
class Audit:
    oea_below_gamma0: bool
    cornell_exceeds_gamma0_at: dict[int, int | None]
    truncated_unbound: bool
    cornell_increasing: bool
    cornell_spacing_persistent: bool
    oea_gap_saturates: bool

    @property
    def claims_hold(self) -> bool:
        return (
            self.oea_below_gamma0
            and all(n is not None for n in self.cornell_exceeds_gamma0_at.values())
            and self.cornell_increasing
            and self.cornell_spacing_persistent
            and self.oea_gap_saturates
        )


@dataclass
class SpectrumComparison:
    params: QuarkoniumParams | None
    delta: float
    gammas: dict[int, OEAGammas | None]
    rows: list[ComparisonRow]
    audit: Audit | None = None

    def column(self, name: str, l: int = 0) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows if r.l == l])


@dataclass(frozen=True)
class AsymptoticReport:
    monotone: bool
    gap_sequence: tuple[float, ...]
    cauchy_decay_ratio: float


def asymptotic_audit(gammas: OEAGammas, mu: float, hbar: float, n_max: int) -> AsymptoticReport:
    """Gaps ``Gamma0 - E_oea(n)`` for ``n = 0..n_max`` and their halving ratio.

    For the Kratzer form ``gap(2n)/gap(n) -> 1/4``; the ratio is taken at
    ``n = n_max // 2``.
    """
    if n_max < 3:
        raise DomainError("n_max must be >= 3")
    gaps = tuple(gammas.Gamma0 - oea_spectrum(gammas, mu, hbar, n) for n in range(n_max + 1))
    g = np.array(gaps)
    monotone = bool(np.all(g > 0) and np.all(np.diff(g) < 0))
    half = n_max // 2
    ratio = g[2 * half] / g[half] if g[half] != 0 else math.nan
    return AsymptoticReport(monotone, gaps, float(ratio))


def spacing_persistent(energies, threshold: float = 0.5) -> bool:
    """True when ``spacing(n) (n+1)^(1/3) > threshold * spacing(0)`` for all n.

    Spacings of a linearly confined spectrum fall off like ``n^(-1/3)``, so
    the rescaled spacing stays bounded away from zero; the Kratzer spectrum's
    ``n^(-3)`` decay fails the test quickly.
    """
    e = np.asarray(energies, dtype=float)
    e = e[np.isfinite(e)]
    if e.size < 3:
        return False
    sp = np.diff(e)
    if sp[0] <= 0:
        return False
    scaled = sp * np.arange(1, sp.size + 1) ** _LINEAR_SPACING_EXPONENT
    return bool(np.all(scaled > threshold * sp[0]))


def _gammas_for(params: QuarkoniumParams, l: int, delta: float) -> OEAGammas | None:
    try:
        k = assemble_kratzer(q_transform(params, l), delta)
        return oea_gammas(k, params.c_s, params.mu, params.hbar)
    except (SolverError, DomainError):
        return None


def compare_spectra(params: QuarkoniumParams, delta: float = DEFAULT_DELTA, l_max: int = 0,
                    n_max: int = 10, config: SolverConfig | None = None, *,
                    extend: bool = True, n_limit: int = 80,
                    gammas: dict[int, OEAGammas] | None = None,
                    workers: int = 1) -> SpectrumComparison:
    """Tabulate the three spectra for ``n_r <= n_max``, ``l <= l_max``.

    With ``extend`` the Cornell column of each ``l`` keeps growing past
    ``n_max`` (up to ``n_limit``) until it crosses ``Gamma0``.
    """
    config = config or SolverConfig()
    if gammas is None:
        gammas = {l: _gammas_for(params, l, delta) for l in range(l_max + 1)}
    trunc_ok = boundedness_check(TruncatedOEA(params)).bounded_below
    s = params.s

    def solve(spec, l, n):
        try:
            return find_eigenvalue(spec, params, l, n, config).energy, ""
        except (SolverError, DomainError) as exc:
            return math.nan, type(exc).__name__

    def build_row(l, n):
        row = ComparisonRow(n, l, s)
        row.E_cornell, err = solve(CornellSpin(params), l, n)
        if err:
            row.flags.append(f"cornell-failed:{err}")
        if trunc_ok:
            row.E_truncated, err = solve(TruncatedOEA(params), l, n)
            if err:
                row.flags.append(f"truncated-failed:{err}")
        else:
            row.flags.append("truncated-unbound")
        g = gammas.get(l)
        if g is None:
            row.flags.append("oea-undefined")
        else:
            row.E_oea = oea_spectrum(g, params.mu, params.hbar, n)
            if row.E_oea < g.Gamma0:
                row.flags.append("oea<gamma0")
            if row.E_cornell > g.Gamma0:
                row.flags.append("cornell>gamma0")
        return row

    jobs = [(l, n) for l in range(l_max + 1) for n in range(n_max + 1)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda j: build_row(*j), jobs))
    else:
        rows = [build_row(*j) for j in jobs]

    if extend:
        for l in range(l_max + 1):
            g = gammas.get(l)
            if g is None:
                continue
            n = n_max
            while n < n_limit and not any(r.l == l and r.E_cornell > g.Gamma0 for r in rows):
                n += 1
                rows.append(build_row(l, n))

    rows.sort(key=lambda r: (r.l, r.n_r))
    comparison = SpectrumComparison(params, delta, gammas, rows)
    comparison.audit = audit(comparison)
    return comparison


def audit(comparison: SpectrumComparison) -> Audit:
    rows, gammas = comparison.rows, comparison.gammas
    oea_below = True
    crossing: dict[int, int | None] = {}
    increasing = True
    spacing_ok = True
    saturates = True
    for l in sorted({r.l for r in rows}):
        chan = [r for r in rows if r.l == l]
        g = gammas.get(l)
        e_c = np.array([r.E_cornell for r in chan])
        finite = e_c[np.isfinite(e_c)]
        increasing &= bool(finite.size > 1 and np.all(np.diff(finite) > 0))
        spacing_ok &= spacing_persistent(e_c)
        if g is None:
            oea_below = False
            saturates = False
            crossing[l] = None
            continue
        oea_below &= g.Gamma1 != 0 and all(r.E_oea < g.Gamma0 for r in chan)
        crossing[l] = next((r.n_r for r in chan if r.E_cornell > g.Gamma0), None)
        n_top = max(r.n_r for r in chan)
        if n_top >= 3:
            mu = comparison.params.mu if comparison.params else 1.0
            hbar = comparison.params.hbar if comparison.params else 1.0
            saturates &= asymptotic_audit(g, mu, hbar, n_top).monotone
        else:
            saturates = False
    truncated_unbound = any("truncated-unbound" in r.flags for r in rows)
    return Audit(oea_below, crossing, truncated_unbound, increasing, spacing_ok, saturates)


# -- serialization -------------------------------------------------------------


def _fmt(x: float) -> str:
    return "" if x is None or not math.isfinite(x) else f"{x:.12g}"


def _num(x: float):
    return None if x is None or not math.isfinite(x) else float(f"{x:.12g}")


def emit_report(comparison: SpectrumComparison, format: str = "csv") -> str:
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for r in comparison.rows:
            w.writerow([r.n_r, r.l, r.s, _fmt(r.E_cornell), _fmt(r.E_truncated), _fmt(r.E_oea),
                        ";".join(r.flags)])
        return buf.getvalue()
    if format == "json":
        doc = {
            "params": comparison.params.to_dict() if comparison.params else None,
            "delta": _num(comparison.delta),
            "gammas": {
                str(l): None if g is None else {k: _num(v) for k, v in asdict(g).items()}
                for l, g in sorted(comparison.gammas.items())
            },
            "rows": [
                {
                    "n_r": r.n_r, "l": r.l, "s": r.s,
                    "E_cornell": _num(r.E_cornell),
                    "E_truncated": _num(r.E_truncated),
                    "E_oea": _num(r.E_oea),
                    "flags": list(r.flags),
                }
                for r in comparison.rows
            ],
            "audit": None if comparison.audit is None else {
                **asdict(comparison.audit),
                "cornell_exceeds_gamma0_at": {
                    str(k): v for k, v in sorted(comparison.audit.cornell_exceeds_gamma0_at.items())
                },
                "claims_hold": comparison.audit.claims_hold,
            },
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    raise ValueError(f"unknown report format {format!r} (expected 'csv' or 'json')")


def _float(x):
    return math.nan if x is None else float(x)


def parse_report(text: str) -> SpectrumComparison:
    """Inverse of the JSON form of :func:`emit_report`."""
    doc = json.loads(text)
    params = QuarkoniumParams.from_dict(doc["params"]) if doc["params"] else None
    gammas = {
        int(l): None if g is None else OEAGammas(**{k: _float(v) for k, v in g.items()})
        for l, g in doc["gammas"].items()
    }
    rows = [
        ComparisonRow(r["n_r"], r["l"], r["s"], _float(r["E_cornell"]), _float(r["E_truncated"]),
                      _float(r["E_oea"]), list(r["flags"]))
        for r in doc["rows"]
    ]
    a = doc.get("audit")
    aud = None
    if a is not None:
        aud = Audit(
            a["oea_below_gamma0"],
            {int(k): v for k, v in a["cornell_exceeds_gamma0_at"].items()},
            a["truncated_unbound"], a["cornell_increasing"],
            a["cornell_spacing_persistent"], a["oea_gap_saturates"],
        )
    return SpectrumComparison(params, _float(doc["delta"]), gammas, rows, aud)
