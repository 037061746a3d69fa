import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from quarkspec.closed_form import KratzerCoefficients, coulomb_levels, kratzer_energy, oscillator_levels
from quarkspec.model import (
    Coulomb, CornellSpin, DomainError, KratzerEffective, Oscillator, QuarkoniumParams, Tabulated,
    TruncatedOEA, evaluate_potential,
)
from quarkspec.numerov import (
    SPECTRUM_HEADER, ConvergenceError, NoBoundStateError, SolverConfig, auto_bracket, find_eigenvalue,
    integrate_numerov, solve_spectrum, spectrum_to_csv,
)

solver_settings = settings(max_examples=8, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])


def test_hydrogen_ground_state(unit_context):
    sol = find_eigenvalue(Coulomb(1.0), unit_context, 0, 0)
    assert sol.energy == pytest.approx(-0.5, rel=1e-8)
    assert sol.converged and sol.nodes_observed == 0 and sol.norm_residual < 1e-6


@pytest.mark.parametrize("n_r,l", [(0, 0), (1, 0), (0, 1), (2, 3), (1, 5)])
def test_oscillator_levels(unit_context, n_r, l):
    sol = find_eigenvalue(Oscillator(1.0), unit_context, l, n_r)
    assert sol.energy == pytest.approx(oscillator_levels(1.0, 1.0, n_r, l), rel=1e-8)


def test_kratzer_integer_lambda(unit_context):
    sol = find_eigenvalue(KratzerEffective(2.0, 4.0), unit_context, 0, 0)
    # E = -(hbar^2/2mu) C with C = 1
    assert sol.energy == pytest.approx(-0.5, rel=1e-8)


def test_wavefunction_normalized_and_positive_first(unit_context):
    sol = find_eigenvalue(Coulomb(1.0), unit_context, 0, 2)
    assert np.trapezoid(sol.wavefunction**2, sol.r) == pytest.approx(1.0, abs=1e-12)
    first = sol.wavefunction[np.nonzero(sol.wavefunction)[0][0]]
    assert first > 0
    assert sol.nodes_observed == 2


def test_wavefunction_matches_hydrogen_1s(unit_context):
    sol = find_eigenvalue(Coulomb(1.0), unit_context, 0, 0)
    exact = 2 * sol.r * np.exp(-sol.r)
    assert np.max(np.abs(sol.wavefunction - exact)) < 1e-5


@pytest.mark.parametrize("l", [1, 2, 3])
def test_regular_boundary_at_origin(unit_context, l):
    sol = find_eigenvalue(Oscillator(1.0), unit_context, l, 1)
    assert abs(sol.wavefunction[0]) < 1e-6 * np.max(np.abs(sol.wavefunction))


def test_terminal_value_changes_sign_across_level(unit_context):
    cfg = SolverConfig(r_max=12.0)
    below = integrate_numerov(Oscillator(1.0), unit_context, 0, 1.49, cfg)
    above = integrate_numerov(Oscillator(1.0), unit_context, 0, 1.51, cfg)
    assert below.terminal * above.terminal < 0
    assert below.nodes == 0 and above.nodes == 1


def test_fourth_order_grid_convergence(unit_context):
    energies = []
    for n in (201, 401, 801):
        cfg = SolverConfig(r_max=12.0, grid_points=n, energy_tolerance=1e-13)
        energies.append(find_eigenvalue(Oscillator(1.0), unit_context, 0, 1, cfg).energy)
    ratio = (energies[0] - energies[1]) / (energies[1] - energies[2])
    assert 12.0 < ratio < 20.0


@pytest.mark.parametrize("backend", [CornellSpin, TruncatedOEA])
def test_node_theorem_and_ordering(charmonium, backend):
    spectrum = solve_spectrum(backend(charmonium), charmonium, 1, 4)
    assert len(spectrum) == 10 and not spectrum.diagnostics
    for l in (0, 1):
        chan = [e for e in spectrum if e.l == l]
        assert [e.nodes for e in chan] == list(range(5))
        assert all(a.energy < b.energy for a, b in zip(chan, chan[1:]))
    # centrifugal barrier raises the level
    assert spectrum[0].energy < spectrum[5].energy


def test_coulomb_degeneracy_from_spectrum(unit_context):
    spectrum = solve_spectrum(Coulomb(1.0), unit_context, 1, 1)
    by = {(e.n_r, e.l): e.energy for e in spectrum}
    assert by[(1, 0)] == pytest.approx(by[(0, 1)], rel=1e-8)
    assert by[(1, 0)] == pytest.approx(-0.125, rel=1e-8)


def test_parallel_spectrum_matches_serial(charmonium):
    serial = solve_spectrum(CornellSpin(charmonium), charmonium, 1, 2)
    pooled = solve_spectrum(CornellSpin(charmonium), charmonium, 1, 2, workers=3)
    assert [e.energy for e in serial] == [e.energy for e in pooled]


@solver_settings
@given(mu=st.floats(0.2, 5.0), k=st.floats(0.3, 3.0))
def test_coulomb_reduced_mass_scaling(mu, k):
    ctx = QuarkoniumParams.for_reduced_mass(mu)
    E = find_eigenvalue(Coulomb(k), ctx, 0, 0).energy
    assert E == pytest.approx(coulomb_levels(k, mu, 1.0, 0, 0), rel=1e-7)


@solver_settings
@given(b=st.floats(0.05, 0.4), alpha=st.floats(0.2, 0.8))
def test_cornell_ground_state_monotone_in_string_tension(charmonium, b, alpha):
    p = charmonium.replace(b=b, alpha_s=alpha)
    E1 = find_eigenvalue(CornellSpin(p), p, 0, 0).energy
    E2 = find_eigenvalue(CornellSpin(p.replace(b=1.2 * b)), p.replace(b=1.2 * b), 0, 0).energy
    assert E2 > E1


def test_variational_bound(charmonium):
    # any normalized trial state bounds the ground level from above
    sol = find_eigenvalue(CornellSpin(charmonium), charmonium, 0, 0)
    r = np.linspace(1e-6, 30, 200001)
    for beta in (0.5, 1.0, 2.0):
        u = r * np.exp(-beta * r)
        u /= math.sqrt(np.trapezoid(u * u, r))
        du = np.gradient(u, r)
        kin = np.trapezoid(du * du, r) / (2 * charmonium.mu)
        pot = np.trapezoid(u * u * evaluate_potential(CornellSpin(charmonium), r), r)
        assert kin + pot >= sol.energy


def test_kratzer_closed_form_many_levels(unit_context):
    k = KratzerCoefficients(6.922, 14.074)
    for n in range(4):
        E = find_eigenvalue(KratzerEffective(k.A, k.B), unit_context, 0, n).energy
        assert E == pytest.approx(kratzer_energy(k, 1.0, 1.0, n), rel=1e-7)


def test_truncated_triplet_has_no_levels(charmonium):
    p = charmonium.replace(s=1)
    with pytest.raises(NoBoundStateError):
        find_eigenvalue(TruncatedOEA(p), p, 0, 0)


def test_full_triplet_is_bound(charmonium):
    p = charmonium.replace(s=1)
    singlet = find_eigenvalue(CornellSpin(charmonium), charmonium, 0, 0).energy
    triplet = find_eigenvalue(CornellSpin(p), p, 0, 0).energy
    assert triplet > singlet  # hyperfine splitting has the right sign


def test_spectrum_collects_failures(charmonium):
    p = charmonium.replace(s=1)
    spectrum = solve_spectrum(TruncatedOEA(p), p, 0, 2)
    assert len(spectrum) == 0
    assert len(spectrum.diagnostics) == 3
    assert all("NoBoundState" in e.error for e in spectrum.diagnostics)


def test_coulomb_threshold_limits_levels(unit_context):
    cfg = SolverConfig(energy_bracket=(-1.0, -0.2))
    with pytest.raises(NoBoundStateError):
        find_eigenvalue(Coulomb(1.0), unit_context, 0, 1, cfg)
    assert find_eigenvalue(Coulomb(1.0), unit_context, 0, 0, cfg).energy == pytest.approx(-0.5, rel=1e-8)


def test_auto_bracket_holds_requested_level(unit_context):
    lo, hi = auto_bracket(Oscillator(1.0), unit_context, 0, 3)
    assert lo < oscillator_levels(1.0, 1.0, 3, 0) < hi


def test_bisection_budget(unit_context):
    cfg = SolverConfig(max_bisections=5)
    with pytest.raises(ConvergenceError):
        find_eigenvalue(Oscillator(1.0), unit_context, 0, 0, cfg)


def test_tabulated_oscillator(unit_context):
    r = np.linspace(1e-3, 12.0, 4000)
    tab = Tabulated(tuple(r), tuple(0.5 * r**2))
    E = find_eigenvalue(tab, unit_context, 0, 0).energy
    assert E == pytest.approx(1.5, rel=1e-5)


@pytest.mark.parametrize("kwargs", [dict(r_min=0.0), dict(r_min=1.0, r_max=0.5), dict(grid_points=10),
                                    dict(energy_bracket=(1.0, 1.0)), dict(energy_tolerance=0.0)])
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        SolverConfig(**kwargs)


def test_negative_quantum_number(unit_context):
    with pytest.raises(DomainError):
        find_eigenvalue(Coulomb(1.0), unit_context, 0, -1)


def test_csv_exports(unit_context):
    spectrum = solve_spectrum(Oscillator(1.0), unit_context, 0, 1)
    lines = spectrum_to_csv(spectrum).splitlines()
    assert lines[0] == ",".join(SPECTRUM_HEADER)
    fields = lines[1].split(",")
    assert fields[:3] == ["0", "0", "0"] and fields[4:] == ["0", "true"]
    assert float(fields[3]) == pytest.approx(1.5, rel=1e-10)
    wf = spectrum[0].solution.to_csv().splitlines()
    assert wf[0] == "r,psi" and len(wf) == spectrum[0].solution.r.size + 1
