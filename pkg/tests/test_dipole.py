import math

import numpy as np
import pytest

from dsap.dipole import (
    MAGIC_ANGLE,
    dipole_coupling,
    endpoint_reference_cosines,
    equilateral_geometry,
    magic_field,
    magic_schedule,
    magic_trajectory,
    solve_endpoints,
    trajectory_couplings,
    DipoleGeometry,
)


def test_dipole_coupling_values():
    assert dipole_coupling(1.0, 1.0, 1.0, MAGIC_ANGLE) == pytest.approx(0.0, abs=1e-15)
    assert dipole_coupling(1.0, 1.0, 1.0, 0.0) == pytest.approx(2.0)
    assert dipole_coupling(1.0, 1.0, 1.0, math.pi / 2) == pytest.approx(-1.0)
    with pytest.raises(ValueError, match="separation"):
        dipole_coupling(1.0, 1.0, 0.0, 0.3)


def test_dipole_coupling_symmetry_and_zeros():
    thetas = np.linspace(0.0, math.pi, 181)
    for theta in thetas:
        assert dipole_coupling(1.0, 1.0, 1.0, theta) == pytest.approx(
            dipole_coupling(1.0, 1.0, 1.0, -theta), abs=1e-15
        )
        value = dipole_coupling(1.0, 1.0, 1.0, theta)
        if abs(abs(math.cos(theta)) - 1 / math.sqrt(3)) > 1e-3:
            assert abs(value) > 1e-6


def test_magic_field_geometry():
    field = magic_field(math.pi / 2, 1.0)
    assert np.allclose(field, [0.0, 1 / math.sqrt(2), 1.0], atol=1e-15)
    for phi in (0.0, 1.0, 2.0, 3.0):
        field = magic_field(phi, 2.5)
        assert np.linalg.norm(field) == pytest.approx(2.5 * math.sqrt(1.5), abs=1e-12)
        cos_to_y = field[1] / np.linalg.norm(field)
        assert math.acos(cos_to_y) == pytest.approx(MAGIC_ANGLE, abs=1e-12)


def test_default_geometry_scale():
    geom = equilateral_geometry()
    schedule = magic_schedule(geom, 100.0)
    assert schedule.d == pytest.approx(0.2, abs=1e-12)
    assert schedule.at(0.0).b_coeff == pytest.approx(1.0, abs=1e-12)


def test_trajectory_nulls_d13():
    geom = equilateral_geometry(side=1.0)
    for phi in np.linspace(0.0, 2 * math.pi, 97):
        d12, d23, d13 = trajectory_couplings(geom, float(phi))
        assert abs(d13) <= 1e-12


def test_axis_mismatch_rejected():
    positions = np.array([[0.0, 0.0, 0.0], [0.5, 0.5, 0.0], [1.0, 0.0, 0.0]])
    geom = DipoleGeometry(positions=positions, gammas=np.ones(3), b_mag=1.0)
    with pytest.raises(ValueError, match="trajectory axis mismatch"):
        trajectory_couplings(geom, 0.3)


def test_solve_endpoints_match_analytic_roots():
    geom = equilateral_geometry(side=1.0)
    phi0, phi_max = solve_endpoints(geom)
    assert phi0 == pytest.approx(math.acos(1 / math.sqrt(6)), abs=1e-10)
    assert phi_max == pytest.approx(math.acos(-1 / math.sqrt(6)), abs=1e-10)
    d12_0, d23_0, _ = trajectory_couplings(geom, phi0)
    d12_1, d23_1, _ = trajectory_couplings(geom, phi_max)
    assert abs(d12_0) <= 1e-12 and abs(d23_1) <= 1e-10
    assert abs(d23_0) > 0.5 and abs(d12_1) > 0.5


def test_endpoint_reference_values():
    # the sweep-end expression is a valid cosine and agrees with the solver;
    # the sweep-start one conflates an angle with a cosine and is out of range
    values = endpoint_reference_cosines()
    assert values["sweep_end"] == pytest.approx(-1 / math.sqrt(6), abs=1e-12)
    assert abs(values["sweep_start"]) > 1.0


def test_swap_symmetry_about_arc_midpoint():
    geom = equilateral_geometry(side=1.0)
    phi0, phi_max = solve_endpoints(geom)
    centre = (phi0 + phi_max) / 2.0
    for delta in np.linspace(0.0, (phi_max - phi0) / 2.0, 11):
        d12_a, d23_a, _ = trajectory_couplings(geom, centre - delta)
        d12_b, d23_b, _ = trajectory_couplings(geom, centre + delta)
        assert abs(d12_a) == pytest.approx(abs(d23_b), abs=1e-10)
        assert abs(d23_a) == pytest.approx(abs(d12_b), abs=1e-10)


def test_magic_trajectory_samples():
    geom = equilateral_geometry()
    trajectory = magic_trajectory(geom, 50.0, n_samples=41)
    assert np.max(np.abs(trajectory.d13s)) <= 1e-12
    assert abs(trajectory.d12s[0]) <= 1e-12
    assert abs(trajectory.d23s[-1]) <= 1e-10
    assert trajectory.phis[0] == trajectory.phi0
    assert trajectory.phis[-1] == trajectory.phi_max
    # constant-magnitude mode: the Zeeman coefficient never varies
    assert np.ptp(trajectory.b_coeffs) <= 1e-12


def test_magic_schedule_modes():
    geom = equilateral_geometry()
    schedule = magic_schedule(geom, 80.0, zeeman_mode="lab_z_projection")
    snap = schedule.at(0.0)
    expected = geom.gammas[0] * geom.b_mag * math.sin(solve_endpoints(geom)[0])
    assert snap.b_coeff == pytest.approx(expected, abs=1e-12)
    with pytest.raises(ValueError, match="zeeman mode"):
        magic_trajectory(geom, 10.0, zeeman_mode="diagonal")


def test_magic_schedule_counter_intuitive_ordering():
    geom = equilateral_geometry()
    schedule = magic_schedule(geom, 120.0)
    start = schedule.at(0.0)
    end = schedule.at(120.0)
    assert abs(start.d12) <= 1e-12 and abs(start.d23) > 0.1
    assert abs(end.d23) <= 1e-10 and abs(end.d12) > 0.1


def test_nonuniform_moments_rejected():
    geom = DipoleGeometry(
        positions=equilateral_geometry().positions,
        gammas=np.array([1.0, 2.0, 1.0]),
        b_mag=1.0,
    )
    with pytest.raises(ValueError, match="uniform dipole moments"):
        magic_trajectory(geom, 10.0)


def test_degenerate_geometry_has_no_arc():
    # collinear chain along y: the 1-2 ray sits on the magic cone for every
    # field azimuth, so no counter-intuitive arc exists
    positions = np.array([[0.0, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 1.0, 0.0]])
    geom = DipoleGeometry(positions=positions, gammas=np.ones(3), b_mag=1.0)
    with pytest.raises(ValueError, match="no counter-intuitive arc"):
        solve_endpoints(geom)
