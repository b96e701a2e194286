#!/usr/bin/env python3
import sys
import os
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import math

import numpy as np
import pytest

from ofke.config import SystemSpec, pair_grid_spec
from ofke.errors import DomainError, UsageError
from ofke.grid import ScalarField, make_radial_grid, make_square_grid, make_uniform_grid
from ofke.pair import (
    PairState,
    box_pair,
    harmonic_pair,
    information_term,
    multivariate_kinetic,
    pair_density,
    pair_from_levels,
    verify_decomposition,
)


def _grids(name, n2):
    g1 = pair_grid_spec(SystemSpec(name=name), n2).build()
    return g1, make_square_grid(g1)


@pytest.fixture(scope="module")
def box_reports():
    reports = {}
    for n2 in (512, 1024):
        g1, g2 = _grids("box1d", n2)
        reports[n2] = verify_decomposition(box_pair(1.0, g1), g2, g1)
    return reports


@pytest.fixture(scope="module")
def harmonic_reports():
    reports = {}
    for n2 in (512, 1024):
        g1, g2 = _grids("harm1d", n2)
        reports[n2] = verify_decomposition(harmonic_pair(g1), g2, g1)
    return reports


@pytest.fixture(scope="module")
def harmonic_report(harmonic_reports):
    return harmonic_reports[512]


def test_box_pair_multivariate_kinetic(box_reports):
    assert box_reports[512].multivariate == pytest.approx(5.0 * math.pi ** 2 / 2.0, rel=1e-3)


def test_harmonic_pair_multivariate_kinetic(harmonic_report):
    assert harmonic_report.multivariate == pytest.approx(1.0, abs=1e-3)


def test_decomposition_closes(box_reports, harmonic_report):
    for report in (box_reports[512], harmonic_report):
        assert report.relative_residual <= 1e-3, f"{report.system} residual {report.residual}"
        assert report.info > 0
        assert report.weizsacker > 0
        assert report.weizsacker < report.multivariate


def test_residual_shrinks_with_refinement(box_reports, harmonic_reports):
    for reports in (box_reports, harmonic_reports):
        coarse = abs(reports[512].residual)
        fine = abs(reports[1024].residual)
        assert fine < coarse, f"{reports[1024].system}: {fine:.3g} vs {coarse:.3g}"


def test_report_layout(harmonic_report):
    dumped = harmonic_report.model_dump()
    assert list(dumped.keys()) == [
        "system", "grid", "multivariate", "weizsacker", "info", "residual", "masked_mass",
    ]
    assert dumped["grid"] == {"n1": 512, "n2": 512}
    assert harmonic_report.residual == pytest.approx(
        harmonic_report.multivariate - harmonic_report.weizsacker - harmonic_report.info
    )


def test_masked_mass_is_negligible(box_reports, harmonic_report):
    assert harmonic_report.masked_mass < 1e-8
    assert box_reports[512].masked_mass < 1e-8


def test_pair_density_is_sum_of_orbital_densities():
    g1, g2 = _grids("box1d", 256)
    pair = box_pair(1.0, g1)
    rho = pair_density(pair, g2)
    expected = pair.orbital_a.values ** 2 + pair.orbital_b.values ** 2
    assert np.max(np.abs(rho.values - expected)) < 1e-8
    assert rho.n_particles == pytest.approx(2.0)


def test_theta_is_antisymmetric():
    g1, _ = _grids("harm1d", 128)
    theta = harmonic_pair(g1).theta()
    assert np.allclose(theta, -theta.T)


def test_pauli_excluded_pair_has_no_information_term():
    g1, g2 = _grids("box1d", 128)
    same = box_pair(1.0, g1, levels=(1, 1))
    assert not np.any(same.theta())
    assert multivariate_kinetic(same, g2) == 0.0
    with pytest.raises(DomainError):
        information_term(same, g2)


def test_unnormalized_pair_is_rejected():
    g1, g2 = _grids("box1d", 128)
    pair = box_pair(1.0, g1)
    scaled = PairState(
        ScalarField(1.1 * pair.orbital_a.values, g1),
        ScalarField(pair.orbital_b.values, g1),
        name="scaled",
    )
    with pytest.raises(DomainError):
        verify_decomposition(scaled, g2, g1)


def test_pair_must_vanish_on_boundary():
    g1 = make_uniform_grid(-2.0, 2.0, 101)
    with pytest.raises(DomainError):
        multivariate_kinetic(harmonic_pair(g1), make_square_grid(g1))


def test_grid_mismatches_are_rejected():
    g1, g2 = _grids("box1d", 64)
    pair = box_pair(1.0, g1)
    other = make_uniform_grid(0.0, 1.0, 65)
    with pytest.raises(UsageError):
        verify_decomposition(pair, g2, other)
    with pytest.raises(UsageError):
        multivariate_kinetic(pair, make_square_grid(other))
    with pytest.raises(DomainError):
        multivariate_kinetic(pair, g1)
    with pytest.raises(DomainError):
        box_pair(1.0, make_radial_grid(1.0, 64))

    simpson = make_uniform_grid(0.0, 1.0, 65, rule="simpson")
    trapezoid = make_uniform_grid(0.0, 1.0, 65)
    with pytest.raises(UsageError):
        multivariate_kinetic(box_pair(1.0, simpson), make_square_grid(trapezoid))
    assert multivariate_kinetic(box_pair(1.0, simpson), make_square_grid(simpson)) > 0.0


def test_pair_from_levels():
    g1, _ = _grids("harm1d", 64)
    pair = pair_from_levels("harm1d", (0, 1), g1, omega=1.0)
    assert pair.name == "harm1d"
    assert np.array_equal(pair.theta(), harmonic_pair(g1).theta())
    with pytest.raises(DomainError):
        pair_from_levels("hydrogen", (0, 1), g1)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
