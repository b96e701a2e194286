#!/usr/bin/env python3
import sys
import os
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import math

import numpy as np
import pytest

from ofke.errors import DomainError, UsageError
from ofke.grid import (
    Measure,
    ScalarField,
    constant,
    derivative,
    derivative_matrix,
    integrate,
    laplacian,
    make_grid_from_nodes,
    make_radial_grid,
    make_square_grid,
    make_uniform_grid,
    partial,
    sample,
)


def test_uniform_grid_integrates_sine():
    g = make_uniform_grid(0.0, math.pi, 2001)
    value = integrate(sample(np.sin, g), g)
    assert value == pytest.approx(2.0, rel=1e-6), "Trapezoid rule should integrate sin over [0, pi]"


def test_simpson_rule_is_more_accurate():
    trap = make_uniform_grid(0.0, 1.0, 101)
    simp = make_uniform_grid(0.0, 1.0, 101, rule="simpson")
    exact = math.e - 1.0
    trap_error = abs(integrate(sample(np.exp, trap), trap) - exact)
    simp_error = abs(integrate(sample(np.exp, simp), simp) - exact)
    assert simp_error < trap_error / 100


def test_uniform_grid_rejects_bad_arguments():
    with pytest.raises(DomainError):
        make_uniform_grid(0.0, 1.0, 2)
    with pytest.raises(DomainError):
        make_uniform_grid(1.0, 1.0, 10)
    with pytest.raises(DomainError):
        make_uniform_grid(0.0, 1.0, 10, rule="simpson")
    with pytest.raises(DomainError):
        make_uniform_grid(0.0, 1.0, 11, rule="boole")


def test_radial_grid_layout():
    g = make_radial_grid(10.0, 100)
    assert g.measure == Measure.RADIAL_3D
    assert g.nodes[0] == pytest.approx(0.05), "First node sits half a step from the origin"
    assert g.nodes[-1] == pytest.approx(9.95)
    assert np.allclose(g.weights, 4.0 * np.pi * g.nodes ** 2 * 0.1)


def test_radial_grid_normalizes_hydrogen_density():
    g = make_radial_grid(30.0, 20000)
    rho = sample(lambda r: np.exp(-2.0 * r) / np.pi, g)
    assert integrate(rho, g) == pytest.approx(1.0, abs=1e-8)


def test_radial_grid_rejects_bad_arguments():
    with pytest.raises(DomainError):
        make_radial_grid(0.0, 100)
    with pytest.raises(DomainError):
        make_radial_grid(10.0, 2)


def test_derivative_of_sine():
    g = make_uniform_grid(0.0, math.pi, 1001)
    slope = derivative(sample(np.sin, g), g)
    assert np.max(np.abs(slope.values - np.cos(g.nodes))) < 1e-5


def test_derivative_is_exact_for_quadratics():
    g = make_uniform_grid(0.0, 1.0, 101)
    slope = derivative(sample(lambda x: x ** 2, g), g).values
    assert g.nodes[50] == 0.5
    assert abs(slope[50] - 1.0) < 1e-10
    assert np.max(np.abs(slope - 2.0 * g.nodes)) < 1e-10


def test_integrate_is_linear():
    g = make_uniform_grid(0.0, 2.0, 201)
    f, h = sample(np.sin, g), sample(lambda x: x ** 2, g)
    combined = sample(lambda x: 2.5 * np.sin(x) - 0.75 * x ** 2, g)
    assert integrate(combined, g) == pytest.approx(2.5 * integrate(f, g) - 0.75 * integrate(h, g), abs=1e-12)


def test_quadrature_and_derivative_converge_quadratically():
    def errors(n):
        g = make_uniform_grid(0.0, 1.0, n)
        f = sample(np.exp, g)
        quad = abs(integrate(f, g) - (math.e - 1.0))
        slope = np.max(np.abs(derivative(f, g).values - np.exp(g.nodes)))
        return quad, slope

    coarse = errors(101)
    fine = errors(201)
    assert fine[0] / coarse[0] <= 0.3, "Quadrature error should drop at least quadratically"
    assert fine[1] / coarse[1] <= 0.3, "Derivative error should drop at least quadratically"


def test_radial_derivative_converges_quadratically():
    def error(n):
        g = make_radial_grid(10.0, n)
        slope = derivative(sample(lambda r: np.exp(-r), g), g)
        return np.max(np.abs(slope.values + np.exp(-g.nodes)))

    assert error(400) / error(200) <= 0.3


def test_radial_laplacian_of_exponential():
    g = make_radial_grid(20.0, 4000)
    lap = laplacian(sample(lambda r: np.exp(-r), g), g)
    exact = np.exp(-g.nodes) * (1.0 - 2.0 / g.nodes)
    interior = (g.nodes >= 1.0) & (g.nodes <= 10.0)
    assert np.max(np.abs(lap.values[interior] - exact[interior])) < 1e-4


def test_line_laplacian_of_gaussian():
    g = make_uniform_grid(-6.0, 6.0, 4001)
    lap = laplacian(sample(lambda x: np.exp(-x ** 2), g), g)
    exact = (4.0 * g.nodes ** 2 - 2.0) * np.exp(-g.nodes ** 2)
    assert np.max(np.abs(lap.values - exact)) < 1e-4


def test_derivative_matrix_matches_derivative():
    for g in (make_uniform_grid(-3.0, 2.0, 57), make_radial_grid(8.0, 64)):
        f = sample(lambda x: np.sin(x) * np.exp(-0.2 * x ** 2), g)
        D = derivative_matrix(g)
        assert D.shape == (g.n_axis, g.n_axis)
        assert np.allclose(D @ f.values, derivative(f, g).values, rtol=1e-10, atol=1e-12)


def test_derivative_matrix_needs_uniform_grid():
    g = make_grid_from_nodes(np.array([0.0, 0.1, 0.3, 0.6, 1.0]), Measure.LINE_1D)
    with pytest.raises(DomainError):
        derivative_matrix(g)


def test_grid_from_nodes_matches_uniform_weights():
    uniform = make_uniform_grid(-1.0, 1.0, 41)
    rebuilt = make_grid_from_nodes(uniform.nodes, Measure.LINE_1D)
    assert np.allclose(rebuilt.weights, uniform.weights)
    assert rebuilt.is_uniform


def test_grid_from_nodes_rejects_unsorted_nodes():
    with pytest.raises(DomainError):
        make_grid_from_nodes(np.array([0.0, 0.2, 0.1, 0.5]), Measure.LINE_1D)
    with pytest.raises(DomainError):
        make_grid_from_nodes(np.array([0.0, 0.1, 0.2]), Measure.RADIAL_3D)


def test_square_grid_is_tensor_product():
    axis = make_uniform_grid(0.0, 1.0, 33)
    g2 = make_square_grid(axis)
    assert g2.measure == Measure.SQUARE_2D
    assert g2.shape == (33, 33)
    assert integrate(constant(g2, 1.0), g2) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        make_square_grid(make_radial_grid(1.0, 10))


def test_partial_derivative_along_each_axis():
    axis = make_uniform_grid(0.0, 2.0, 401)
    g2 = make_square_grid(axis)
    x1, x2 = np.meshgrid(axis.nodes, axis.nodes, indexing="ij")
    values = np.sin(x1) * x2 ** 2
    assert np.allclose(partial(values, g2, axis=0), np.cos(x1) * x2 ** 2, atol=1e-4)
    assert np.allclose(partial(values, g2, axis=1), 2.0 * np.sin(x1) * x2, atol=1e-4)


def test_fields_are_checked_against_their_grid():
    g = make_uniform_grid(0.0, 1.0, 11)
    other = make_uniform_grid(0.0, 2.0, 11)
    with pytest.raises(UsageError):
        ScalarField(np.zeros(12), g)
    with pytest.raises(DomainError):
        ScalarField(np.full(11, np.nan), g)
    with pytest.raises(UsageError):
        integrate(constant(other), g)


def test_grid_arrays_are_read_only():
    g = make_uniform_grid(0.0, 1.0, 11)
    with pytest.raises(ValueError):
        g.nodes[0] = 5.0
    f = constant(g, 2.0)
    with pytest.raises(ValueError):
        f.values[0] = 1.0


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
