import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphanova.indexing import ParityVector
from sphanova.parity import (
    QuadSpec,
    anova_operator,
    check_integral_conditions,
    iterative_vs_moebius,
    nested_projection,
    parity_component,
    project,
)
from sphanova.sphere import sample_uniform

Q = QuadSpec(nodes=100_000, seed=3)


def mixed(x):
    x = np.atleast_2d(x)
    return np.exp(x[:, 0]) * np.cos(2 * x[:, 1]) + x[:, 0] * x[:, 2] ** 3 + x[:, 1] ** 2 * x[:, 3]


def all_parities(d):
    return [ParityVector(bits) for bits in itertools.product((0, 1), repeat=d + 1)]


@pytest.mark.parametrize("d", [2, 3, 4])
def test_parity_components_sum_to_function(d):
    f = (lambda x: np.exp(x[:, 0]) * np.sin(x[:, -1] + 0.3) + x[:, 1] ** 3) if d < 3 else mixed
    x = sample_uniform(d, 40, 1)
    total = sum(parity_component(f, xi, x) for xi in all_parities(d))
    assert np.max(np.abs(total - f(x))) < 1e-10


@settings(max_examples=10, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=4, max_size=4), st.integers(0, 3))
def test_parity_component_transforms_with_sign(bits, flip):
    xi = ParityVector(tuple(bits))
    x = sample_uniform(3, 10, 4)
    k = np.ones(4)
    k[flip] = -1
    lhs = parity_component(mixed, xi, x * k)
    assert np.allclose(lhs, xi.sign(k) * parity_component(mixed, xi, x), atol=1e-13)


def test_parity_component_length_checked():
    with pytest.raises(ValueError):
        parity_component(mixed, ParityVector((0, 1)), sample_uniform(3, 2, 0))


@pytest.mark.parametrize("d", [4, 10])
def test_projection_onto_empty_set(d):
    val, se = project(lambda x: x[:, 0] ** 4, (), [], d, Q)
    assert abs(val - 3 / ((d + 3) * (d + 1))) <= 3 * se
    val, se = project(lambda x: x[:, 1] ** 2, (), [], d, Q)
    assert abs(val - 1 / (d + 1)) <= 3 * se


def test_projection_errors():
    with pytest.raises(ValueError):
        project(mixed, (1, 2, 3), [0.1, 0.1, 0.1], 3)  # |u| = d
    with pytest.raises(ValueError):
        project(mixed, (1,), [1.2], 3)
    with pytest.raises(ValueError):
        project(mixed, (1, 2, 3, 4), [0.1] * 4, 3)


def test_projections_are_reproducible():
    assert project(mixed, (1,), [0.3], 3, Q) == project(mixed, (1,), [0.3], 3, Q)


@pytest.mark.parametrize("v,u,y", [((), (1,), []), ((1,), (1, 2), [0.4]), ((2,), (1, 2), [-0.5])])
def test_nested_projection_reduces(v, u, y):
    d = 4
    f = lambda x: x[:, 0] ** 2 * x[:, 1] ** 2 + x[:, 0] * x[:, 1] + np.cos(x[:, 2])  # noqa: E731
    nested, se_n = nested_projection(f, v, u, y, d, QuadSpec(nodes=4000, seed=5), outer=400)
    direct, se_d = project(f, v, y, d, Q)
    assert abs(nested - direct) <= 3 * np.hypot(se_n, se_d) + 1e-12


@pytest.mark.parametrize("u,y", [((), []), ((2,), [0.3]), ((1, 2), [0.2, -0.4]), ((1, 2, 3), [0.1, 0.3, -0.2])])
def test_iterative_and_moebius_agree(u, y):
    it, mo = iterative_vs_moebius(mixed, u, y, 4, QuadSpec(nodes=20_000))
    assert abs(it - mo) <= 1e-9


def test_anova_operator_examples():
    d = 4
    y = 0.3
    val, se = anova_operator(lambda x: x[:, 0] ** 2, (2,), [y], d, Q)
    assert abs(val - ((1 - y * y) / d - 1 / (d + 1))) <= 3 * se + 1e-12
    val, se = anova_operator(lambda x: x[:, 4], (5,), [0.6], 10, Q)
    assert abs(val - 0.6) <= 3 * se + 1e-12
    with pytest.raises(ValueError):
        anova_operator(mixed, (1, 2, 3, 4), [0.1] * 4, 4)


def test_anova_term_of_mixed_parity_part_is_odd():
    d = 3
    u = (1, 2)
    xi = ParityVector.from_support(d, u)
    g = lambda x: parity_component(mixed, xi, x)  # noqa: E731
    y = np.array([0.3, -0.45])
    a, sa = anova_operator(g, u, y, d, Q)
    for i in range(2):
        yf = y.copy()
        yf[i] *= -1
        b, sb = anova_operator(g, u, yf, d, Q)
        assert abs(a + b) <= 3 * np.hypot(sa, sb) + 1e-12


def test_odd_term_has_vanishing_lower_projections():
    d = 4
    g = lambda x: x[:, 0] * x[:, 1] ** 3  # noqa: E731
    for a, y in (((1,), [0.5]), ((2,), [-0.3]), ((3,), [0.7]), ((1, 3), [0.2, 0.4])):
        val, se = project(g, a, y, d, Q)
        assert abs(val) <= 3 * se + 1e-12


def test_integral_conditions_accept_odd_functions():
    assert check_integral_conditions(lambda y: y[:, 0], (2,), 4).passed
    assert check_integral_conditions(lambda y: y[:, 0] * y[:, 1] ** 3, (1, 3), 4).passed
    zero = check_integral_conditions(lambda y: 0 * y[:, 0], (1,), 4)
    assert zero.passed and zero.max_violation == 0.0


@pytest.mark.parametrize("g,u", [
    (lambda y: y[:, 0] ** 2, (2,)),
    (lambda y: y[:, 0] ** 2 - 1 / 5, (2,)),
    (lambda y: y[:, 1] * y[:, 0] ** 2 - y[:, 1] / 4 + y[:, 1] ** 3 / 4, (1, 2)),
])
def test_integral_conditions_reject_functions_even_in_some_direction(g, u):
    rep = check_integral_conditions(g, u, 4)
    assert not rep.passed
    assert rep.max_z > 10


def test_integral_conditions_order_checked():
    with pytest.raises(ValueError):
        check_integral_conditions(lambda y: y[:, 0], (1, 2, 3, 4), 4)
