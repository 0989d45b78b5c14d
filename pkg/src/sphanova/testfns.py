"""Benchmark functions on S^d with known term structure and analytic oracles.

All functions act on rows of points; coordinate ``x_i`` is column ``i - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .indexing import IndexSet, ParityVector, TermIndex
from .orthopoly import gauss_legendre_nodes
from .sphere import surface_area

Vectorized = Callable[[np.ndarray], np.ndarray]


def _c(x: np.ndarray, i: int) -> np.ndarray:
    return np.atleast_2d(x)[:, i - 1]


def f_A(x):
    return _c(x, 1) * _c(x, 2) ** 3 + 2.0 * _c(x, 3) * _c(x, 4) ** 5 + 0.05 * _c(x, 5)


def f_B(x):
    return _c(x, 2) * _c(x, 1) ** 2


def f_C(x):
    return _c(x, 1) ** 4 + _c(x, 2) ** 2


def f_D(x):
    return (5.0 * _c(x, 1) * _c(x, 2) ** 2 + _c(x, 4) + np.exp(_c(x, 3))
            + 10.0 * np.sin(3.0 * np.pi * _c(x, 5)) * _c(x, 2) ** 4)


def f_E(x):
    s1 = np.sin(_c(x, 1))
    return s1 + 7.0 * np.sin(_c(x, 2)) ** 2 + 0.1 * _c(x, 3) ** 4 * s1


def f_F(x):
    return (_c(x, 1) * _c(x, 2) * _c(x, 3)) ** 2


def _sets(*groups) -> tuple[IndexSet, ...]:
    return tuple(IndexSet(tuple(g)) for g in groups)


@dataclass(frozen=True)
class NamedTestFunction:
    """A benchmark function with the index sets its decomposition occupies.

    ``support_within`` is set for functions whose order exceeds the fitted
    order; detected support is then only required to lie inside it.
    """

    name: str
    func: Vectorized
    expected_support: tuple[IndexSet, ...]
    in_span_q2: bool
    min_dim: int
    support_within: IndexSet | None = None

    def __call__(self, x) -> np.ndarray:
        return self.func(x)


_REGISTRY = {
    "A": NamedTestFunction("A", f_A, _sets((1, 2), (3, 4), (5,)), True, 4),
    "B": NamedTestFunction("B", f_B, _sets((2,), (1, 2)), True, 2),
    "C": NamedTestFunction("C", f_C, _sets((1,), (2,)), True, 2),
    "D": NamedTestFunction("D", f_D, _sets((1,), (1, 2), (3,), (4,), (5,), (2, 5)), False, 4),
    "E": NamedTestFunction("E", f_E, _sets((1,), (2,), (1, 3)), False, 3),
    "F": NamedTestFunction("F", f_F, _sets((1,), (2,), (3,), (1, 2), (1, 3), (2, 3)), False, 3,
                           support_within=IndexSet((1, 2, 3))),
}


def names() -> list[str]:
    return sorted(_REGISTRY)


def test_function(name: str) -> NamedTestFunction:
    try:
        return _REGISTRY[name.upper()]
    except KeyError:
        raise KeyError(f"unknown test function {name!r}; choose from {names()}") from None


test_function.__test__ = False  # keep pytest from collecting it


@dataclass(frozen=True)
class AnalyticTerm:
    """Closed form of ``f_{u, xi}`` as a function of the ``u`` coordinates.

    ``closed_form`` takes an ``(n, |u|)`` array (ignored for ``u`` empty) and
    returns ``n`` values.
    """

    term: TermIndex
    closed_form: Callable[[np.ndarray], np.ndarray]

    def on_sphere(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        cols = [i - 1 for i in self.term.u.members]
        return self.closed_form(x[:, cols]) * np.ones(x.shape[0])


def _term(d: int, u, odd) -> TermIndex:
    return TermIndex(IndexSet(tuple(u)), ParityVector.from_support(d, odd))


def mean_C(d: int) -> Fraction:
    """Exact mean of ``x_1^4 + x_2^2`` on S^d: ``(d + 6) / ((d + 3)(d + 1))``."""
    return Fraction(3, (d + 3) * (d + 1)) + Fraction(1, d + 1)


def analytic_terms(name: str, d: int) -> list[AnalyticTerm]:
    """Nonzero terms of the decompositions of A, B and C on S^d."""
    name = name.upper()
    if name == "A":
        if d < 4:
            raise ValueError("f_A needs d >= 4")
        return [
            AnalyticTerm(_term(d, (), ()), lambda y: np.zeros(len(y))),
            AnalyticTerm(_term(d, (1, 2), (1, 2)), lambda y: y[:, 0] * y[:, 1] ** 3),
            AnalyticTerm(_term(d, (3, 4), (3, 4)), lambda y: 2.0 * y[:, 0] * y[:, 1] ** 5),
            AnalyticTerm(_term(d, (5,), (5,)), lambda y: 0.05 * y[:, 0]),
        ]
    if name == "B":
        return [
            AnalyticTerm(_term(d, (2,), (2,)), lambda y: (y[:, 0] - y[:, 0] ** 3) / d),
            AnalyticTerm(_term(d, (1, 2), (2,)),
                         lambda y: y[:, 1] * y[:, 0] ** 2 - (y[:, 1] - y[:, 1] ** 3) / d),
        ]
    if name == "C":
        c0 = float(mean_C(d))
        m4 = 3.0 / ((d + 3) * (d + 1))
        return [
            AnalyticTerm(_term(d, (), ()), lambda y: np.full(len(y), c0)),
            AnalyticTerm(_term(d, (1,), ()), lambda y: y[:, 0] ** 4 - m4),
            AnalyticTerm(_term(d, (2,), ()), lambda y: y[:, 0] ** 2 - 1.0 / (d + 1)),
        ]
    raise NotImplementedError(f"no closed-form decomposition for f_{name}")


def marginal_weight_1d(d: int, x: np.ndarray) -> np.ndarray:
    """Density of one coordinate of a uniform point on S^d."""
    return surface_area(d - 1) / surface_area(d) * (1.0 - x * x) ** (0.5 * (d - 2))


def oracle_term_variance(term: AnalyticTerm, d: int, n_radial: int = 128, n_angular: int = 256,
                         n_1d: int = 256) -> float:
    """``E[f_{u, xi}^2]`` under the uniform measure, by deterministic quadrature.

    1-D: substitution ``x = sin(phi)`` and Gauss-Legendre in ``phi``, which
    turns the weight ``(1 - x^2)^((d-2)/2) dx`` into ``cos(phi)^(d-1) dphi``.
    2-D: ``r = sin(phi)`` radially with Gauss-Legendre and the trapezoid rule
    in the angle.  Both are scaled by ratios of sphere areas.
    """
    order = term.term.order
    if order == 0:
        return float(term.closed_form(np.zeros((1, 0)))[0] ** 2)
    if order == 1:
        t, w = gauss_legendre_nodes(n_1d)
        phi = 0.5 * np.pi * t
        x = np.sin(phi)[:, None]
        g = term.closed_form(x)
        dens = np.cos(phi) ** (d - 1) * 0.5 * np.pi
        return float(surface_area(d - 1) / surface_area(d) * np.sum(w * dens * g**2))
    if order == 2:
        if d < 3:
            raise ValueError("2-D terms need d >= 3")
        t, w = gauss_legendre_nodes(n_radial)
        phi = 0.25 * np.pi * (t + 1.0)
        r = np.sin(phi)
        wr = w * 0.25 * np.pi * np.cos(phi) ** (d - 2) * r
        th = 2.0 * np.pi * np.arange(n_angular) / n_angular
        R, TH = np.meshgrid(r, th, indexing="ij")
        y = np.stack([(R * np.cos(TH)).ravel(), (R * np.sin(TH)).ravel()], axis=1)
        g2 = term.closed_form(y).reshape(R.shape) ** 2
        inner = g2.sum(axis=1) * (2.0 * np.pi / n_angular)
        return float(surface_area(d - 2) / surface_area(d) * np.sum(wr * inner))
    raise NotImplementedError("oracle variances are available for |u| <= 2")
