from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphanova import exact
from sphanova.basis import (
    RedundantBasisError,
    angular_parity,
    build_catalog,
    count_terms,
    count_terms_closed_form,
    enumerate_terms,
    evaluate_basis,
    table_keep_rule,
    verify_parity,
)
from sphanova.fit import assemble
from sphanova.indexing import IndexSet
from sphanova.sphere import sample_uniform


def test_term_counts_small():
    assert count_terms(2, omit=False) == 15
    assert count_terms(3, omit=False) == 49
    assert count_terms(3, omit=True) == 34


@given(st.integers(2, 8), st.booleans())
@settings(deadline=None, max_examples=14)
def test_closed_form_counts(d, omit):
    assert count_terms(d, omit) == count_terms_closed_form(d, omit)


def test_enumerate_terms():
    terms = enumerate_terms(10, 1)
    assert len(terms) == 22  # constant, 10 x (even, odd), x_11 odd only
    assert terms == sorted(terms)
    assert not any(t.omitted() for t in enumerate_terms(5, 2))
    with pytest.raises(ValueError):
        enumerate_terms(3, 3)


def test_keep_rule():
    # m = N - 2j; sine needs m >= 2, cosine m >= 3
    assert table_keep_rule(2, 0, "sin", (1, 1))
    assert not table_keep_rule(2, 0, "cos", (0, 0))
    assert not table_keep_rule(3, 1, "cos", (1, 0))
    assert table_keep_rule(3, 0, "cos", (1, 0))
    assert not table_keep_rule(1, 0, "sin", (0, 1))
    assert angular_parity(3, "cos") == (1, 0)
    assert angular_parity(3, "sin") == (0, 1)
    assert angular_parity(2, "sin") == (1, 1)


def test_catalog_sizes_d10():
    cat = build_catalog(10, 2, 10)
    assert len(cat) == 2377
    assert len(build_catalog(10, 2, 10, mode="table")) == 2381
    per_class = {}
    for f in cat:
        if f.term.order == 2 and f.term.u == IndexSet.of(1, 2):
            per_class[f.term.xi_u] = per_class.get(f.term.xi_u, 0) + 1
    assert per_class == {(1, 1): 15, (0, 0): 10, (1, 0): 10, (0, 1): 10}
    pinned = [f for f in cat if f.term.u == IndexSet.of(10, 11)]
    assert sum(f.term.xi_u == (0, 1) for f in pinned) == 6
    assert sum(f.term.xi_u == (1, 1) for f in pinned) == 15
    assert len(pinned) == 21


@pytest.mark.parametrize("d,N", [(4, 6), (6, 8)])
def test_within_term_exact_orthonormality(d, N):
    cat = build_catalog(d, 2, N)
    for t, cols in cat.term_blocks().items():
        if t.order != 2:
            continue
        polys = [{(p, q): Fraction(v) for (p, q), v in np.ndenumerate(cat.functions[c].coeffs) if v}
                 for c in cols]
        G = np.array([[float(exact.inner(p1, p2, d)) for p2 in polys] for p1 in polys])
        assert np.allclose(G, np.eye(len(cols)), atol=1e-10)


@pytest.mark.parametrize("d", [4, 10])
def test_radial_beta_equal_to_m_is_orthogonal_and_shift_breaks_it(d):
    # same m and angular type, different radial degree j
    for m in (2, 3):
        for N1, N2 in ((m, m + 2), (m, m + 4)):
            p1 = exact.disk_poly(N1, (N1 - m) // 2, "sin", d)
            p2 = exact.disk_poly(N2, (N2 - m) // 2, "sin", d)
            assert exact.inner(p1, p2, d) == 0
            shift = Fraction(d - 2, 2)
            q1 = exact.disk_poly(N1, (N1 - m) // 2, "sin", d, shift)
            q2 = exact.disk_poly(N2, (N2 - m) // 2, "sin", d, shift)
            assert exact.inner(q1, q2, d) != 0


def test_every_column_has_its_parity():
    cat = build_catalog(5, 2, 6)
    assert all(verify_parity(f) for f in cat)


def test_evaluate_basis_matches_assembly():
    cat = build_catalog(4, 2, 6)
    x = sample_uniform(4, 50, 3)
    A = assemble(x, cat).matrix
    for c in range(0, len(cat), 7):
        assert np.allclose(evaluate_basis(cat.functions[c], x), A[:, c], atol=1e-12)


def test_columns_have_mean_zero_and_unit_variance():
    M = 100_000
    cat = build_catalog(4, 2, 4)
    A = assemble(sample_uniform(4, M, 5), cat).matrix[:, 1:]
    se = A.std(axis=0) / np.sqrt(M)
    assert np.all(np.abs(A.mean(axis=0)) < 4.5 * se)
    m2 = (A**2).mean(axis=0)
    se2 = (A**2).std(axis=0) / np.sqrt(M)
    assert np.all(np.abs(m2 - 1.0) < 4.5 * se2)


def test_within_term_empirical_gram_within_sampling_error():
    M = 100_000
    cat = build_catalog(5, 2, 6)
    A = assemble(sample_uniform(5, M, 6), cat).matrix
    for t, cols in cat.term_blocks().items():
        for i, ci in enumerate(cols):
            for cj in cols[i + 1:]:
                prod = A[:, ci] * A[:, cj]
                assert abs(prod.mean()) <= 5 * prod.std() / np.sqrt(M) + 1e-12


@pytest.mark.parametrize("d,N", [(4, 4), (5, 6)])
def test_table_mode_is_rank_deficient_but_anova_mode_is_not(d, N):
    x = sample_uniform(d, 20_000, 1)
    smin = {}
    for mode in ("anova", "table"):
        A = assemble(x, build_catalog(d, 2, N, mode=mode)).matrix
        A /= np.linalg.norm(A, axis=0)
        smin[mode] = np.linalg.svd(A, compute_uv=False)[-1]
    assert smin["anova"] > 1e-2
    assert smin["table"] < 1e-10


def test_wrong_keep_rule_is_detected():
    loose = lambda N, j, ang, par: N >= 2 and N - 2 * j >= 1  # noqa: E731
    with pytest.raises(RedundantBasisError):
        build_catalog(6, 2, 8, keep_rule=loose)


def test_catalog_errors_and_description():
    with pytest.raises(NotImplementedError):
        build_catalog(5, 3, 4)
    with pytest.raises(ValueError):
        build_catalog(5, 2, 1)
    cat = build_catalog(3, 1, 4)
    desc = cat.describe()
    assert desc["n_columns"] == len(cat) == len(desc["functions"])
    with pytest.raises(KeyError):
        build_catalog(3, 1, 4).columns_of(enumerate_terms(4, 2)[-1])
