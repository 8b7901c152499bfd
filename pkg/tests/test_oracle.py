import math

import numpy as np
import pytest
from scipy.special import lpmv

from sphesusy import oracle
from sphesusy.oracle import LegendreBasis, build_matrix, converge, eigenfunction_eval, solve
from sphesusy.tridiag import ConvergenceError, eigh_tridiagonal_lowest, sturm_count


@pytest.mark.parametrize("m, l, x, expected", [
    (0, 0, 0.3, 1.0),
    (0, 1, 0.5, 0.5),
    (0, 2, 0.5, -0.125),
])
def test_assoc_legendre_examples(m, l, x, expected):
    assert oracle.assoc_legendre(m, l, x) == pytest.approx(expected, rel=1e-15)


def test_assoc_legendre_against_scipy():
    # scipy carries the Condon-Shortley phase (-1)^m
    xs = np.linspace(-0.95, 0.95, 9)
    for m in range(0, 6):
        for l in range(m, 60, 7):
            for x in xs:
                ref = (-1) ** m * lpmv(m, l, x)
                assert oracle.assoc_legendre(m, l, x) == pytest.approx(ref, rel=1e-12, abs=1e-300)


def test_assoc_legendre_domain():
    with pytest.raises(ValueError):
        oracle.assoc_legendre(0, 1, 1.5)
    with pytest.raises(ValueError):
        oracle.assoc_legendre(3, 2, 0.1)


def test_normalized_table_orthonormal():
    x, w = np.polynomial.legendre.leggauss(200)
    for m in (0, 2, 5):
        T = oracle.normalized_legendre_table(m, m + 40, x)
        G = (T * w) @ T.T
        np.testing.assert_allclose(G, np.eye(41), atol=1e-12)


def test_legendre_trigform_matches_numeric():
    th = np.linspace(0.2, 2.9, 7)
    for m in range(4):
        for l in range(m, m + 5):
            f = oracle.legendre_trigform(m, l)
            ref = np.sqrt(np.sin(th)) * np.array([oracle.assoc_legendre(m, l, math.cos(t)) for t in th])
            np.testing.assert_allclose(f.evaluate(th), ref, rtol=1e-12, atol=1e-14)


def test_coupling_bounds():
    for m in range(6):
        b = LegendreBasis(m, 400)
        a = b.coupling
        assert np.all((a > 0) & (a < 1))
        assert abs(a[-1] - 0.5) < 1 / b.l_max


def test_build_matrix_examples():
    b = LegendreBasis(0, 10)
    d, e = build_matrix(b, 0.0, 0)
    np.testing.assert_array_equal(d, [l * (l + 1) for l in range(0, 11, 2)])
    assert not np.any(e)
    d, e = build_matrix(b, 1.0, 0)
    assert d[0] == pytest.approx(-1 / 3, rel=1e-15)
    assert e[0] == pytest.approx(-math.sqrt(1 / 3) * math.sqrt(4 / 15), rel=1e-15)


def test_matrix_matches_quadrature():
    # <l|x^2|l'> by Gauss-Legendre quadrature, independent of the recurrence algebra
    x, w = np.polynomial.legendre.leggauss(80)
    for m in (0, 1, 3):
        b = LegendreBasis(m, m + 20)
        T = oracle.normalized_legendre_table(m, b.l_max, x)
        X2 = (T * w * x * x) @ T.T
        for parity in (0, 1):
            d, e = build_matrix(b, 0.7, parity)
            idx = np.arange(parity, b.dimension, 2)
            ls = idx + m
            np.testing.assert_allclose(d, ls * (ls + 1) - 0.7 * X2[idx, idx], atol=1e-12)
            np.testing.assert_allclose(e, -0.7 * X2[idx[:-1], idx[1:]], atol=1e-12)


@pytest.mark.parametrize("m, k, expected", [(0, 3, [0, 2, 6]), (2, 2, [6, 12])])
def test_solve_alpha_zero(m, k, expected):
    vals = [s.eigenvalue for s in solve(LegendreBasis(m, 40), 0.0, k)]
    np.testing.assert_allclose(vals, expected, atol=1e-12)


def test_solve_against_numpy():
    for m in (0, 1, 4):
        for alpha in (-0.5, 0.3, 5.0):
            b = LegendreBasis(m, m + 30)
            ours = [s.eigenvalue for s in solve(b, alpha, 10)]
            ref = []
            for parity in (0, 1):
                d, e = build_matrix(b, alpha, parity)
                ref.extend(np.linalg.eigvalsh(np.diag(d) + np.diag(e, 1) + np.diag(e, -1)))
            np.testing.assert_allclose(ours, sorted(ref)[:10], rtol=1e-13, atol=1e-12)


def test_small_alpha_matches_series():
    E = solve(LegendreBasis(0, 40), 0.1, 1)[0].eigenvalue
    series = -0.1 / 3 - 2 * 0.01 / 135
    assert abs(E - series) < 1e-5
    assert series == pytest.approx(-0.0334815, abs=5e-8)


def test_spectral_invariants():
    for m in (0, 2):
        for alpha in (0.0, 0.4, -2.0):
            b = LegendreBasis(m, 48)
            sols = solve(b, alpha, 8)
            for s in sols:
                assert np.sum(s.coeffs ** 2) == pytest.approx(1.0, abs=1e-14)
                d, e = build_matrix(b, alpha, s.parity)
                Hc = d * s.coeffs
                Hc[:-1] += e * s.coeffs[1:]
                Hc[1:] += e * s.coeffs[:-1]
                assert np.linalg.norm(Hc - s.eigenvalue * s.coeffs) < 1e-10
                assert s.residual_estimate < 1e-10
            for p in (0, 1):
                blk = [s for s in sols if s.parity == p]
                for i in range(len(blk)):
                    for j in range(i):
                        assert abs(np.dot(blk[i].coeffs, blk[j].coeffs)) < 1e-10


def test_alpha_zero_exactness():
    for m in range(6):
        sols = solve(LegendreBasis(m, m + 44), 0.0, 21 - m)
        for i, s in enumerate(sols):
            l = m + i
            assert s.eigenvalue == pytest.approx(l * (l + 1), abs=1e-12)
            unit = np.zeros_like(s.coeffs)
            unit[(l - m - s.parity) // 2] = 1.0
            assert np.max(np.abs(s.coeffs - unit)) < 1e-10


def test_variational_monotonicity():
    for alpha in (0.5, -0.5, 3.0):
        prev = None
        for l_max in (8, 16, 32, 64):
            vals = np.array([s.eigenvalue for s in solve(LegendreBasis(1, l_max), alpha, 3)])
            if prev is not None:
                assert np.all(vals <= prev + 1e-11)
            prev = vals


def test_solve_preconditions():
    with pytest.raises(ValueError):
        solve(LegendreBasis(0, 3), 0.1, 1)
    with pytest.raises(ValueError):
        solve(LegendreBasis(0, 10), 0.1, 6)


def test_eigenfunction_eval_examples():
    b = LegendreBasis(0, 32)
    sols = solve(b, 0.0, 2)
    assert eigenfunction_eval(sols[0], math.pi / 2) == pytest.approx(1 / math.sqrt(2), rel=1e-14)
    assert eigenfunction_eval(sols[1], math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    sol = converge(1, 0.2, 1)[0]
    th = np.linspace(0.01, math.pi - 0.01, 50)
    assert np.all(eigenfunction_eval(sol, th) > 0)


def test_eigenfunction_norm_and_parity():
    x, w = np.polynomial.legendre.leggauss(400)
    th, wt = 0.5 * math.pi * (x + 1), 0.5 * math.pi * w
    grid = np.linspace(0.05, math.pi / 2, 30)
    for alpha in (0.0, 0.3):
        for n, s in enumerate(converge(0, alpha, 4)):
            v = eigenfunction_eval(s, th)
            assert np.dot(wt, v * v) == pytest.approx(1.0, abs=1e-8)
            sign = 1 if n % 2 == 0 else -1
            np.testing.assert_allclose(eigenfunction_eval(s, math.pi - grid),
                                       sign * eigenfunction_eval(s, grid), atol=1e-9)


def test_converge_behaviour():
    sols = converge(0, 0.0, 3)
    assert sols[0].l_max == 32
    a = converge(0, 0.5, 2)
    b = solve(LegendreBasis(0, 2 * a[0].l_max), 0.5, 2)
    for x, y in zip(a, b):
        assert abs(x.eigenvalue - y.eigenvalue) < 1e-11
    neg = converge(0, -0.5, 2)
    for x, y, l in zip(a, neg, (0, 1)):
        assert x.eigenvalue < l * (l + 1) < y.eigenvalue


def test_converge_cap(monkeypatch):
    monkeypatch.setattr(oracle, "L_MAX_CAP", 64)
    monkeypatch.setattr(oracle, "EIG_STABILITY", 0.0)
    with pytest.raises(ConvergenceError) as info:
        converge(0, 0.5, 1)
    assert info.value.block is not None


def test_tridiagonal_solver_direct():
    rng = np.random.default_rng(3)
    d = rng.normal(size=25)
    e = rng.normal(size=24)
    vals, vecs, res = eigh_tridiagonal_lowest(d, e, 6)
    T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    np.testing.assert_allclose(vals, np.linalg.eigvalsh(T)[:6], atol=1e-12)
    np.testing.assert_allclose(vecs.T @ vecs, np.eye(6), atol=1e-10)
    assert sturm_count(d, e, vals[3] + 1e-9) == 4
    assert np.all(res < 1e-10)


def test_flammer_map():
    assert oracle.flammer_to_paper(0.25) == -0.25
