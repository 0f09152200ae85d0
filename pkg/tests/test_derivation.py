import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from yangvir.algebra import Element, a
from yangvir.derivation import (
    a0_polynomial,
    central_equations,
    central_report,
    closed_form_e,
    derive_fg_epsilon,
    fg_epsilon_report,
    gamma_report,
    printed_sum_e,
    solve_central,
    solve_delta_prime,
    solve_gamma,
)
from yangvir.errors import NotProportionalError, WindowTooSmallError
from yangvir.linalg import in_span
from yangvir.tensor import TensorElement, central_cubic

A = central_cubic()


class TestGamma:
    def test_dimensions(self):
        sol = solve_gamma(3, 3)
        assert sol.dimension == 7 and sol.of_expected_form
        assert solve_gamma(1, 1).dimension == 3

    def test_form_of_solutions(self):
        sol = solve_gamma(3, 2)
        col = {k: i for i, k in enumerate(sol.unknowns)}
        for v in sol.basis:
            for n in range(-2, 3):
                assert v[col[(0, n)]] == 0
                ratios = {v[col[(m, n)]] / m for m in range(-3, 4) if m}
                assert len(ratios) == 1

    def test_against_sympy(self):
        # l gamma_mn = m gamma_ln for all l, m, n in the window
        M = N = 2
        unknowns = [(m, n) for m in range(-M, M + 1) for n in range(-N, N + 1)]
        idx = {u: i for i, u in enumerate(unknowns)}
        rows = []
        for l in range(-M, M + 1):
            for m in range(-M, M + 1):
                for n in range(-N, N + 1):
                    r = [0] * len(unknowns)
                    r[idx[(m, n)]] += l
                    r[idx[(l, n)]] -= m
                    rows.append(r)
        assert sp.Matrix(rows).rank() == len(unknowns) - solve_gamma(M, N).dimension

    def test_report(self):
        rep = gamma_report(3, 3)
        assert rep.passed and rep.details["dimension"] == 7


class TestCentral:
    def test_window_three(self):
        sol = solve_central(3)
        assert sol.dimension == 2
        assert in_span(sol.basis, (1, 2, 3)) and in_span(sol.basis, (1, 8, 27))
        assert (2, 1, (5, -4, 1)) in central_equations(3)

    @pytest.mark.parametrize("window", [3, 4, 5, 6, 8])
    def test_span(self, window):
        sol = solve_central(window)
        assert sol.dimension == 2
        assert sol.labels == ("m", "m^3")
        lin = tuple(range(1, window + 1))
        cub = tuple(m**3 for m in lin)
        assert in_span(sol.basis, lin) and in_span(sol.basis, cub)
        assert in_span([lin, cub], sol.basis[0]) and in_span([lin, cub], sol.basis[1])

    def test_against_sympy(self):
        window = 6
        c = sp.symbols(f"c1:{window + 1}")
        cc = lambda k: 0 if k == 0 else (c[k - 1] if k > 0 else -c[-k - 1])
        eqs = []
        for m in range(-window, window + 1):
            for n in range(-window, window + 1):
                if abs(m + n) <= window:
                    eqs.append((m - n) * cc(m + n) - (m + 2 * n) * cc(m) + (2 * m + n) * cc(n))
        mat, _ = sp.linear_eq_to_matrix(eqs, c)
        assert len(mat.nullspace()) == 2

    def test_too_small(self):
        with pytest.raises(WindowTooSmallError):
            solve_central(2)

    def test_report(self):
        rep = central_report(6)
        assert rep.passed and rep.details["closed_forms"] == ["m", "m^3"]


class TestFGEpsilon:
    def test_constant(self):
        res = derive_fg_epsilon(1, 1)
        assert (res.f, res.g) == (-1, 0)
        assert str(res.F_poly) == "-1/3*a[0]^3" and not res.G_poly
        assert set(res.e) == {1}
        assert res.passed

    def test_e3(self):
        res = derive_fg_epsilon(1, 4, window=3)
        assert (res.f, res.g) == (-5, 4)
        assert res.e[2] == Fraction(41, 9) == -res.f - res.g / 9

    def test_zero(self):
        res = derive_fg_epsilon(0, 0, alpha=2, beta=Fraction(1, 3))
        assert res.f == res.g == 0 and set(res.e) == {0}
        assert res.F_poly == Element({(a(0),): 2}) and res.G_poly == Element({(a(0),): Fraction(1, 3)})

    @given(
        st.fractions(min_value=-10, max_value=10, max_denominator=7),
        st.fractions(min_value=-10, max_value=10, max_denominator=7),
    )
    def test_closed_forms(self, e1, e2):
        res = derive_fg_epsilon(e1, e2, window=10)
        assert res.f == (e1 - 4 * e2) / 3
        assert res.g == Fraction(4, 3) * (e2 - e1)
        for m in range(1, 11):
            assert res.e[m - 1] == closed_form_e(e1, e2, m)
        assert res.passed

    def test_printed_sum_residual(self):
        res = derive_fg_epsilon(1, 4, window=3)
        assert res.printed_residuals[0] == Fraction(1, 3) * (4 - 1)
        assert printed_sum_e(Fraction(1), Fraction(4), 1) - 1 == 1
        rep = fg_epsilon_report(1, 4, 3)
        assert rep.details["printed_sum_residual"]["1"] == 1

    def test_telescoping(self):
        for r in range(2, 30):
            assert Fraction(2 * r - 1, r * r * (r - 1) ** 2) == Fraction(1, (r - 1) ** 2) - Fraction(1, r * r)


class TestDeltaPrime:
    def test_three_a(self):
        sol = solve_delta_prime(A * 3)
        assert sol.particular == a0_polynomial([0, 0, 0, 1])
        assert sol.kernel == (a0_polynomial([0, 1]),)

    def test_zero_target(self):
        sol = solve_delta_prime(TensorElement.zero())
        assert not sol.particular and sol.kernel == (a0_polynomial([0, 1]),)

    def test_example_F(self):
        assert solve_delta_prime(A * -1).particular == derive_fg_epsilon(1, 1).F_poly

    def test_not_proportional(self):
        with pytest.raises(NotProportionalError):
            solve_delta_prime(TensorElement.pure(a(1), a(0)))

    def test_random_multiples(self):
        rng = random.Random(7)
        for _ in range(5):
            c = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
            assert solve_delta_prime(A * c).particular == a0_polynomial([0, 0, 0, c / 3])
