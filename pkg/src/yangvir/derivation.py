"""Derivation chain for the Virasoro-like brackets, redone with exact linear algebra.

* ``solve_gamma``: structure constants of ``[a_m, b_n] = gamma_mn a_{m+n}``
  constrained by Jacobi, ``l gamma_mn = m gamma_ln``.
* ``solve_central``: central terms ``c_m = c_{m,-m}`` of ``[b_m, b_-m]``
  constrained by Jacobi for ``l + m + n = 0``.
* ``derive_fg_epsilon``: the system ``m^3 f + m g + m^3 e_m = 0`` linking the
  reduced coproducts ``D'(F) = f A``, ``D'(G) = g A`` to ``e_m = eps_m^2``.
* ``solve_delta_prime``: polynomials ``P(a0)`` with ``D'(P) = c A``.

Parameters are bound to rationals before solving; square roots of ``e_m`` are
never taken.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import Element, Generator
from .errors import NoSolutionError, NotProportionalError, WindowTooSmallError
from .linalg import RationalMatrix, in_span, nullspace, solve
from .report import CheckReport, Counterexample
from .tensor import TensorElement, central_cubic

A0 = Generator("a", 0)


def a0_power(r: int) -> tuple:
    return (A0,) * r


def a0_polynomial(coeffs: Sequence) -> Element:
    """``sum_r coeffs[r] * a0^r``."""
    return Element({a0_power(r): c for r, c in enumerate(coeffs)})


# --------------------------------------------------------------------------
# gamma_mn


@dataclass(frozen=True)
class GammaSolution:
    window: int
    n_window: int
    unknowns: tuple  # ((m, n), ...) in column order
    basis: tuple
    dimension: int
    expected_dimension: int
    of_expected_form: bool

    @property
    def passed(self) -> bool:
        return self.dimension == self.expected_dimension and self.of_expected_form

    def gamma_n(self, vector) -> dict:
        """The free values ``gamma_n = gamma_{1n}`` of a solution vector."""
        col = {k: i for i, k in enumerate(self.unknowns)}
        return {n: vector[col[(1, n)]] for n in range(-self.n_window, self.n_window + 1)}


def gamma_system(window: int, n_window: int) -> tuple[tuple, RationalMatrix]:
    unknowns = tuple((m, n) for m in range(-window, window + 1) for n in range(-n_window, n_window + 1))
    col = {k: i for i, k in enumerate(unknowns)}
    rows = []
    for l in range(-window, window + 1):
        for m in range(l + 1, window + 1):
            for n in range(-n_window, n_window + 1):
                row = [0] * len(unknowns)
                row[col[(m, n)]] += l
                row[col[(l, n)]] -= m
                if any(row):
                    rows.append(row)
    return unknowns, RationalMatrix.of(rows, len(unknowns))


def has_gamma_form(unknowns: Sequence, vector: Sequence) -> bool:
    """``gamma_mn == m * gamma_{1n}`` for every entry."""
    value = dict(zip(unknowns, vector))
    return all(v == m * value[(1, n)] for (m, n), v in value.items())


def solve_gamma(window: int, n_window: int | None = None) -> GammaSolution:
    if window < 1:
        raise WindowTooSmallError("solve_gamma needs 1 in the l, m window")
    n_window = window if n_window is None else n_window
    unknowns, matrix = gamma_system(window, n_window)
    basis = tuple(nullspace(matrix))
    return GammaSolution(
        window,
        n_window,
        unknowns,
        basis,
        len(basis),
        2 * n_window + 1,
        all(has_gamma_form(unknowns, v) for v in basis),
    )


# --------------------------------------------------------------------------
# central terms c_m


@dataclass(frozen=True)
class CentralSolution:
    window: int
    basis: tuple  # vectors (c_1, ..., c_M)
    labels: tuple  # recognized closed forms spanning the same space
    equations: int

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def passed(self) -> bool:
        return self.dimension == 2 and self.labels == ("m", "m^3")


def central_equations(window: int) -> list[tuple[int, int, tuple]]:
    """Rows ``(m, n, coefficients of c_1..c_M)`` of ``(m-n)c_{m+n} - (m+2n)c_m + (2m+n)c_n = 0``.

    ``c_{-k} = -c_k`` and ``c_0 = 0`` are substituted; all-zero rows are dropped.
    """
    out = []
    for m in range(-window, window + 1):
        for n in range(-window, window + 1):
            if abs(m + n) > window:
                continue
            row = [0] * window
            for k, coeff in ((m + n, m - n), (m, -(m + 2 * n)), (n, 2 * m + n)):
                if k:
                    row[abs(k) - 1] += coeff if k > 0 else -coeff
            if any(row):
                out.append((m, n, tuple(row)))
    return out


def solve_central(window: int) -> CentralSolution:
    if window < 3:
        raise WindowTooSmallError("solve_central needs a window of at least 3")
    eqs = central_equations(window)
    basis = tuple(nullspace(RationalMatrix.of([r for _, _, r in eqs], window)))
    linear = [Fraction(k) for k in range(1, window + 1)]
    cubic = [Fraction(k**3) for k in range(1, window + 1)]
    labels: tuple = ()
    if len(basis) == 2 and in_span(basis, linear) and in_span(basis, cubic):
        labels = ("m", "m^3")
    return CentralSolution(window, basis, labels, len(eqs))


# --------------------------------------------------------------------------
# F, G and eps_m^2


@dataclass(frozen=True)
class FGEpsilonResult:
    e1: Fraction
    e2: Fraction
    window: int
    alpha: Fraction
    beta: Fraction
    f: Fraction
    g: Fraction
    e: tuple  # e_1 .. e_M
    F_poly: Element
    G_poly: Element
    printed_residuals: tuple  # printed sum formula minus solved e_m, m = 1 .. M
    failures: tuple = field(default=())

    @property
    def passed(self) -> bool:
        return not self.failures

    def params(self, eps: Fraction | None = None) -> dict:
        """Parameter overrides for the ``general`` profile."""
        out = {"f": self.f, "g": self.g, "alpha": self.alpha, "beta": self.beta}
        if eps is not None:
            out["eps"] = eps
        return out


def closed_form_e(e1: Fraction, e2: Fraction, m: int) -> Fraction:
    return e1 + Fraction(4, 3) * (1 - Fraction(1, m * m)) * (e2 - e1)


def printed_sum_e(e1: Fraction, e2: Fraction, m: int) -> Fraction:
    return e1 + sum((Fraction(2 * r - 1, 3 * r * r) * (e2 - e1) for r in range(1, m + 1)), Fraction(0))


def derive_fg_epsilon(e1, e2, window: int = 4, alpha=0, beta=0) -> FGEpsilonResult:
    """Solve ``m^3 f + m g + m^3 e_m = 0`` for m = 1..window with e_1, e_2 given."""
    if window < 2:
        raise WindowTooSmallError("derive_fg_epsilon needs a window of at least 2")
    e1, e2, alpha, beta = (Fraction(x) for x in (e1, e2, alpha, beta))
    # unknowns: f, g, e_3 .. e_M
    n_unknowns = 2 + max(0, window - 2)
    rows, rhs = [], []
    for m in range(1, window + 1):
        row = [0] * n_unknowns
        row[0], row[1] = m**3, m
        if m <= 2:
            rhs.append(-(m**3) * (e1 if m == 1 else e2))
        else:
            row[m - 1] = m**3
            rhs.append(0)
        rows.append(row)
    solution, kernel = solve(RationalMatrix.of(rows, n_unknowns), rhs)
    if kernel:
        raise NoSolutionError("the f, g, eps system is underdetermined")
    f, g = solution[0], solution[1]
    e = (e1, e2) + tuple(solution[2:])
    e = e[:window]

    failures = []
    if f != (e1 - 4 * e2) / 3:
        failures.append(("f", f))
    if g != Fraction(4, 3) * (e2 - e1):
        failures.append(("g", g))
    for m in range(1, window + 1):
        if e[m - 1] != closed_form_e(e1, e2, m):
            failures.append((f"e_{m}", e[m - 1]))
        if m**3 * f + m * g + m**3 * e[m - 1] != 0:
            failures.append((f"equation m={m}", m**3 * f + m * g + m**3 * e[m - 1]))
    printed = tuple(printed_sum_e(e1, e2, m) - e[m - 1] for m in range(1, window + 1))
    return FGEpsilonResult(
        e1,
        e2,
        window,
        alpha,
        beta,
        f,
        g,
        e,
        a0_polynomial([0, alpha, 0, f / 3]),
        a0_polynomial([0, beta, 0, g / 3]),
        printed,
        tuple(failures),
    )


# --------------------------------------------------------------------------
# inverting D' on polynomials in a0


@dataclass(frozen=True)
class DeltaPrimeSolution:
    coefficient: Fraction  # target = coefficient * A
    degree: int
    particular: Element
    kernel: tuple

    @property
    def passed(self) -> bool:
        expected = a0_polynomial([0, 0, 0, self.coefficient / 3])
        return self.particular == expected and self.kernel == (a0_polynomial([0, 1]),)


def _a0_exponents(word: tuple) -> int:
    if any(g != A0 for g in word):
        raise NotProportionalError("target involves generators other than a[0]")
    return len(word)


def solve_delta_prime(target: TensorElement, degree: int = 3) -> DeltaPrimeSolution:
    """Solve ``D'(P) = target`` over ``P = sum_{r <= degree} p_r a0^r``.

    ``D'(a0^r) = sum_{0<k<r} C(r, k) a0^k (x) a0^(r-k)`` for r >= 1, and
    ``D'(1) = -1 (x) 1``.
    """
    A = central_cubic()
    c = target.coefficient((A0,), (A0, A0))
    if target != A * c:
        raise NotProportionalError("target is not a rational multiple of A")
    cells = [(i, j) for i in range(degree + 1) for j in range(degree + 1 - i)]
    row_of = {cell: k for k, cell in enumerate(cells)}
    rows = [[0] * (degree + 1) for _ in cells]
    rows[row_of[(0, 0)]][0] = -1
    for r in range(2, degree + 1):
        for k in range(1, r):
            rows[row_of[(k, r - k)]][r] = math.comb(r, k)
    rhs = [0] * len(cells)
    for (left, right), v in target.items():
        rhs[row_of[(_a0_exponents(left), _a0_exponents(right))]] = v
    try:
        particular, kernel = solve(RationalMatrix.of(rows, degree + 1), rhs)
    except NoSolutionError:
        raise NoSolutionError(f"no polynomial of degree <= {degree} has this reduced coproduct") from None
    return DeltaPrimeSolution(c, degree, a0_polynomial(particular), tuple(a0_polynomial(v) for v in kernel))


# --------------------------------------------------------------------------
# reports


def _vec(v) -> list:
    return [str(x) for x in v]


def gamma_report(window: int, n_window: int | None = None) -> CheckReport:
    t0 = time.perf_counter()
    sol = solve_gamma(window, n_window)
    bad = []
    if sol.dimension != sol.expected_dimension:
        bad.append(Counterexample(("dimension",), f"{sol.dimension} != {sol.expected_dimension}"))
    if not sol.of_expected_form:
        bad.append(Counterexample(("form",), "a basis vector is not gamma_mn = m*gamma_n"))
    details = {
        "n_window": sol.n_window,
        "dimension": sol.dimension,
        "expected_dimension": sol.expected_dimension,
        "gamma_n": [{str(n): str(v) for n, v in sol.gamma_n(vec).items() if v} for vec in sol.basis],
    }
    return CheckReport("derive-gamma", window, bad, time.perf_counter() - t0, len(sol.unknowns), details)


def central_report(window: int) -> CheckReport:
    t0 = time.perf_counter()
    sol = solve_central(window)
    bad = []
    if sol.dimension != 2:
        bad.append(Counterexample(("dimension",), str(sol.dimension)))
    if sol.labels != ("m", "m^3"):
        bad.append(Counterexample(("span",), "nullspace is not span{m, m^3}"))
    details = {
        "dimension": sol.dimension,
        "equations": sol.equations,
        "basis": [_vec(v) for v in sol.basis],
        "closed_forms": list(sol.labels),
    }
    return CheckReport("derive-central", window, bad, time.perf_counter() - t0, sol.equations, details)


def fg_epsilon_report(e1, e2, window: int = 4, alpha=0, beta=0) -> CheckReport:
    t0 = time.perf_counter()
    res = derive_fg_epsilon(e1, e2, window, alpha, beta)
    bad = [Counterexample((name,), str(value)) for name, value in res.failures]
    details = {
        "e1": res.e1,
        "e2": res.e2,
        "f": res.f,
        "g": res.g,
        "e": {str(m): v for m, v in enumerate(res.e, start=1)},
        "F": str(res.F_poly),
        "G": str(res.G_poly),
        "printed_sum_residual": {str(m): v for m, v in enumerate(res.printed_residuals, start=1)},
    }
    return CheckReport("derive-fg-epsilon", window, bad, time.perf_counter() - t0, window, details)


def delta_prime_report(target: TensorElement, degree: int = 3) -> CheckReport:
    t0 = time.perf_counter()
    sol = solve_delta_prime(target, degree)
    bad = []
    if not sol.passed:
        bad.append(Counterexample(("solution",), str(sol.particular)))
    details = {
        "coefficient": sol.coefficient,
        "particular": str(sol.particular),
        "kernel": [str(k) for k in sol.kernel],
    }
    return CheckReport("derive-delta-prime", degree, bad, time.perf_counter() - t0, degree + 1, details)
