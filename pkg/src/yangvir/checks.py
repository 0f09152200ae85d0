"""Window sweeps: Jacobi identity, bialgebra axioms and Casimir invariance.

Every case is an independent pure computation.  With ``jobs > 1`` the cases
are fanned out to worker processes; counterexamples are sorted afterwards, so
reports do not depend on the worker count.
"""

from __future__ import annotations

import itertools
import random
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .algebra import Element, Generator, Params
from .presentation import Presentation
from .report import CheckReport, Counterexample
from .tensor import Bialgebra, TensorElement, bialgebra_for

_worker: Bialgebra | None = None


def window_generators(presentation: Presentation, window: int) -> list[Generator]:
    """All generators with modes in ``[-window, window]``, in PBW order."""
    table = presentation.table
    gens = []
    for fam in sorted(table.families, key=lambda f: table.rank(f.name)):
        if fam.moded:
            gens.extend(Generator(fam.name, m) for m in range(-window, window + 1))
        else:
            gens.append(Generator(fam.name))
    return gens


def jacobi_residual(bi: Bialgebra, x: Generator, y: Generator, z: Generator) -> Element:
    alg = bi.algebra
    return (
        alg.commutator(alg.bracket_gen(x, y), z)
        + alg.commutator(alg.bracket_gen(y, z), x)
        + alg.commutator(alg.bracket_gen(z, x), y)
    )


def homomorphism_residual(x, y, presentation: Presentation, params=None) -> TensorElement:
    """``[D(x), D(y)] - D([x, y])``; vanishes identically in a bialgebra."""
    return bialgebra_for(presentation, params).homomorphism_residual(x, y)


# --------------------------------------------------------------------------
# case evaluation (shared by the serial path and the workers)


def _run_case(bi: Bialgebra, case):
    kind, args = case[0], case[1:]
    if kind == "jacobi":
        res = jacobi_residual(bi, *args)
    elif kind == "hom":
        res = bi.homomorphism_residual(*args)
    elif kind == "coassoc":
        res = bi.coassociativity_residual(args[0])
    elif kind == "counit-left":
        res = bi.counit_residuals(args[0])[0]
    elif kind == "counit-right":
        res = bi.counit_residuals(args[0])[1]
    elif kind == "fuzz-hom":
        x, y = args
        res = bi.coproduct(bi.algebra.multiply(x, y)) - bi.tensor_multiply(bi.coproduct(x), bi.coproduct(y))
    else:
        raise ValueError(f"unknown case kind {kind!r}")
    if not res:
        return None
    return bi.render(res)


def _init_worker(presentation: Presentation, params: Params) -> None:
    global _worker
    _worker = Bialgebra(presentation, params)


def _run_chunk(cases):
    return [_run_case(_worker, c) for c in cases]


def _run_cases(bi: Bialgebra, cases: list, jobs: int) -> list:
    if jobs <= 1 or len(cases) < 2 * jobs:
        return [_run_case(bi, c) for c in cases]
    size = max(1, len(cases) // (jobs * 4))
    chunks = [cases[i : i + size] for i in range(0, len(cases), size)]
    with ProcessPoolExecutor(
        max_workers=jobs, initializer=_init_worker, initargs=(bi.presentation, bi.params)
    ) as pool:
        return [r for chunk in pool.map(_run_chunk, chunks) for r in chunk]


_KIND_ORDER = {k: i for i, k in enumerate(["jacobi", "hom", "coassoc", "counit-left", "counit-right", "fuzz-hom"])}


def _collect(bi: Bialgebra, cases: list, results: list) -> list[Counterexample]:
    def sort_key(case):
        out = [_KIND_ORDER[case[0]]]
        for arg in case[1:]:
            if isinstance(arg, Generator):
                out.append((0, bi.algebra.key(arg), ""))
            else:
                out.append((1, (), bi.render(arg)))
        return out

    found = [
        (sort_key(c), Counterexample((c[0],) + tuple(bi.render(Element.of(x)) for x in c[1:]), r))
        for c, r in zip(cases, results)
        if r is not None
    ]
    found.sort(key=lambda p: p[0])
    return [ce for _, ce in found]


# --------------------------------------------------------------------------
# suites


def check_jacobi(presentation: Presentation, params=None, window: int = 4, jobs: int = 1) -> CheckReport:
    """Jacobi identity on every unordered triple of window generators."""
    t0 = time.perf_counter()
    bi = bialgebra_for(presentation, params)
    gens = window_generators(presentation, window)
    cases = [("jacobi",) + t for t in itertools.combinations_with_replacement(gens, 3)]
    results = _run_cases(bi, cases, jobs)
    bad = _collect(bi, cases, results)
    return CheckReport("jacobi", window, bad, time.perf_counter() - t0, len(cases))


def _random_element(rng: random.Random, gens: list, max_degree: int = 2, max_terms: int = 3) -> Element:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        word = tuple(rng.choice(gens) for _ in range(rng.randint(0, max_degree)))
        terms[word] = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return Element(terms)


def check_bialgebra(
    presentation: Presentation,
    params=None,
    window: int = 4,
    jobs: int = 1,
    fuzz: int = 0,
    seed: int = 0,
) -> CheckReport:
    """Homomorphism residuals on all pairs, coassociativity and counit on all generators.

    ``fuzz`` adds that many random checks of ``D(xy) = D(x) D(y)`` on elements of
    degree <= 2 (off by default).
    """
    t0 = time.perf_counter()
    bi = bialgebra_for(presentation, params)
    gens = window_generators(presentation, window)
    desc = list(reversed(gens))
    cases: list = [("hom", x, y) for i, x in enumerate(desc) for y in desc[i:]]
    cases += [("coassoc", g) for g in gens]
    cases += [("counit-left", g) for g in gens]
    cases += [("counit-right", g) for g in gens]
    if fuzz:
        rng = random.Random(seed)
        for _ in range(fuzz):
            cases.append(("fuzz-hom", _random_element(rng, gens), _random_element(rng, gens)))
    results = _run_cases(bi, cases, jobs)
    bad = _collect(bi, cases, results)
    return CheckReport("bialgebra", window, bad, time.perf_counter() - t0, len(cases))


def check_casimir(presentation: Presentation, params=None, window: int = 6) -> CheckReport:
    """Casimir invariance for ``a[n]`` (|n| <= window) and ``H``, plus the bracket closed form.

    For ``0 < |n| <= window``: ``[Omega, a_n (x) 1] = n (a_n (x) a_0 - a_0 (x) a_n)`` and,
    when ``b`` has a coproduct tail, ``D'(b_n) = eps_n [Omega, a_n (x) 1]``.
    """
    t0 = time.perf_counter()
    bi = bialgebra_for(presentation, params)
    bad = []
    cases = 0
    osc = [Generator(Bialgebra.OSC, n) for n in range(-window, window + 1)]
    for g in osc + [Generator(Bialgebra.HAM)]:
        cases += 1
        res = bi.casimir_invariance(g, window)
        if not res.passed:
            shown = res.total if res.exhaustive else next(t for _, t in res.groups if t)
            bad.append(Counterexample(("invariance", str(g)), bi.render(shown)))
    has_tail = presentation.cotail("b") is not None and "eps" in bi.params
    a0 = Generator(Bialgebra.OSC, 0)
    for g in osc:
        n = g.mode
        if n == 0:
            continue
        cases += 1
        got = bi.casimir_bracket(g)
        expected = (TensorElement.pure(g, a0) - TensorElement.pure(a0, g)) * n
        if got != expected:
            bad.append(Counterexample(("bracket", str(g)), bi.render(got - expected)))
        if has_tail:
            cases += 1
            tail = bi.delta_prime(Generator("b", n))
            diff = tail - got * bi.params.indexed("eps", n)
            if diff:
                bad.append(Counterexample(("tail", f"b[{n}]"), bi.render(diff)))
    return CheckReport("casimir", window, bad, time.perf_counter() - t0, cases)
