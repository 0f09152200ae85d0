"""Coalgebra layer: tensor elements, coproducts, the counit and Casimir brackets.

The Casimir tensor ``Omega = sum_m a[m] (x) a[-m] + a[0] (x) H + H (x) a[0]`` is
never built.  Brackets against it are computed only for arguments whose letters
fail to commute with finitely many ``a[m]``; the relevant modes are read off
the delta conditions of the bracket rules.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import sympy as sp

from .algebra import (
    M,
    N,
    BracketTable,
    Element,
    Generator,
    Params,
    _accumulate,
    _word_grade,
    _word_key,
    algebra_for,
    deltas_hold,
    evaluate_coefficient,
    instantiate_pattern,
    render_term,
    render_word,
)
from .errors import InfiniteTailError
from .presentation import Presentation, builtin_presentation


class TensorElement:
    """Immutable finite sum of ``w1 (x) ... (x) wk`` with rational coefficients.

    ``arity`` is the number of tensor slots; arity 0 holds scalars and arity 1
    is an Element seen as a one-slot tensor.
    """

    __slots__ = ("arity", "_terms", "_hash")

    def __init__(self, terms: Mapping | Iterable | None = None, arity: int = 2):
        acc: dict = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for key, c in items:
                key = tuple(tuple(w) for w in key)
                if len(key) != arity:
                    raise ValueError(f"expected {arity} slots, got {len(key)}")
                _accumulate(acc, key, Fraction(c))
        self.arity = arity
        self._terms = acc
        self._hash = None

    @classmethod
    def _raw(cls, acc: dict, arity: int) -> "TensorElement":
        t = cls.__new__(cls)
        t.arity = arity
        t._terms = acc
        t._hash = None
        return t

    @classmethod
    def zero(cls, arity: int = 2) -> "TensorElement":
        return cls._raw({}, arity)

    @classmethod
    def pure(cls, *factors) -> "TensorElement":
        """``f1 (x) f2 (x) ...`` for Elements (or anything Element.of accepts)."""
        factors = [Element.of(f) for f in factors]
        acc: dict = {}
        for combo in itertools.product(*(list(f.items()) for f in factors)):
            c = Fraction(1)
            for _, v in combo:
                c *= v
            _accumulate(acc, tuple(w for w, _ in combo), c)
        return cls._raw(acc, len(factors))

    @classmethod
    def from_element(cls, x) -> "TensorElement":
        return cls._raw({(w,): c for w, c in Element.of(x).items()}, 1)

    def to_element(self) -> Element:
        if self.arity != 1:
            raise ValueError("only one-slot tensors convert to Elements")
        return Element({k[0]: c for k, c in self._terms.items()})

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, *slots) -> Fraction:
        return self._terms.get(tuple(tuple(s) for s in slots), Fraction(0))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.arity == other.arity and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.arity, frozenset(self._terms.items())))
        return self._hash

    def _check(self, other: "TensorElement"):
        if not isinstance(other, TensorElement):
            raise TypeError(f"expected a TensorElement, got {type(other).__name__}")
        if other.arity != self.arity:
            raise ValueError(f"arity mismatch: {self.arity} vs {other.arity}")

    def __add__(self, other):
        self._check(other)
        acc = dict(self._terms)
        for k, c in other._terms.items():
            _accumulate(acc, k, c)
        return TensorElement._raw(acc, self.arity)

    def __neg__(self):
        return TensorElement._raw({k: -c for k, c in self._terms.items()}, self.arity)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if not isinstance(c, (int, Fraction)) or isinstance(c, bool):
            return NotImplemented
        if not c:
            return TensorElement.zero(self.arity)
        return TensorElement._raw({k: v * c for k, v in self._terms.items()}, self.arity)

    __rmul__ = __mul__

    def __str__(self):
        return render_tensor(self)

    def __repr__(self):
        return f"TensorElement({render_tensor(self)!r})"


def render_tensor(t: TensorElement, table: BracketTable | None = None) -> str:
    """Terms ``c*left (x) right`` sorted by (grade of left slot, left word, right word)."""
    from .algebra import builtin_table

    table = table or builtin_table()
    if not t:
        return "0"
    if t.arity == 0:
        return str(t._terms[()])
    keys = sorted(
        t._terms,
        key=lambda k: (_word_grade(k[0], table), tuple(_word_key(w, table) for w in k)),
    )
    out = []
    for i, k in enumerate(keys):
        c = t._terms[k]
        body = " (x) ".join(render_word(w) for w in k)
        if not k[0] and abs(c) != 1:
            # 3 (x) b[1] rather than 3*1 (x) b[1]
            body = " (x) ".join(render_word(w) for w in k[1:])
            out.append(render_term(c, f"(x) {body}", False, i == 0).replace("*(x)", " (x)"))
        else:
            out.append(render_term(c, body, False, i == 0))
    return "".join(out)


@dataclass(frozen=True)
class CasimirGroupResult:
    generator: Generator
    groups: tuple  # ((label, TensorElement), ...)
    total: TensorElement
    passed: bool
    exhaustive: bool  # False when only a window of mode groups could be checked


class Bialgebra:
    """Coproduct, counit and Casimir computations for a presentation with bound parameters."""

    OSC = "a"
    HAM = "H"

    def __init__(self, presentation: Presentation, params=None):
        self.presentation = presentation
        self.params = presentation.bind(params)
        self.algebra = algebra_for(presentation.table, self.params)
        self.coproduct_gen = functools.lru_cache(maxsize=None)(self._coproduct_gen)
        self._coproduct_word = functools.lru_cache(maxsize=None)(self._coproduct_word_uncached)

    # -- tensor arithmetic -------------------------------------------------

    def _expand(self, acc: dict, coeff: Fraction, slots: Sequence[Element]) -> None:
        for combo in itertools.product(*(list(e.items()) for e in slots)):
            c = coeff
            for _, v in combo:
                c *= v
            _accumulate(acc, tuple(w for w, _ in combo), c)

    def tensor_multiply(self, s: TensorElement, t: TensorElement) -> TensorElement:
        """Slot-wise product ``(x (x) y)(u (x) v) = xu (x) yv``."""
        s._check(t)
        order = self.algebra._order_word
        acc: dict = {}
        for ks, cs in s.items():
            for kt, ct in t.items():
                self._expand(acc, cs * ct, [order(u + v) for u, v in zip(ks, kt)])
        return TensorElement._raw(acc, s.arity)

    def tensor_commutator(self, s: TensorElement, t: TensorElement) -> TensorElement:
        return self.tensor_multiply(s, t) - self.tensor_multiply(t, s)

    def pure(self, *factors) -> TensorElement:
        return TensorElement.pure(*factors)

    # -- coproduct -----------------------------------------------------------

    def _coproduct_gen(self, g: Generator) -> TensorElement:
        self.algebra.key(g)
        acc = {((g,), ()): Fraction(1), ((), (g,)): Fraction(1)}
        tail = self.presentation.cotail(g.family)
        if tail is not None:
            bind = {} if g.mode is None else {M: sp.Integer(g.mode)}
            order = self.algebra._order_word
            for term in tail.terms:
                if not deltas_hold(term.deltas, bind):
                    continue
                c = evaluate_coefficient(term.coeff, bind, self.params)
                if not c:
                    continue
                left = order(instantiate_pattern(term.target, bind))
                right = order(instantiate_pattern(term.right, bind))
                self._expand(acc, c, [left, right])
        return TensorElement._raw(acc, 2)

    def _coproduct_word_uncached(self, word: tuple) -> TensorElement:
        if not word:
            return TensorElement._raw({((), ()): Fraction(1)}, 2)
        if len(word) == 1:
            return self.coproduct_gen(word[0])
        return self.tensor_multiply(self._coproduct_word(word[:-1]), self.coproduct_gen(word[-1]))

    def coproduct(self, x) -> TensorElement:
        acc: dict = {}
        for w, c in Element.of(x).items():
            for k, v in self._coproduct_word(w).items():
                _accumulate(acc, k, c * v)
        return TensorElement._raw(acc, 2)

    def delta_prime(self, x) -> TensorElement:
        x = Element.of(x)
        return self.coproduct(x) - TensorElement.pure(x, 1) - TensorElement.pure(1, x)

    @staticmethod
    def counit(x) -> Fraction:
        return Element.of(x).coefficient(())

    # -- slot maps and axioms ---------------------------------------------

    @staticmethod
    def map_slots(t: TensorElement, maps: Sequence[Callable[[tuple], TensorElement]]) -> TensorElement:
        """Apply ``maps[i]`` (word -> tensor) to slot ``i`` and concatenate the slots."""
        if len(maps) != t.arity:
            raise ValueError("one map per slot is required")
        acc: dict = {}
        arity = None
        for key, c in t.items():
            images = [f(w) for f, w in zip(maps, key)]
            arity = sum(im.arity for im in images)
            for combo in itertools.product(*(list(im.items()) for im in images)):
                v = c
                for _, cv in combo:
                    v *= cv
                _accumulate(acc, tuple(s for k, _ in combo for s in k), v)
        if arity is None:
            arity = 0
            for f in maps:
                arity += f(()).arity
        return TensorElement._raw(acc, arity)

    @staticmethod
    def identity_map(w: tuple) -> TensorElement:
        return TensorElement._raw({(w,): Fraction(1)}, 1)

    @staticmethod
    def counit_map(w: tuple) -> TensorElement:
        return TensorElement._raw({(): Fraction(1)} if not w else {}, 0)

    def coproduct_map(self, w: tuple) -> TensorElement:
        return self._coproduct_word(w)

    def coassociativity_residual(self, x) -> TensorElement:
        d = self.coproduct(x)
        lhs = self.map_slots(d, [self.coproduct_map, self.identity_map])
        rhs = self.map_slots(d, [self.identity_map, self.coproduct_map])
        return lhs - rhs

    def counit_residuals(self, x) -> tuple[Element, Element]:
        # compare against the normal form; the input may be an unordered word
        x = self.algebra.multiply(Element.unit(), Element.of(x))
        d = self.coproduct(x)
        left = self.map_slots(d, [self.counit_map, self.identity_map]).to_element()
        right = self.map_slots(d, [self.identity_map, self.counit_map]).to_element()
        return left - x, right - x

    def homomorphism_residual(self, x, y) -> TensorElement:
        """``[D(x), D(y)] - D([x, y])``; zero for every pair in a bialgebra."""
        lhs = self.tensor_commutator(self.coproduct(x), self.coproduct(y))
        return lhs - self.coproduct(self.algebra.bracket(x, y))

    # -- Casimir ---------------------------------------------------------------

    def casimir_support(self, g: Generator) -> frozenset | None:
        """Modes m with ``[a[m], g]`` possibly nonzero; ``None`` if infinitely many."""
        table = self.presentation.table
        found = table.rule_for(self.OSC, g.family)
        if found is None:
            return frozenset()
        rule, swapped = found
        osc_var, g_var = (N, M) if swapped else (M, N)
        bind = {} if g.mode is None else {g_var: sp.Integer(g.mode)}
        support = set()
        for term in rule.terms:
            pinned = None
            fires = True
            for d in term.deltas:
                d = sp.expand(sp.sympify(d).xreplace(bind))
                if d.is_Number:
                    fires = fires and d == 0
                    continue
                sol = sp.solve(d, osc_var)
                value = sol[0] if sol else None
                if value is None or (pinned is not None and value != pinned):
                    fires = False
                pinned = value
            if not fires:
                continue
            if pinned is not None:
                if pinned.is_Integer:
                    support.add(int(pinned))
                continue
            if sp.expand(sp.sympify(term.coeff).xreplace(bind)) != 0:
                return None
        return frozenset(support)

    def _letters_support(self, x: Element) -> set:
        support = set()
        for w in x:
            for g in w:
                s = self.casimir_support(g)
                if s is None:
                    raise InfiniteTailError(f"[Omega, {g} (x) 1] has infinitely many nonzero terms")
                support |= s
        return support

    def casimir_bracket(self, x) -> TensorElement:
        """``[Omega, x (x) 1]`` for arguments with finite support, e.g. ``a[n]``."""
        x = Element.of(x)
        alg = self.algebra
        osc = lambda m: Generator(self.OSC, m)  # noqa: E731
        ham = Generator(self.HAM)
        out = TensorElement.zero(2)
        for m in sorted(self._letters_support(x)):
            out += TensorElement.pure(alg.commutator(osc(m), x), osc(-m))
        out += TensorElement.pure(alg.commutator(osc(0), x), ham)
        out += TensorElement.pure(alg.commutator(ham, x), osc(0))
        return out

    def _group(self, X: Element, k: int) -> TensorElement:
        alg = self.algebra
        out = TensorElement.zero(2)
        for m in sorted({k, -k}):
            l, r = Generator(self.OSC, m), Generator(self.OSC, -m)
            out += TensorElement.pure(alg.commutator(l, X), r)
            out += TensorElement.pure(l, alg.commutator(r, X))
        return out

    def _ham_group(self, X: Element) -> TensorElement:
        alg = self.algebra
        a0, ham = Generator(self.OSC, 0), Generator(self.HAM)
        out = TensorElement.zero(2)
        for l, r in ((a0, ham), (ham, a0)):
            out += TensorElement.pure(alg.commutator(l, X), r)
            out += TensorElement.pure(l, alg.commutator(r, X))
        return out

    def casimir_invariance(self, X, window: int) -> CasimirGroupResult:
        """``[Omega, X (x) 1 + 1 (x) X]`` grouped by Omega terms ``{m, -m}`` and ``{a0 H, H a0}``.

        With finite support the grouped contributions must sum to zero; with
        infinite support (``H``) each group in ``0..window`` must vanish on its own.
        """
        gen = X
        X = Element.of(X)
        try:
            support = self._letters_support(X)
            ks, exhaustive = sorted({abs(s) for s in support}), True
        except InfiniteTailError:
            ks, exhaustive = list(range(window + 1)), False
        groups = [(f"{{{k}, {-k}}}", self._group(X, k)) for k in ks]
        groups.append(("{a0 H, H a0}", self._ham_group(X)))
        total = TensorElement.zero(2)
        for _, g in groups:
            total += g
        if exhaustive:
            passed = not total
        else:
            passed = all(not g for _, g in groups)
        return CasimirGroupResult(gen, tuple(groups), total, passed, exhaustive)

    def render(self, t) -> str:
        if isinstance(t, TensorElement):
            return render_tensor(t, self.presentation.table)
        return self.algebra.render(t)


@functools.lru_cache(maxsize=64)
def _bialgebra_cached(presentation: Presentation, params: Params) -> Bialgebra:
    return Bialgebra(presentation, params)


def bialgebra_for(presentation: Presentation | None = None, params=None) -> Bialgebra:
    presentation = presentation or builtin_presentation("example")
    return _bialgebra_cached(presentation, presentation.bind(params))


def coproduct(x, presentation: Presentation | None = None, params=None) -> TensorElement:
    return bialgebra_for(presentation, params).coproduct(x)


def delta_prime(x, presentation: Presentation | None = None, params=None) -> TensorElement:
    return bialgebra_for(presentation, params).delta_prime(x)


def counit(x) -> Fraction:
    return Bialgebra.counit(x)


def casimir_bracket(x, presentation: Presentation | None = None, params=None) -> TensorElement:
    return bialgebra_for(presentation, params).casimir_bracket(x)


def casimir_invariance_check(window: int, presentation: Presentation | None = None, params=None) -> list:
    bi = bialgebra_for(presentation, params)
    gens = [Generator(Bialgebra.OSC, n) for n in range(-window, window + 1)] + [Generator(Bialgebra.HAM)]
    return [bi.casimir_invariance(g, window) for g in gens]


def central_cubic() -> TensorElement:
    """``A = a0 (x) a0^2 + a0^2 (x) a0``."""
    a0 = Generator("a", 0)
    return TensorElement.pure((a0,), (a0, a0)) + TensorElement.pure((a0, a0), (a0,))
