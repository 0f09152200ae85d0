"""Enveloping-algebra kernel: generators, PBW monomials, elements and bracket tables.

Elements are finite sums of normal-ordered words with :class:`fractions.Fraction`
coefficients.  Products are brought to PBW normal form by swapping adjacent
letters with the bracket rules of a :class:`BracketTable`; the PBW order puts
mode-less families (``H``) first, then the mode-indexed families in declaration
order, each sorted by ascending mode.

Bracket rules are stored symbolically (sympy) in the two mode variables ``m`` and
``n`` and are evaluated on concrete modes.  Parameters may appear as plain
symbols (``eps``) or as mode-indexed lookups (``eps(m)``, written ``eps[m]`` in
the presentation language).
"""

from __future__ import annotations

import functools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Union

import sympy as sp
from sympy.core.function import AppliedUndef

from .errors import (
    AlgebraError,
    ModeOverflowError,
    ParameterLookupError,
    UnboundParameterError,
    UnknownFamilyError,
)

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

M, N = MODE_VARS = (sp.Symbol("m"), sp.Symbol("n"))


def checked_mode(value) -> int:
    v = int(value)
    if not INT64_MIN <= v <= INT64_MAX:
        raise ModeOverflowError(f"mode {v} outside the signed 64-bit range")
    return v


# --------------------------------------------------------------------------
# generators, monomials, elements


@dataclass(frozen=True)
class Generator:
    family: str
    mode: int | None = None

    def __post_init__(self):
        if self.mode is not None:
            object.__setattr__(self, "mode", checked_mode(self.mode))

    def __str__(self) -> str:
        if self.mode is None:
            return self.family
        return f"{self.family}[{self.mode}]"

    def __repr__(self) -> str:
        return f"Generator({str(self)!r})"


def a(m: int) -> Generator:
    return Generator("a", m)


def b(m: int) -> Generator:
    return Generator("b", m)


H = Generator("H")

Monomial = tuple  # tuple[Generator, ...]; the empty tuple is the unit

Scalar = Union[int, Fraction]


def _accumulate(acc: dict, key, coeff) -> None:
    c = acc.get(key, 0) + coeff
    if c:
        acc[key] = c
    else:
        acc.pop(key, None)


class Element:
    """Immutable finite sum ``sum c_w * w`` over normal-ordered words ``w``.

    ``*`` only scales by rationals; products inside the algebra go through
    :meth:`Algebra.multiply`, since they depend on the bracket table.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | Iterable | None = None):
        acc: dict = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for w, c in items:
                _accumulate(acc, tuple(w), Fraction(c))
        self._terms = acc
        self._hash = None

    @classmethod
    def _raw(cls, acc: dict) -> "Element":
        e = cls.__new__(cls)
        e._terms = acc
        e._hash = None
        return e

    @classmethod
    def zero(cls) -> "Element":
        return cls._raw({})

    @classmethod
    def scalar(cls, c: Scalar) -> "Element":
        return cls({(): c})

    @classmethod
    def unit(cls) -> "Element":
        return cls.scalar(1)

    @classmethod
    def of(cls, x, coeff: Scalar = 1) -> "Element":
        """Wrap a generator, a word, a scalar or an Element."""
        if isinstance(x, Element):
            return x * coeff
        if isinstance(x, Generator):
            return cls({(x,): coeff})
        if isinstance(x, tuple):
            return cls({x: coeff})
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return cls({(): Fraction(x) * coeff})
        raise TypeError(f"cannot make an Element from {x!r}")

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, word: Monomial) -> Fraction:
        return self._terms.get(tuple(word), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            try:
                other = Element.of(other)
            except TypeError:
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other) -> "Element":
        try:
            other = Element.of(other)
        except TypeError:
            return NotImplemented
        acc = dict(self._terms)
        for w, c in other._terms.items():
            _accumulate(acc, w, c)
        return Element._raw(acc)

    __radd__ = __add__

    def __neg__(self) -> "Element":
        return Element._raw({w: -c for w, c in self._terms.items()})

    def __sub__(self, other) -> "Element":
        try:
            other = Element.of(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Element":
        return Element.of(other) - self

    def __mul__(self, c) -> "Element":
        if not isinstance(c, (int, Fraction)) or isinstance(c, bool):
            return NotImplemented
        if not c:
            return Element.zero()
        c = Fraction(c)
        return Element._raw({w: v * c for w, v in self._terms.items()})

    __rmul__ = __mul__

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"Element({render(self)!r})"


# --------------------------------------------------------------------------
# parameters


def _as_fraction(value) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"parameter values must be exact rationals, got {value!r}")
    if isinstance(value, sp.Rational):
        return Fraction(int(value.p), int(value.q))
    return Fraction(value)


@dataclass(frozen=True)
class IndexedParam:
    """Mode-indexed rational table with symmetric lookup ``t[-m] == t[m]``.

    Mode 0 returns an explicit 0-entry if present and 0 otherwise.
    """

    entries: tuple = ()
    default: Fraction | None = None

    @classmethod
    def of(cls, entries: Mapping[int, Scalar], default: Scalar | None = None) -> "IndexedParam":
        table: dict[int, Fraction] = {}
        for k, v in entries.items():
            key, val = abs(int(k)), _as_fraction(v)
            if key in table and table[key] != val:
                raise ValueError(f"conflicting entries for mode +-{key}")
            table[key] = val
        return cls(tuple(sorted(table.items())), None if default is None else _as_fraction(default))

    def lookup(self, name: str, mode: int) -> Fraction:
        key = abs(mode)
        for k, v in self.entries:
            if k == key:
                return v
        if key == 0:
            return Fraction(0)
        if self.default is None:
            raise ParameterLookupError(f"parameter {name} has no entry for mode {mode}")
        return self.default

    def __str__(self) -> str:
        parts = [f"{k}: {v}" for k, v in self.entries]
        if self.default is not None:
            parts.append(f"default: {self.default}")
        return "{" + ", ".join(parts) + "}"


def coerce_param(value) -> Fraction | IndexedParam:
    if isinstance(value, IndexedParam):
        return value
    if isinstance(value, Mapping):
        entries = {k: v for k, v in value.items() if k != "default"}
        return IndexedParam.of(entries, value.get("default"))
    return _as_fraction(value)


@dataclass(frozen=True)
class Params:
    """Immutable, hashable binding of parameter names to values."""

    values: tuple = ()

    @classmethod
    def of(cls, mapping=None) -> "Params":
        if isinstance(mapping, Params):
            return mapping
        if not mapping:
            return cls()
        return cls(tuple(sorted((str(k), coerce_param(v)) for k, v in mapping.items())))

    def as_dict(self) -> dict:
        return dict(self.values)

    def __contains__(self, name: str) -> bool:
        return any(k == name for k, _ in self.values)

    def _get(self, name: str):
        for k, v in self.values:
            if k == name:
                return v
        raise UnboundParameterError(f"parameter {name!r} is not bound")

    def scalar(self, name: str) -> Fraction:
        v = self._get(name)
        if isinstance(v, IndexedParam):
            raise ParameterLookupError(f"parameter {name!r} is mode-indexed; write {name}[...]")
        return v

    def indexed(self, name: str, mode: int) -> Fraction:
        v = self._get(name)
        if isinstance(v, IndexedParam):
            return v.lookup(name, mode)
        return v

    def updated(self, overrides) -> "Params":
        d = self.as_dict()
        d.update(Params.of(overrides).as_dict())
        return Params.of(d)


# --------------------------------------------------------------------------
# symbolic rule terms


@dataclass(frozen=True)
class Family:
    name: str
    moded: bool
    grade: sp.Expr = sp.Integer(0)  # polynomial in m for moded families


@dataclass(frozen=True)
class RuleTerm:
    """``coeff * [all deltas vanish] * target`` (``target (x) right`` for tensors).

    Patterns in ``target``/``right`` are ``(family, mode_expr_or_None)`` pairs.
    """

    coeff: sp.Expr
    deltas: tuple = ()
    target: tuple = ()
    right: tuple | None = None


@dataclass(frozen=True)
class BracketRule:
    left: str
    right: str
    terms: tuple = ()


def _normalize_linear(expr, variables):
    """Return the primitive integer form of a linear condition, or a constant."""
    expr = sp.expand(sp.sympify(expr))
    extra = expr.free_symbols - set(variables)
    if extra or expr.atoms(AppliedUndef):
        raise ValueError("delta condition may only involve mode variables")
    poly = sp.Poly(expr, *variables)
    if poly.total_degree() > 1:
        raise ValueError("delta condition must be linear in the mode variables")
    coeffs = [sp.Rational(poly.coeff_monomial(v)) for v in variables]
    const = sp.Rational(poly.coeff_monomial(1))
    if not any(coeffs):
        return sp.Integer(0) if const == 0 else sp.Integer(1)
    nums = coeffs + [const]
    den = math.lcm(*[int(q.q) for q in nums])
    ints = [int(q * den) for q in nums]
    g = math.gcd(*ints)
    lead = next(i for i in ints[:-1] if i)
    if lead < 0:
        g = -g
    ints = [i // g for i in ints]
    return sp.expand(sum(c * v for c, v in zip(ints, variables)) + ints[-1])


def solve_deltas(deltas, variables=MODE_VARS):
    """Normalize delta conditions and eliminate one variable per condition.

    Returns ``(deltas, substitution)`` or ``None`` when the conditions can never
    hold.  The last variable present in a condition is the one eliminated.
    """
    normed = sorted({_normalize_linear(d, variables) for d in deltas}, key=str)
    subs: dict = {}
    out = []
    for d in normed:
        d2 = _normalize_linear(d.xreplace(subs), variables) if subs else d
        if d2.is_Number:
            if d2 != 0:
                return None
            continue
        var = [v for v in variables if d2.coeff(v) != 0][-1]
        sol = sp.expand(var - d2 / d2.coeff(var))
        subs = {k: sp.expand(v.xreplace({var: sol})) for k, v in subs.items()}
        subs[var] = sol
        out.append(d2)
    return tuple(sorted(out, key=str)), subs


def _sub_pattern(pattern, subs):
    if pattern is None:
        return None
    return tuple((f, None if e is None else sp.expand(sp.sympify(e).xreplace(subs))) for f, e in pattern)


def canonical_terms(terms: Iterable[RuleTerm], variables=MODE_VARS) -> tuple:
    acc: dict = {}
    for t in terms:
        solved = solve_deltas(t.deltas, variables)
        if solved is None:
            continue
        deltas, subs = solved
        key = (deltas, _sub_pattern(t.target, subs), _sub_pattern(t.right, subs))
        acc[key] = acc.get(key, 0) + sp.sympify(t.coeff).xreplace(subs)
    out = []
    for (deltas, target, right), c in acc.items():
        c = sp.expand(c)
        if c != 0:
            out.append(RuleTerm(c, deltas, target, right))
    out.sort(key=lambda t: (_pattern_str(t.target), _pattern_str(t.right or ()), str(t.deltas), str(t.coeff)))
    return tuple(out)


def _pattern_str(pattern) -> str:
    if not pattern:
        return "1"
    return "*".join(f if e is None else f"{f}[{e}]" for f, e in pattern)


def render_rule_term(t: RuleTerm) -> str:
    parts = [f"({t.coeff})"]
    parts += [f"delta({d})" for d in t.deltas]
    body = _pattern_str(t.target)
    if t.right is not None:
        body = f"{body} (x) {_pattern_str(t.right)}"
    parts.append(body)
    return "*".join(parts)


@dataclass(frozen=True)
class BracketTable:
    """Generator families, the bracket rules between them and the central generators.

    ``[y, x]`` is never stored; it is derived as ``-[x, y]``.  A missing rule
    means the families commute.
    """

    families: tuple = ()
    rules: tuple = ()
    central: frozenset = frozenset()
    _index: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        index = {}
        for r in self.rules:
            index[(r.left, r.right)] = (r, False)
            if r.left != r.right:
                index[(r.right, r.left)] = (r, True)
        object.__setattr__(self, "_index", index)

    def family(self, name: str) -> Family:
        for f in self.families:
            if f.name == name:
                return f
        raise UnknownFamilyError(f"unknown generator family {name!r}")

    @functools.cached_property
    def ranks(self) -> dict:
        order = [f for f in self.families if not f.moded] + [f for f in self.families if f.moded]
        return {f.name: i for i, f in enumerate(order)}

    def rank(self, name: str) -> int:
        try:
            return self.ranks[name]
        except KeyError:
            raise UnknownFamilyError(f"unknown generator family {name!r}") from None

    def rule_for(self, left: str, right: str):
        """Return ``(rule, swapped)`` or ``None``."""
        return self._index.get((left, right))

    def parameter_names(self) -> set:
        names = set()
        for r in self.rules:
            for t in r.terms:
                c = sp.sympify(t.coeff)
                names |= {s.name for s in c.free_symbols} - {"m", "n"}
                names |= {f.func.__name__ for f in c.atoms(AppliedUndef)}
        return names

    def grade(self, g: Generator) -> int:
        fam = self.family(g.family)
        if not fam.moded:
            return int(fam.grade)
        return int(sp.sympify(fam.grade).xreplace({M: sp.Integer(g.mode)}))

    def canonical(self) -> str:
        """Deterministic text form; equal tables render identically."""
        lines = []
        for f in sorted(self.families, key=lambda f: self.rank(f.name)):
            head = f"{f.name}[m]" if f.moded else f.name
            lines.append(f"family {head} grade {f.grade}")
        for g in sorted(self.central, key=lambda g: (self.rank(g.family), g.mode or 0)):
            lines.append(f"central {g}")
        for r in sorted(self.rules, key=lambda r: (self.rank(r.left), self.rank(r.right))):
            lf = self.family(r.left)
            rf = self.family(r.right)
            lhs = f"[{r.left}[m]" if lf.moded else f"[{r.left}"
            lhs += f", {r.right}[n]]" if rf.moded else f", {r.right}]"
            body = " + ".join(render_rule_term(t) for t in r.terms) or "0"
            lines.append(f"{lhs} = {body}")
        return "\n".join(lines) + "\n"


def _to_fraction(value) -> Fraction:
    if not value.is_Rational:
        raise AlgebraError(f"expected a rational value, got {value}")
    return Fraction(int(value.p), int(value.q))


def evaluate_coefficient(expr, bind: Mapping, params: Params) -> Fraction:
    """Evaluate a rule coefficient at concrete modes with bound parameters."""
    e = sp.sympify(expr)
    if bind:
        e = e.xreplace(bind)
    if e.is_Rational:
        return Fraction(int(e.p), int(e.q))
    repl = {}
    for app in e.atoms(AppliedUndef):
        idx = app.args[0]
        if not idx.is_Integer:
            raise AlgebraError(f"non-integer index in {app}")
        repl[app] = sp.Rational(params.indexed(app.func.__name__, checked_mode(idx)))
    if repl:
        e = e.xreplace(repl)
    repl = {s: sp.Rational(params.scalar(s.name)) for s in e.free_symbols}
    if repl:
        e = e.xreplace(repl)
    return _to_fraction(e)


def evaluate_mode(expr, bind: Mapping) -> int:
    e = sp.sympify(expr).xreplace(bind)
    if not e.is_Integer:
        raise AlgebraError(f"mode expression {expr} is not an integer at {dict(bind)}")
    return checked_mode(e)


def deltas_hold(deltas, bind: Mapping) -> bool:
    return all(sp.sympify(d).xreplace(bind) == 0 for d in deltas)


def instantiate_pattern(pattern, bind: Mapping) -> Monomial:
    return tuple(Generator(f, None if e is None else evaluate_mode(e, bind)) for f, e in pattern)


# --------------------------------------------------------------------------
# the bound algebra


class Algebra:
    """A bracket table with bound parameters; all products are PBW-normal.

    Results are memoized per instance; the memo never changes a result, so
    instances can be shared freely.
    """

    def __init__(self, table: BracketTable, params=None):
        self.table = table
        self.params = Params.of(params)
        self.bracket_gen = functools.lru_cache(maxsize=None)(self._bracket_gen)
        self._order_word = functools.lru_cache(maxsize=None)(self._order_word_uncached)

    def key(self, g: Generator) -> tuple:
        return (self.table.rank(g.family), 0 if g.mode is None else g.mode)

    def _bracket_gen(self, x: Generator, y: Generator) -> Element:
        if x == y:
            return Element.zero()
        found = self.table.rule_for(x.family, y.family)
        if found is None:
            self.key(x), self.key(y)  # unknown families still raise
            return Element.zero()
        rule, swapped = found
        left, right, sign = (y, x, -1) if swapped else (x, y, 1)
        bind = {}
        if left.mode is not None:
            bind[M] = sp.Integer(left.mode)
        if right.mode is not None:
            bind[N] = sp.Integer(right.mode)
        acc: dict = {}
        for term in rule.terms:
            if not deltas_hold(term.deltas, bind):
                continue
            c = evaluate_coefficient(term.coeff, bind, self.params) * sign
            if not c:
                continue
            word = instantiate_pattern(term.target, bind)
            for w, v in self._order_word(word).items():
                _accumulate(acc, w, c * v)
        return Element._raw(acc)

    def bracket(self, x, y) -> Element:
        if isinstance(x, Generator) and isinstance(y, Generator):
            return self.bracket_gen(x, y)
        return self.commutator(x, y)

    def _order_word_uncached(self, word: Monomial) -> Element:
        for i in range(len(word) - 1):
            x, y = word[i], word[i + 1]
            if self.key(x) > self.key(y):
                head, tail = word[:i], word[i + 2 :]
                acc = dict(self._order_word(head + (y, x) + tail)._terms)
                for w, c in self.bracket_gen(x, y).items():
                    for w2, c2 in self._order_word(head + w + tail).items():
                        _accumulate(acc, w2, c * c2)
                return Element._raw(acc)
        for g in word:
            self.key(g)
        return Element._raw({word: Fraction(1)})

    def normal_order(self, word, rng: random.Random | None = None) -> Element:
        """Normal form of a word.  With ``rng``, swaps are applied in a random order."""
        word = tuple(word)
        if rng is None:
            return self._order_word(word)
        pending: dict = {word: Fraction(1)}
        done: dict = {}
        while pending:
            w = rng.choice(list(pending))
            c = pending.pop(w)
            inversions = [i for i in range(len(w) - 1) if self.key(w[i]) > self.key(w[i + 1])]
            if not inversions:
                _accumulate(done, w, c)
                continue
            i = rng.choice(inversions)
            x, y = w[i], w[i + 1]
            _accumulate(pending, w[:i] + (y, x) + w[i + 2 :], c)
            for u, cu in self.bracket_gen(x, y).items():
                _accumulate(pending, w[:i] + u + w[i + 2 :], c * cu)
        return Element._raw(done)

    def multiply(self, x, y) -> Element:
        x, y = Element.of(x), Element.of(y)
        acc: dict = {}
        for u, cu in x.items():
            for v, cv in y.items():
                for w, cw in self._order_word(u + v).items():
                    _accumulate(acc, w, cu * cv * cw)
        return Element._raw(acc)

    def product(self, *factors) -> Element:
        out = Element.unit()
        for f in factors:
            out = self.multiply(out, f)
        return out

    def power(self, x, k: int) -> Element:
        if k < 0:
            raise ValueError("negative powers are not defined")
        return self.product(*([x] * k))

    def commutator(self, x, y) -> Element:
        return self.multiply(x, y) - self.multiply(y, x)

    def grade(self, x) -> int | None:
        """Common grade of all monomials, or ``None`` when inhomogeneous."""
        x = Element.of(x)
        grades = {sum(self.table.grade(g) for g in w) for w in x}
        if len(grades) > 1:
            return None
        return grades.pop() if grades else 0

    def render(self, x) -> str:
        return render(Element.of(x), self.table)


@functools.lru_cache(maxsize=64)
def algebra_for(table: BracketTable, params: Params) -> Algebra:
    return Algebra(table, params)


def _bound(table, params) -> Algebra:
    return algebra_for(table, Params.of(params))


def bracket_gen(x: Generator, y: Generator, table: BracketTable, params=None) -> Element:
    return _bound(table, params).bracket_gen(x, y)


def multiply(x, y, table: BracketTable, params=None) -> Element:
    return _bound(table, params).multiply(x, y)


def normal_order(word, table: BracketTable, params=None, rng: random.Random | None = None) -> Element:
    return _bound(table, params).normal_order(word, rng)


def commutator(x, y, table: BracketTable, params=None) -> Element:
    return _bound(table, params).commutator(x, y)


def grade(x, table: BracketTable | None = None) -> int | None:
    table = table or builtin_table()
    return Algebra(table).grade(x)


# --------------------------------------------------------------------------
# canonical text rendering


def _rank_or_fallback(table, g: Generator):
    try:
        return table.rank(g.family)
    except UnknownFamilyError:
        return (g.mode is not None, g.family)


def _word_key(w: Monomial, table: BracketTable) -> tuple:
    # central letters sort after all others so central tails print last
    return tuple(
        (g in table.central, str(_rank_or_fallback(table, g)), 0 if g.mode is None else g.mode) for g in w
    )


def _word_grade(w: Monomial, table: BracketTable) -> int:
    total = 0
    for g in w:
        try:
            total += table.grade(g)
        except UnknownFamilyError:
            total += g.mode or 0
    return total


def render_word(w: Monomial) -> str:
    if not w:
        return "1"
    parts = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        parts.append(str(w[i]) if j - i == 1 else f"{w[i]}^{j - i}")
        i = j
    return "*".join(parts)


def render_term(c: Fraction, body: str, unit: bool, first: bool) -> str:
    sign = "-" if c < 0 else "+"
    mag = abs(c)
    if unit:
        text = str(mag)
    elif mag == 1:
        text = body
    else:
        text = f"{mag}*{body}"
    if first:
        return text if sign == "+" else f"-{text}"
    return f" {sign} {text}"


def render(x: Element, table: BracketTable | None = None) -> str:
    """Canonical text: terms by (grade, word), reduced fractions, e.g. ``4*b[0] - 8/3*a[0]^3``."""
    table = table or builtin_table()
    if not x:
        return "0"
    words = sorted(x, key=lambda w: (_word_grade(w, table), _word_key(w, table)))
    out = []
    for i, w in enumerate(words):
        out.append(render_term(x.coefficient(w), render_word(w), not w, i == 0))
    return "".join(out)


# --------------------------------------------------------------------------
# the hard-coded string / Virasoro tables


def builtin_families() -> tuple:
    return (Family("a", True, M), Family("H", False, sp.Integer(0)), Family("b", True, M))


@functools.lru_cache(maxsize=None)
def builtin_table(profile: str = "example") -> BracketTable:
    """Bracket table of the oscillator algebra extended by the Virasoro-like ``b`` generators.

    ``example``: ``F = -eps^2/3 * a0^3 + alpha*a0`` and ``G = beta*a0``.
    ``general``: ``F = alpha*a0 + f/3*a0^3`` and ``G = beta*a0 + g/3*a0^3``.
    """
    eps, alpha, beta, f, g = sp.symbols("eps alpha beta f g")
    a0 = (("a", sp.Integer(0)),)
    if profile == "example":
        cubic_f, cubic_g = -eps**2 / 3, sp.Integer(0)
    elif profile == "general":
        cubic_f, cubic_g = f / 3, g / 3
    else:
        raise ValueError(f"unknown profile {profile!r}")
    rules = [
        BracketRule("a", "a", (RuleTerm(M, (M + N,), a0),)),
        BracketRule("H", "a", (RuleTerm(N, (), (("a", N),)),)),
        BracketRule("a", "b", (RuleTerm(M, (), (("a", M + N),)),)),
        BracketRule("H", "b", (RuleTerm(N, (), (("b", N),)),)),
        BracketRule(
            "b",
            "b",
            (
                RuleTerm(M - N, (), (("b", M + N),)),
                RuleTerm(M**3 * alpha + M * beta, (M + N,), a0),
                RuleTerm(M**3 * cubic_f + M * cubic_g, (M + N,), a0 * 3),
            ),
        ),
    ]
    rules = tuple(BracketRule(r.left, r.right, canonical_terms(r.terms)) for r in rules)
    return BracketTable(builtin_families(), rules, frozenset({a(0)}))
