"""Parser for ``.lba`` presentations and for concrete algebra expressions.

A presentation is a sequence of line-oriented declarations::

    param eps = 1
    param eps indexed { 1: 1, 2: 1, default: 1 }
    generator a : mode ; grade m
    generator H ; grade 0
    central a[0]
    bracket [a[m], b[n]] = m * a[m+n]
    cotail b[m] = eps * m * ( a[m] (x) a[0] - a[0] (x) a[m] )

A line that starts with whitespace continues the previous declaration, as does
any line inside open brackets.  ``#`` starts a comment.  ``delta(e)`` keeps a
term only where ``e = 0``; ``(x)`` is the tensor product and binds tighter than
``+``/``-`` but looser than ``*``.  Only rational literals are accepted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

import sympy as sp
from sympy.core.function import AppliedUndef

from .algebra import (
    M,
    N,
    Algebra,
    BracketRule,
    BracketTable,
    Element,
    Family,
    Generator,
    IndexedParam,
    Params,
    RuleTerm,
    algebra_for,
    canonical_terms,
    checked_mode,
    render_rule_term,
    solve_deltas,
)
from .errors import AlgebraError, ParseError
from .presentation import Cotail, Presentation, builtin_presentation, profile_source
from .tensor import Bialgebra, TensorElement, bialgebra_for

KEYWORDS = {"param", "generator", "central", "bracket", "cotail"}
RESERVED = KEYWORDS | {"delta", "comm", "mode", "grade", "indexed", "default"}
MAX_EXPONENT = 64
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_OPS = set("+-*/^()[],=:;{}")
_OPENERS = {"(": ")", "[": "]", "{": "}"}


@dataclass(frozen=True)
class Token:
    kind: str  # NUM IDENT OP TENSOR NEWLINE EOF
    text: str
    line: int
    col: int


class _Source:
    def __init__(self, text: str):
        self.lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")

    def error(self, message: str, line: int, col: int) -> ParseError:
        snippet = self.lines[line - 1] if 0 < line <= len(self.lines) else ""
        col = max(1, min(col, len(snippet) + 1))
        return ParseError(message, line, col, snippet)

    def at(self, tok: Token, message: str) -> ParseError:
        return self.error(message, tok.line, tok.col)


def _code(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def tokenize(src: _Source) -> list[Token]:
    tokens: list[Token] = []
    stack: list[Token] = []
    codes = [_code(l) for l in src.lines]
    blank = [not c.strip() for c in codes]
    pending = False  # tokens emitted since the last NEWLINE
    for li, code in enumerate(codes, start=1):
        i = 0
        while i < len(code):
            ch = code[i]
            col = i + 1
            if ch in " \t":
                i += 1
                continue
            if code.startswith("(x)", i):
                tokens.append(Token("TENSOR", "(x)", li, col))
                i += 3
            elif ch.isdigit():
                j = i
                while j < len(code) and code[j].isdigit():
                    j += 1
                if j < len(code) and (code[j] == "." or code[j] in "eE" and code[j + 1 : j + 2].isdigit()):
                    raise src.error("floating point literals are not allowed; use a fraction", li, col)
                if j < len(code) and (code[j].isalpha() or code[j] == "_"):
                    raise src.error(f"malformed number {code[i:j + 1]!r}", li, col)
                tokens.append(Token("NUM", code[i:j], li, col))
                i = j
            elif ch.isascii() and (ch.isalpha() or ch == "_"):
                m = _IDENT.match(code, i)
                tokens.append(Token("IDENT", m.group(), li, col))
                i = m.end()
            elif ch in _OPS:
                tok = Token("OP", ch, li, col)
                if ch in _OPENERS:
                    stack.append(tok)
                elif ch in ")]}":
                    if not stack or _OPENERS[stack[-1].text] != ch:
                        raise src.at(tok, f"unbalanced {ch!r}")
                    stack.pop()
                tokens.append(tok)
                i += 1
            elif ch == ".":
                raise src.error("floating point literals are not allowed; use a fraction", li, col)
            else:
                raise src.error(f"unexpected character {ch!r}", li, col)
            pending = True
        if stack or not pending:
            continue
        nxt = next((k for k in range(li, len(codes)) if not blank[k]), None)
        if nxt is not None and codes[nxt][:1] in (" ", "\t"):
            continue
        tokens.append(Token("NEWLINE", "", li, len(code) + 1))
        pending = False
    if stack:
        raise src.at(stack[-1], f"unclosed {stack[-1].text!r}")
    last = len(src.lines)
    tokens.append(Token("EOF", "", last, len(src.lines[-1]) + 1))
    return tokens


# --------------------------------------------------------------------------
# expression syntax tree


@dataclass(frozen=True)
class Num:
    value: int
    tok: Token


@dataclass(frozen=True)
class Name:
    name: str
    tok: Token


@dataclass(frozen=True)
class Index:
    name: str
    index: object
    tok: Token


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    tok: Token


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    tok: Token


@dataclass(frozen=True)
class Neg:
    operand: object
    tok: Token


class _Parser:
    def __init__(self, src: _Source, tokens: list[Token]):
        self.src = src
        self.tokens = tokens
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def at_op(self, text: str) -> bool:
        return self.tok.kind == "OP" and self.tok.text == text

    def expect_op(self, text: str) -> Token:
        if not self.at_op(text):
            raise self.src.at(self.tok, f"expected {text!r}, found {self._describe(self.tok)}")
        return self.advance()

    def expect_ident(self, what: str = "a name") -> Token:
        if self.tok.kind != "IDENT":
            raise self.src.at(self.tok, f"expected {what}, found {self._describe(self.tok)}")
        return self.advance()

    def expect_end(self) -> None:
        if self.tok.kind not in ("NEWLINE", "EOF"):
            raise self.src.at(self.tok, f"unexpected {self._describe(self.tok)}")

    @staticmethod
    def _describe(t: Token) -> str:
        if t.kind == "EOF":
            return "end of input"
        if t.kind == "NEWLINE":
            return "end of line"
        return repr(t.text)

    # expr := tensor (('+'|'-') tensor)*
    def expr(self):
        node = self.tensor()
        while self.tok.kind == "OP" and self.tok.text in "+-":
            op = self.advance()
            node = BinOp(op.text, node, self.tensor(), op)
        return node

    def tensor(self):
        node = self.term()
        while self.tok.kind == "TENSOR":
            op = self.advance()
            node = BinOp("(x)", node, self.term(), op)
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind == "OP" and self.tok.text in "*/":
            op = self.advance()
            node = BinOp(op.text, node, self.unary(), op)
        return node

    def unary(self):
        if self.tok.kind == "OP" and self.tok.text in "+-":
            op = self.advance()
            inner = self.unary()
            return Neg(inner, op) if op.text == "-" else inner
        return self.power()

    def power(self):
        node = self.atom()
        if self.at_op("^"):
            op = self.advance()
            if self.tok.kind != "NUM":
                raise self.src.at(self.tok, "exponent must be a non-negative integer literal")
            exp = self.advance()
            node = BinOp("^", node, Num(int(exp.text), exp), op)
        return node

    def atom(self):
        t = self.tok
        if t.kind == "NUM":
            self.advance()
            return Num(int(t.text), t)
        if t.kind == "IDENT":
            self.advance()
            if t.text in ("delta", "comm"):
                self.expect_op("(")
                args = [self.expr()]
                while self.at_op(","):
                    self.advance()
                    args.append(self.expr())
                self.expect_op(")")
                want = 1 if t.text == "delta" else 2
                if len(args) != want:
                    raise self.src.at(t, f"{t.text}() takes {want} argument{'s' if want > 1 else ''}")
                return Call(t.text, tuple(args), t)
            if t.text in RESERVED:
                raise self.src.at(t, f"unexpected keyword {t.text!r}")
            if self.at_op("["):
                self.advance()
                idx = self.expr()
                self.expect_op("]")
                return Index(t.text, idx, t)
            return Name(t.text, t)
        if self.at_op("("):
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        raise self.src.at(t, f"unexpected {self._describe(t)}")

    def rational(self) -> Fraction:
        sign = 1
        if self.tok.kind == "OP" and self.tok.text in "+-":
            sign = -1 if self.advance().text == "-" else 1
        if self.tok.kind != "NUM":
            raise self.src.at(self.tok, "expected a rational literal")
        num = int(self.advance().text)
        den = 1
        if self.at_op("/"):
            self.advance()
            if self.tok.kind != "NUM":
                raise self.src.at(self.tok, "expected a denominator")
            dt = self.advance()
            den = int(dt.text)
            if den == 0:
                raise self.src.at(dt, "zero denominator")
        return Fraction(sign * num, den)


# --------------------------------------------------------------------------
# symbolic values used while elaborating rules


@dataclass(frozen=True)
class _Term:
    coeff: sp.Expr
    deltas: tuple
    slots: tuple  # one pattern per tensor slot


@dataclass(frozen=True)
class _Val:
    terms: tuple
    arity: int = 1

    def is_scalar(self) -> bool:
        return self.arity == 1 and all(not t.deltas and not t.slots[0] for t in self.terms)

    def scalar(self) -> sp.Expr:
        return sp.expand(sum((t.coeff for t in self.terms), sp.Integer(0)))


def _scalar(expr) -> _Val:
    return _Val((_Term(sp.sympify(expr), (), ((),)),))


@dataclass
class _Env:
    params: dict = field(default_factory=dict)  # name -> Fraction | IndexedParam
    families: dict = field(default_factory=dict)  # name -> Family
    order: list = field(default_factory=list)
    central: list = field(default_factory=list)  # (Generator, Token)
    rules: dict = field(default_factory=dict)  # frozenset pair -> BracketRule
    cotails: dict = field(default_factory=dict)


class _Elaborator:
    def __init__(self, src: _Source):
        self.src = src
        self.env = _Env()

    def fail(self, tok: Token, message: str) -> ParseError:
        return self.src.at(tok, message)

    # -- symbolic evaluation of rule bodies -------------------------------

    def sym(self, node, vars_: dict) -> _Val:
        if isinstance(node, Num):
            return _scalar(node.value)
        if isinstance(node, Neg):
            v = self.sym(node.operand, vars_)
            return _Val(tuple(_Term(-t.coeff, t.deltas, t.slots) for t in v.terms), v.arity)
        if isinstance(node, Name):
            if node.name in vars_:
                return _scalar(vars_[node.name])
            if node.name in self.env.params:
                return _scalar(sp.Symbol(node.name))
            fam = self.env.families.get(node.name)
            if fam is not None:
                if fam.moded:
                    raise self.fail(node.tok, f"generator family {node.name!r} needs a mode index")
                return _Val((_Term(sp.Integer(1), (), (((fam.name, None),),)),))
            raise self.fail(node.tok, f"unbound mode variable or unknown name {node.name!r}")
        if isinstance(node, Index):
            idx = self.mode_expr(node.index, vars_)
            fam = self.env.families.get(node.name)
            if fam is not None:
                if not fam.moded:
                    raise self.fail(node.tok, f"generator {node.name!r} takes no mode index")
                return _Val((_Term(sp.Integer(1), (), (((fam.name, idx),),)),))
            if node.name in self.env.params:
                return _scalar(sp.Function(node.name)(idx))
            raise self.fail(node.tok, f"unknown generator family or parameter {node.name!r}")
        if isinstance(node, Call):
            if node.name == "comm":
                raise self.fail(node.tok, "comm() is not allowed in presentation rules")
            arg = self.sym(node.args[0], vars_)
            if not arg.is_scalar():
                raise self.fail(node.tok, "delta() takes a mode expression")
            cond = arg.scalar()
            self.check_mode_only(cond, node.tok, "delta condition")
            if sp.Poly(cond, M, N).total_degree() > 1:
                raise self.fail(node.tok, "delta condition must be linear in the mode variables")
            return _Val((_Term(sp.Integer(1), (cond,), ((),)),))
        if isinstance(node, BinOp):
            if node.op == "^":
                return self.sym_pow(node, vars_)
            left = self.sym(node.left, vars_)
            right = self.sym(node.right, vars_)
            if node.op in "+-":
                if node.op == "-":
                    right = _Val(tuple(_Term(-t.coeff, t.deltas, t.slots) for t in right.terms), right.arity)
                if left.arity != right.arity:
                    raise self.fail(node.tok, "cannot add a tensor and a non-tensor")
                return _Val(left.terms + right.terms, left.arity)
            if node.op == "*":
                return self.sym_mul(left, right, node.tok)
            if node.op == "/":
                if not right.is_scalar():
                    raise self.fail(node.tok, "division only by nonzero rational constants")
                d = right.scalar()
                if not d.is_Rational or d == 0:
                    raise self.fail(node.tok, "division only by nonzero rational constants")
                return _Val(tuple(_Term(t.coeff / d, t.deltas, t.slots) for t in left.terms), left.arity)
            if node.op == "(x)":
                terms = tuple(
                    _Term(s.coeff * t.coeff, s.deltas + t.deltas, s.slots + t.slots)
                    for s in left.terms
                    for t in right.terms
                )
                return _Val(terms, left.arity + right.arity)
        raise self.fail(getattr(node, "tok", Token("EOF", "", 1, 1)), "unsupported expression")

    def sym_mul(self, left: _Val, right: _Val, tok: Token) -> _Val:
        if left.arity > 1 or right.arity > 1:
            if left.arity > 1 and right.arity > 1:
                raise self.fail(tok, "cannot multiply two tensors in a rule")
            scalar, other = (right, left) if left.arity > 1 else (left, right)
            if not scalar.is_scalar():
                raise self.fail(tok, "a tensor can only be scaled by a scalar factor")
            c = scalar.scalar()
            return _Val(tuple(_Term(c * t.coeff, t.deltas, t.slots) for t in other.terms), other.arity)
        terms = tuple(
            _Term(s.coeff * t.coeff, s.deltas + t.deltas, (s.slots[0] + t.slots[0],))
            for s in left.terms
            for t in right.terms
        )
        return _Val(terms, 1)

    def sym_pow(self, node: BinOp, vars_: dict) -> _Val:
        k = node.right.value
        if k > MAX_EXPONENT:
            raise self.fail(node.right.tok, f"exponent larger than {MAX_EXPONENT}")
        base = self.sym(node.left, vars_)
        if base.arity > 1:
            raise self.fail(node.tok, "tensors cannot be raised to a power")
        out = _scalar(1)
        for _ in range(k):
            out = self.sym_mul(out, base, node.tok)
        return out

    def check_mode_only(self, expr, tok: Token, what: str) -> None:
        if expr.free_symbols - {M, N} or expr.atoms(AppliedUndef):
            raise self.fail(tok, f"{what} may only use the rule's mode variables")

    def mode_expr(self, node, vars_: dict) -> sp.Expr:
        v = self.sym(node, vars_)
        if not v.is_scalar():
            raise self.fail(_first_token(node), "mode index must be an integer expression")
        e = v.scalar()
        self.check_mode_only(e, _first_token(node), "mode index")
        if not all(c.is_Integer for c in sp.Poly(e, M, N).coeffs()):
            raise self.fail(_first_token(node), "mode index must have integer coefficients")
        return e

    # -- declarations -------------------------------------------------------

    def declare_name(self, tok: Token) -> str:
        name = tok.text
        if name in RESERVED:
            raise self.fail(tok, f"{name!r} is a reserved word")
        if name in self.env.params or name in self.env.families:
            raise self.fail(tok, f"{name!r} is already declared")
        return name

    def param(self, p: _Parser) -> None:
        tok = p.expect_ident("a parameter name")
        name = self.declare_name(tok)
        if name in ("m", "n"):
            raise self.fail(tok, "'m' and 'n' are reserved for mode variables")
        if p.tok.kind == "IDENT" and p.tok.text == "indexed":
            p.advance()
            p.expect_op("{")
            entries: dict[int, Fraction] = {}
            default = None
            while True:
                key_tok = p.tok
                if key_tok.kind == "IDENT" and key_tok.text == "default":
                    p.advance()
                    p.expect_op(":")
                    if default is not None:
                        raise self.fail(key_tok, "duplicate default entry")
                    default = p.rational()
                else:
                    key = p.rational()
                    if key.denominator != 1:
                        raise self.fail(key_tok, "table keys must be integers")
                    p.expect_op(":")
                    val = p.rational()
                    k = abs(int(key))
                    if k in entries and entries[k] != val:
                        raise self.fail(key_tok, f"conflicting entries for mode +-{k}")
                    entries[k] = val
                if p.at_op(","):
                    p.advance()
                    continue
                p.expect_op("}")
                break
            self.env.params[name] = IndexedParam.of(entries, default)
        else:
            p.expect_op("=")
            self.env.params[name] = p.rational()
        p.expect_end()

    def generator(self, p: _Parser) -> None:
        tok = p.expect_ident("a generator name")
        name = self.declare_name(tok)
        moded = False
        var = None
        if p.at_op(":"):
            p.advance()
            mt = p.expect_ident("'mode'")
            if mt.text != "mode":
                raise self.fail(mt, "expected 'mode'")
            moded = True
            if p.tok.kind == "IDENT":
                var = p.advance().text
        grade_node = None
        if p.at_op(";"):
            p.advance()
            gt = p.expect_ident("'grade'")
            if gt.text != "grade":
                raise self.fail(gt, "expected 'grade'")
            grade_node = p.expr()
        p.expect_end()
        if grade_node is None:
            grade = M if moded else sp.Integer(0)
        else:
            if var is None and moded:
                free = _free_names(grade_node) - set(self.env.params) - set(self.env.families)
                if len(free) > 1:
                    raise self.fail(_first_token(grade_node), "grade uses more than one mode variable")
                var = free.pop() if free else "m"
            vars_ = {var: M} if moded else {}
            v = self.sym(grade_node, vars_)
            if not v.is_scalar():
                raise self.fail(_first_token(grade_node), "grade must be a polynomial in the mode")
            grade = v.scalar()
            if grade.free_symbols - {M} or grade.atoms(AppliedUndef):
                raise self.fail(_first_token(grade_node), "grade may only use the family's mode variable")
            if not all(c.is_Integer for c in sp.Poly(grade, M).coeffs()):
                raise self.fail(_first_token(grade_node), "grade must have integer coefficients")
        self.env.families[name] = Family(name, moded, grade)
        self.env.order.append(name)

    def central(self, p: _Parser) -> None:
        tok = p.expect_ident("a generator")
        fam = self.env.families.get(tok.text)
        if fam is None:
            raise self.fail(tok, f"unknown generator family {tok.text!r}")
        mode = None
        if p.at_op("["):
            if not fam.moded:
                raise self.fail(p.tok, f"generator {fam.name!r} takes no mode index")
            p.advance()
            mt = p.tok
            value = p.rational()
            if value.denominator != 1:
                raise self.fail(mt, "mode must be an integer literal")
            p.expect_op("]")
            mode = int(value)
        elif fam.moded:
            raise self.fail(tok, f"central generator {fam.name!r} needs a mode index")
        p.expect_end()
        self.env.central.append((Generator(fam.name, mode), tok))

    def pattern(self, p: _Parser) -> tuple[Family, str | None, Token]:
        tok = p.expect_ident("a generator family")
        fam = self.env.families.get(tok.text)
        if fam is None:
            raise self.fail(tok, f"unknown generator family {tok.text!r}")
        var = None
        if p.at_op("["):
            br = p.advance()
            if not fam.moded:
                raise self.fail(br, f"generator {fam.name!r} takes no mode index")
            vt = p.expect_ident("a mode variable")
            if vt.text in self.env.params or vt.text in self.env.families or vt.text in RESERVED:
                raise self.fail(vt, f"{vt.text!r} cannot be used as a mode variable")
            var = vt.text
            p.expect_op("]")
        elif fam.moded:
            raise self.fail(tok, f"pattern for {fam.name!r} needs a mode variable")
        return fam, var, tok

    def bracket(self, p: _Parser, head: Token) -> None:
        p.expect_op("[")
        lf, lv, ltok = self.pattern(p)
        p.expect_op(",")
        rf, rv, rtok = self.pattern(p)
        p.expect_op("]")
        eq = p.expect_op("=")
        body_tok = p.tok
        body = p.expr()
        p.expect_end()
        if lv is not None and lv == rv:
            raise self.fail(rtok, f"mode variable {rv!r} is used twice")
        pair = frozenset((lf.name, rf.name))
        if pair in self.env.rules:
            raise self.fail(head, f"duplicate bracket rule for [{lf.name}, {rf.name}]")
        vars_ = {}
        if lv is not None:
            vars_[lv] = M
        if rv is not None:
            vars_[rv] = N
        val = self.sym(body, vars_)
        if val.arity != 1:
            raise self.fail(body_tok, "bracket rules cannot contain tensors")
        raw = [RuleTerm(t.coeff, t.deltas, t.slots[0]) for t in val.terms]
        terms = canonical_terms(raw)
        left, right = lf.name, rf.name
        if self.rank(right) < self.rank(left):
            swap = {M: N, N: M}
            terms = canonical_terms(
                RuleTerm(
                    -sp.sympify(t.coeff).xreplace(swap),
                    tuple(sp.sympify(d).xreplace(swap) for d in t.deltas),
                    tuple((f, None if e is None else sp.sympify(e).xreplace(swap)) for f, e in t.target),
                )
                for t in terms
            )
            left, right = right, left
        self.check_grading(terms, self.env.families[left], self.env.families[right], body_tok)
        if left == right:
            swap = {M: N, N: M}
            mirrored = [
                RuleTerm(
                    sp.sympify(t.coeff).xreplace(swap),
                    tuple(sp.sympify(d).xreplace(swap) for d in t.deltas),
                    tuple((f, None if e is None else sp.sympify(e).xreplace(swap)) for f, e in t.target),
                )
                for t in terms
            ]
            if canonical_terms(list(terms) + mirrored):
                raise self.fail(eq, f"bracket [{left}, {left}] is not antisymmetric")
        self.env.rules[pair] = BracketRule(left, right, terms)

    def rank(self, name: str) -> tuple:
        fam = self.env.families[name]
        return (fam.moded, self.env.order.index(name))

    def pattern_grade(self, pattern) -> sp.Expr:
        total = sp.Integer(0)
        for f, e in pattern:
            fam = self.env.families[f]
            total += fam.grade.xreplace({M: e}) if fam.moded else fam.grade
        return total

    def check_grading(self, terms, left: Family, right: Family | None, tok: Token, tensor: bool = False) -> None:
        expected = left.grade if left.moded else left.grade
        if right is not None:
            expected = expected + (right.grade.xreplace({M: N}) if right.moded else right.grade)
        for t in terms:
            got = self.pattern_grade(t.target)
            if tensor:
                got += self.pattern_grade(t.right)
            _, subs = solve_deltas(t.deltas)
            diff = sp.expand((got - expected).xreplace(subs))
            if diff != 0:
                raise self.fail(
                    tok,
                    f"grading inconsistency: term {render_rule_term(t)} has grade {sp.expand(got.xreplace(subs))}"
                    f" but the left-hand side has grade {sp.expand(expected.xreplace(subs))}",
                )

    def cotail(self, p: _Parser, head: Token) -> None:
        fam, var, ftok = self.pattern(p)
        p.expect_op("=")
        body_tok = p.tok
        body = p.expr()
        p.expect_end()
        if fam.name in self.env.cotails:
            raise self.fail(head, f"duplicate cotail for {fam.name!r}")
        val = self.sym(body, {var: M} if var else {})
        if val.arity != 2:
            raise self.fail(body_tok, "a cotail must be a sum of two-slot tensors a (x) b")
        terms = canonical_terms(RuleTerm(t.coeff, t.deltas, t.slots[0], t.slots[1]) for t in val.terms)
        self.check_grading(terms, fam, None, body_tok, tensor=True)
        self.env.cotails[fam.name] = Cotail(fam.name, terms)

    def check_central(self) -> None:
        for g, tok in self.env.central:
            for rule in self.env.rules.values():
                slots = [v for f, v in ((rule.left, M), (rule.right, N)) if f == g.family]
                for var in slots:
                    bind = {} if g.mode is None else {var: sp.Integer(g.mode)}
                    terms = [
                        RuleTerm(
                            sp.sympify(t.coeff).xreplace(bind),
                            tuple(sp.sympify(d).xreplace(bind) for d in t.deltas),
                            tuple((f, None if e is None else sp.sympify(e).xreplace(bind)) for f, e in t.target),
                        )
                        for t in rule.terms
                    ]
                    if canonical_terms(terms):
                        other = rule.right if var == M else rule.left
                        raise self.fail(tok, f"{g} is declared central but does not commute with {other!r}")
            tail = self.env.cotails.get(g.family)
            if tail is not None and g.mode is not None:
                bind = {M: sp.Integer(g.mode)}
                terms = [
                    RuleTerm(
                        sp.sympify(t.coeff).xreplace(bind),
                        tuple(sp.sympify(d).xreplace(bind) for d in t.deltas),
                        t.target,
                        t.right,
                    )
                    for t in tail.terms
                ]
                if canonical_terms(terms):
                    raise self.fail(tok, f"{g} is declared central but its coproduct is not primitive")

    def build(self) -> Presentation:
        fams = tuple(self.env.families[n] for n in self.env.order)
        rank = {n: self.rank(n) for n in self.env.order}
        rules = tuple(sorted(self.env.rules.values(), key=lambda r: (rank[r.left], rank[r.right])))
        table = BracketTable(fams, rules, frozenset(g for g, _ in self.env.central))
        cotails = tuple(self.env.cotails[n] for n in sorted(self.env.cotails, key=rank.get))
        return Presentation(table, Params.of(self.env.params), cotails)


def _first_token(node) -> Token:
    while isinstance(node, BinOp):
        node = node.left
    return node.tok


def _free_names(node) -> set:
    if isinstance(node, Name):
        return {node.name}
    if isinstance(node, (Neg,)):
        return _free_names(node.operand)
    if isinstance(node, BinOp):
        return _free_names(node.left) | _free_names(node.right)
    if isinstance(node, Index):
        return _free_names(node.index)
    if isinstance(node, Call):
        return set().union(*(_free_names(a) for a in node.args))
    return set()


def parse_presentation(source: str) -> Presentation:
    """Parse and validate a ``.lba`` presentation.

    Raises :class:`ParseError` for syntax errors, unbound mode variables,
    duplicate rules, grading inconsistencies and broken centrality.
    """
    src = _Source(source)
    try:
        tokens = tokenize(src)
        p = _Parser(src, tokens)
        el = _Elaborator(src)
        while p.tok.kind != "EOF":
            if p.tok.kind == "NEWLINE":
                p.advance()
                continue
            head = p.expect_ident("a declaration")
            if head.text == "param":
                el.param(p)
            elif head.text == "generator":
                el.generator(p)
            elif head.text == "central":
                el.central(p)
            elif head.text == "bracket":
                el.bracket(p, head)
            elif head.text == "cotail":
                el.cotail(p, head)
            else:
                raise src.at(head, f"unknown declaration {head.text!r}")
        el.check_central()
        return el.build()
    except ParseError:
        raise
    except RecursionError:
        raise src.error("expression nested too deeply", 1, 1) from None
    except (ValueError, TypeError, ArithmeticError, AlgebraError, sp.SympifyError, sp.PolynomialError) as exc:
        raise src.error(f"invalid presentation: {exc}", 1, 1) from None


def load_presentation(path) -> Presentation:
    with open(path, encoding="utf-8") as fh:
        return parse_presentation(fh.read())


def load_profile(name: str) -> Presentation:
    return parse_presentation(profile_source(name))


# --------------------------------------------------------------------------
# concrete expressions


class _Evaluator:
    def __init__(self, src: _Source, bi: Bialgebra):
        self.src = src
        self.bi = bi
        self.alg: Algebra = bi.algebra
        self.table = bi.presentation.table

    def fail(self, tok: Token, message: str) -> ParseError:
        return self.src.at(tok, message)

    def mode(self, node) -> int:
        sign = 1
        while isinstance(node, Neg):
            sign = -sign
            node = node.operand
        if not isinstance(node, Num):
            raise self.fail(_first_token(node), "mode must be an integer literal")
        try:
            return checked_mode(sign * node.value)
        except OverflowError:
            raise self.fail(node.tok, "mode outside the signed 64-bit range") from None

    def family(self, tok: Token, name: str) -> Family:
        for f in self.table.families:
            if f.name == name:
                return f
        raise self.fail(tok, f"unknown generator family {name!r}")

    def ev(self, node):
        if isinstance(node, Num):
            return Element.scalar(node.value)
        if isinstance(node, Neg):
            return -self.ev(node.operand)
        if isinstance(node, Name):
            fam = self.family(node.tok, node.name)
            if fam.moded:
                raise self.fail(node.tok, f"generator family {node.name!r} needs a mode index")
            return Element.of(Generator(fam.name))
        if isinstance(node, Index):
            fam = self.family(node.tok, node.name)
            if not fam.moded:
                raise self.fail(node.tok, f"generator {node.name!r} takes no mode index")
            return Element.of(Generator(fam.name, self.mode(node.index)))
        if isinstance(node, Call):
            if node.name == "delta":
                raise self.fail(node.tok, "delta() is only allowed in presentation rules")
            x, y = (self.ev(a) for a in node.args)
            if isinstance(x, Element) and isinstance(y, Element):
                return self.alg.commutator(x, y)
            x, y = _as_tensor(x), _as_tensor(y)
            if x.arity != y.arity:
                raise self.fail(node.tok, "comm() arguments have different tensor arity")
            return self.bi.tensor_commutator(x, y)
        if isinstance(node, BinOp):
            if node.op == "^":
                k = node.right.value
                if k > MAX_EXPONENT:
                    raise self.fail(node.right.tok, f"exponent larger than {MAX_EXPONENT}")
                base = self.ev(node.left)
                if isinstance(base, TensorElement):
                    out = TensorElement._raw({tuple(() for _ in range(base.arity)): Fraction(1)}, base.arity)
                    for _ in range(k):
                        out = self.bi.tensor_multiply(out, base)
                    return out
                return self.alg.power(base, k)
            x = self.ev(node.left)
            y = self.ev(node.right)
            if node.op in "+-":
                if isinstance(x, Element) and isinstance(y, Element):
                    return x + y if node.op == "+" else x - y
                if isinstance(x, TensorElement) and isinstance(y, TensorElement) and x.arity == y.arity:
                    return x + y if node.op == "+" else x - y
                raise self.fail(node.tok, "cannot add a tensor and a non-tensor")
            if node.op == "*":
                if isinstance(x, Element) and isinstance(y, Element):
                    return self.alg.multiply(x, y)
                if isinstance(x, TensorElement) and isinstance(y, TensorElement):
                    if x.arity != y.arity:
                        raise self.fail(node.tok, "tensor arity mismatch")
                    return self.bi.tensor_multiply(x, y)
                scalar, tensor = (x, y) if isinstance(x, Element) else (y, x)
                if set(scalar) - {()}:
                    raise self.fail(node.tok, "a tensor can only be scaled by a scalar")
                return tensor * scalar.coefficient(())
            if node.op == "/":
                if not isinstance(y, Element) or set(y) - {()} or not y:
                    raise self.fail(node.tok, "division only by nonzero rational constants")
                return x * (1 / y.coefficient(()))
            if node.op == "(x)":
                return _concat(_as_tensor(x), _as_tensor(y))
        raise self.fail(_first_token(node), "unsupported expression")


def _as_tensor(x) -> TensorElement:
    return x if isinstance(x, TensorElement) else TensorElement.from_element(x)


def _concat(s: TensorElement, t: TensorElement) -> TensorElement:
    acc = {}
    for ks, cs in s.items():
        for kt, ct in t.items():
            acc[ks + kt] = acc.get(ks + kt, 0) + cs * ct
    return TensorElement(acc, s.arity + t.arity)


def parse_expression(source: str, presentation: Presentation | None = None, params=None):
    """Evaluate a concrete expression such as ``comm(b[2], b[-2])`` to its normal form.

    Returns an :class:`Element`, or a :class:`TensorElement` when ``(x)`` is used.
    """
    presentation = presentation or builtin_presentation("example")
    src = _Source(source)
    try:
        tokens = [t for t in tokenize(src) if t.kind != "NEWLINE"]
        p = _Parser(src, tokens)
        if p.tok.kind == "EOF":
            raise src.at(p.tok, "empty expression")
        node = p.expr()
        if p.tok.kind != "EOF":
            raise src.at(p.tok, f"unexpected {p._describe(p.tok)}")
    except RecursionError:
        raise src.error("expression nested too deeply", 1, 1) from None
    bi = bialgebra_for(presentation, params)
    try:
        return _Evaluator(src, bi).ev(node)
    except RecursionError:
        raise src.error("expression nested too deeply", 1, 1) from None
