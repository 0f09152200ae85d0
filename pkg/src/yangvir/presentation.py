"""Presentation data: a bracket table plus parameter defaults and coproduct tails."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from importlib import resources

import sympy as sp

from .algebra import (
    M,
    BracketTable,
    Params,
    RuleTerm,
    builtin_table,
    canonical_terms,
    render_rule_term,
)
from .errors import UnknownParameterError

PROFILES = ("example", "general")


@dataclass(frozen=True)
class Cotail:
    """Non-primitive part of the coproduct of a family, in the mode variable ``m``."""

    family: str
    terms: tuple = ()


@dataclass(frozen=True)
class Presentation:
    table: BracketTable
    params: Params = Params()
    cotails: tuple = ()

    def cotail(self, family: str) -> Cotail | None:
        for c in self.cotails:
            if c.family == family:
                return c
        return None

    def bind(self, overrides=None) -> Params:
        """Declared defaults updated by ``overrides``; unknown names are rejected."""
        extra = Params.of(overrides)
        for name, _ in extra.values:
            if name not in self.params:
                raise UnknownParameterError(f"parameter {name!r} is not declared by the presentation")
        return self.params.updated(extra)

    def canonical(self) -> str:
        lines = [f"param {k} = {v}" for k, v in self.params.values]
        text = "\n".join(lines) + ("\n" if lines else "")
        text += self.table.canonical()
        for c in sorted(self.cotails, key=lambda c: self.table.rank(c.family)):
            body = " + ".join(render_rule_term(t) for t in c.terms) or "0"
            text += f"cotail {c.family}[m] = {body}\n"
        return text


def profile_source(name: str) -> str:
    if name not in PROFILES:
        raise ValueError(f"unknown profile {name!r}; choose from {', '.join(PROFILES)}")
    return resources.files(__package__).joinpath("profiles").joinpath(f"{name}.lba").read_text(encoding="utf-8")


@functools.lru_cache(maxsize=None)
def builtin_presentation(profile: str = "example") -> Presentation:
    """Hard-coded presentation matching the shipped ``.lba`` profile of the same name."""
    table = builtin_table(profile)
    if profile == "example":
        params = Params.of({"eps": 1, "alpha": 0, "beta": 0})
        eps = sp.Symbol("eps")
    else:
        params = Params.of({"eps": 1, "alpha": 0, "beta": 0, "f": -1, "g": 0})
        eps = sp.Function("eps")(M)
    a0, am = (("a", sp.Integer(0)),), (("a", M),)
    tail = canonical_terms([RuleTerm(eps * M, (), am, a0), RuleTerm(-eps * M, (), a0, am)])
    return Presentation(table, params, (Cotail("b", tail),))
