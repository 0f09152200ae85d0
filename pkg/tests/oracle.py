"""Brute-force reference model, written without the package's rule tables.

Brackets come straight from the defining relations; words are reduced by
repeatedly fixing the leftmost out-of-order adjacent pair.  Slow but simple.
"""

from fractions import Fraction

from yangvir.algebra import Generator

FAMILY_ORDER = {"H": 0, "a": 1, "b": 2}


def key(g):
    return (FAMILY_ORDER[g.family], g.mode if g.mode is not None else 0)


class Model:
    def __init__(self, eps=1, alpha=0, beta=0, f=None, g=0):
        self.eps = eps if callable(eps) else (lambda m, e=Fraction(eps): e)
        self.alpha = Fraction(alpha)
        self.beta = Fraction(beta)
        # example profile: F = alpha a0 - eps^2/3 a0^3, G = beta a0
        self.f = Fraction(-self.eps(1) ** 2) if f is None else Fraction(f)
        self.g = Fraction(g)

    def bracket(self, x, y):
        """[x, y] of two generators as {word: coeff}."""
        if key(x) > key(y):
            return {w: -c for w, c in self.bracket(y, x).items()}
        a0 = Generator("a", 0)
        fx, fy = x.family, y.family
        m, n = x.mode, y.mode
        out = {}
        if fx == "H" and fy in "ab":
            out[(y,)] = Fraction(n)
        elif fx == "a" and fy == "a":
            if m + n == 0 and m:
                out[(a0,)] = Fraction(m)
        elif fx == "a" and fy == "b":
            if m:
                out[(Generator("a", m + n),)] = Fraction(m)
        elif fx == "b" and fy == "b":
            if m != n:
                out[(Generator("b", m + n),)] = Fraction(m - n)
            if m + n == 0:
                lin = m**3 * self.alpha + m * self.beta
                cub = (m**3 * self.f + m * self.g) / 3
                if lin:
                    out[(a0,)] = out.get((a0,), 0) + lin
                if cub:
                    out[(a0, a0, a0)] = cub
        return {w: c for w, c in out.items() if c}

    def order(self, word):
        todo = {tuple(word): Fraction(1)}
        done = {}
        while todo:
            w, c = todo.popitem()
            i = next((i for i in range(len(w) - 1) if key(w[i]) > key(w[i + 1])), None)
            if i is None:
                done[w] = done.get(w, 0) + c
                continue
            swapped = w[:i] + (w[i + 1], w[i]) + w[i + 2 :]
            todo[swapped] = todo.get(swapped, 0) + c
            for bw, bc in self.bracket(w[i], w[i + 1]).items():
                nw = w[:i] + bw + w[i + 2 :]
                todo[nw] = todo.get(nw, 0) + c * bc
        return {w: c for w, c in done.items() if c}

    # tensors: {(word, word): coeff}
    def tmul(self, s, t):
        out = {}
        for (l1, r1), c1 in s.items():
            for (l2, r2), c2 in t.items():
                for lw, lc in self.order(l1 + l2).items():
                    for rw, rc in self.order(r1 + r2).items():
                        out[(lw, rw)] = out.get((lw, rw), 0) + c1 * c2 * lc * rc
        return {k: v for k, v in out.items() if v}

    def coproduct_gen(self, x):
        out = {((x,), ()): Fraction(1), ((), (x,)): Fraction(1)}
        if x.family == "b" and x.mode:
            m = x.mode
            am, a0 = Generator("a", m), Generator("a", 0)
            c = self.eps(abs(m)) * m
            out[((am,), (a0,))] = c
            out[((a0,), (am,))] = -c
        return out

    def coproduct(self, elem):
        out = {}
        for w, c in elem.items():
            acc = {((), ()): Fraction(1)}
            for g in w:
                acc = self.tmul(acc, self.coproduct_gen(g))
            for k, v in acc.items():
                out[k] = out.get(k, 0) + c * v
        return {k: v for k, v in out.items() if v}

    def homomorphism_residual(self, x, y):
        dx, dy = self.coproduct_gen(x), self.coproduct_gen(y)
        comm = _sub(self.tmul(dx, dy), self.tmul(dy, dx))
        return _sub(comm, self.coproduct(self.bracket(x, y)))


def _sub(s, t):
    out = dict(s)
    for k, v in t.items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}
