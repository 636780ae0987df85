"""Integer polynomials over index variables, used for dominance reasoning."""

from __future__ import annotations

from typing import Iterable, Mapping

from .index import ZERO, Const, Index, Plus, Times, Var

Monomial = tuple  # sorted tuple of (variable, exponent) pairs


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    powers = dict(a)
    for var, exp in b:
        powers[var] = powers.get(var, 0) + exp
    return tuple(sorted(powers.items()))


class Poly:
    """A polynomial with integer coefficients; immutable and hashable."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        clean = {m: c for m, c in (terms or {}).items() if c != 0}
        self.terms = tuple(sorted(clean.items()))
        self._hash = hash(self.terms)

    @staticmethod
    def const(n: int) -> Poly:
        return Poly({(): n})

    @staticmethod
    def var(name: str) -> Poly:
        return Poly({((name, 1),): 1})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({dict(self.terms)})"

    def __add__(self, other: Poly) -> Poly:
        out = dict(self.terms)
        for m, c in other.terms:
            out[m] = out.get(m, 0) + c
        return Poly(out)

    def __neg__(self) -> Poly:
        return Poly({m: -c for m, c in self.terms})

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly) -> Poly:
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    def is_nonneg(self) -> bool:
        """All coefficients non-negative, hence non-negative on all naturals."""
        return all(c >= 0 for _, c in self.terms)

    def is_const(self) -> bool:
        return all(m == () for m, _ in self.terms)

    def constant(self) -> int:
        return dict(self.terms).get((), 0)

    def variables(self) -> frozenset[str]:
        return frozenset(v for m, _ in self.terms for v, _ in m)

    def split(self, var: str) -> tuple[Poly, Poly, Poly]:
        """(terms without var, positive terms with var, negative terms with var)."""
        rest, pos, neg = {}, {}, {}
        for m, c in self.terms:
            if any(v == var for v, _ in m):
                (pos if c > 0 else neg)[m] = c
            else:
                rest[m] = c
        return Poly(rest), Poly(pos), Poly(neg)

    def subst(self, var: str, rep: Poly) -> Poly:
        out = Poly()
        for m, c in self.terms:
            term = Poly.const(c)
            for v, e in m:
                factor = rep if v == var else Poly.var(v)
                for _ in range(e):
                    term = term * factor
            out = out + term
        return out

    def evaluate(self, env: Mapping[str, int]) -> int:
        total = 0
        for m, c in self.terms:
            term = c
            for v, e in m:
                term *= env[v] ** e
            total += term
        return total

    def to_index(self) -> Index:
        """Index denoting this polynomial; requires non-negative coefficients."""
        if not self.is_nonneg():
            raise ValueError("only polynomials with non-negative coefficients are indices")
        parts: list[Index] = []
        const = 0
        for m, c in sorted(self.terms, key=lambda t: (-_degree(t[0]), t[0])):
            if m == ():
                const = c
                continue
            factors: list[Index] = []
            for v, e in m:
                factors.extend([Var(v)] * e)
            term = factors[0]
            for f in factors[1:]:
                term = Times(term, f)
            if c != 1:
                term = Times(Const(c), term)
            parts.append(term)
        if const:
            parts.append(Const(const))
        if not parts:
            return ZERO
        out = parts[0]
        for p in parts[1:]:
            out = Plus(out, p)
        return out


def _degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def dominated(lower: Poly, upper: Poly) -> bool:
    """upper - lower has non-negative coefficients."""
    return (upper - lower).is_nonneg()


def prune_upper(polys: Iterable[Poly]) -> tuple[Poly, ...]:
    """Drop candidates dominated by another one (keeps the max unchanged)."""
    unique = list(dict.fromkeys(polys))
    kept = [p for k, p in enumerate(unique)
            if not any(j != k and dominated(p, q) for j, q in enumerate(unique))]
    return tuple(kept)


def prune_lower(polys: Iterable[Poly]) -> tuple[Poly, ...]:
    """Keep only the strongest lower bounds."""
    return prune_upper(polys)


def exact_poly(i: Index) -> Poly | None:
    """Polynomial equal to ``i`` when ``i`` uses only constants, variables, + and *."""
    if isinstance(i, Const):
        return Poly.const(i.value)
    if isinstance(i, Var):
        return Poly.var(i.name)
    if isinstance(i, (Plus, Times)):
        left, right = exact_poly(i.left), exact_poly(i.right)
        if left is None or right is None:
            return None
        return left + right if isinstance(i, Plus) else left * right
    return None
