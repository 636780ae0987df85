"""Semantics-preserving simplification of index terms."""

from __future__ import annotations

from functools import lru_cache

from .index import (
    ONE,
    ZERO,
    BoundedMax,
    Const,
    Index,
    Max,
    Monus,
    Plus,
    Times,
    Var,
    free_vars,
    subst_index,
)
from .poly import Poly, dominated, exact_poly

UNROLL_LIMIT = 32


@lru_cache(maxsize=65536)
def normalize(i: Index) -> Index:
    if isinstance(i, (Const, Var)):
        return i
    if isinstance(i, Plus):
        return _plus(normalize(i.left), normalize(i.right))
    if isinstance(i, Monus):
        return _monus(normalize(i.left), normalize(i.right))
    if isinstance(i, Times):
        return _times(normalize(i.left), normalize(i.right))
    if isinstance(i, Max):
        return _max(normalize(i.left), normalize(i.right))
    if isinstance(i, BoundedMax):
        return _bounded_max(i.binder, normalize(i.bound), normalize(i.body))
    raise TypeError(f"not an index: {i!r}")


def _plus(a: Index, b: Index) -> Index:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if a == ZERO:
        return b
    if b == ZERO:
        return a
    if isinstance(a, Const):
        a, b = b, a
    if isinstance(b, Const) and isinstance(a, Plus) and isinstance(a.right, Const):
        return _plus(a.left, Const(a.right.value + b.value))
    return Plus(a, b)


def _monus(a: Index, b: Index) -> Index:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(max(0, a.value - b.value))
    if b == ZERO:
        return a
    if a == ZERO or a == b:
        return ZERO
    if isinstance(b, Const):
        if isinstance(a, Plus) and isinstance(a.right, Const):
            c = a.right.value
            if c >= b.value:
                return _plus(a.left, Const(c - b.value))
            return _monus(a.left, Const(b.value - c))
        if isinstance(a, Monus) and isinstance(a.right, Const):
            return _monus(a.left, Const(a.right.value + b.value))
    if isinstance(a, Plus):
        if a.right == b:
            return a.left
        if a.left == b:
            return a.right
    pa, pb = exact_poly(a), exact_poly(b)
    if pa is not None and pb is not None:
        if dominated(pa, pb):
            return ZERO
        if dominated(pb, pa):
            return normalize((pa - pb).to_index())
    return Monus(a, b)


def _times(a: Index, b: Index) -> Index:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if a == ZERO or b == ZERO:
        return ZERO
    if a == ONE:
        return b
    if b == ONE:
        return a
    if isinstance(b, Const):
        a, b = b, a
    if isinstance(a, Const) and isinstance(b, Times) and isinstance(b.left, Const):
        return _times(Const(a.value * b.left.value), b.right)
    return Times(a, b)


def _max_operands(i: Index) -> list[Index]:
    if isinstance(i, Max):
        return _max_operands(i.left) + _max_operands(i.right)
    return [i]


def _max(a: Index, b: Index) -> Index:
    ops = list(dict.fromkeys(_max_operands(a) + _max_operands(b)))
    consts = [o.value for o in ops if isinstance(o, Const)]
    ops = [o for o in ops if not isinstance(o, Const)]
    if consts and max(consts) > 0:
        ops.insert(0, Const(max(consts)))
    ops = _rewrite_telescopes(ops)
    ops = _drop_dominated(ops)
    if not ops:
        return ZERO
    out = ops[0]
    for o in ops[1:]:
        out = Max(out, o)
    return out


def _drop_dominated(ops: list[Index]) -> list[Index]:
    polys = [exact_poly(o) for o in ops]
    kept = []
    for k, (o, p) in enumerate(zip(ops, polys)):
        if p is not None and any(
            j != k and q is not None and dominated(p, q) and (p != q or j < k)
            for j, q in enumerate(polys)
        ):
            continue
        kept.append(o)
    return kept


def _rewrite_telescopes(ops: list[Index]) -> list[Index]:
    """Close telescoping bounded maxima whose empty-range value is covered by a sibling."""
    polys = [exact_poly(o) for o in ops]
    out = []
    for o in ops:
        shape = _telescope(o)
        if shape is not None:
            base, step, bound = shape
            spill = base - Poly.const(step)
            if any(p is not None and dominated(spill, p) for p in polys):
                o = _telescope_closed_form(base, step, bound)
        out.append(o)
    return out


def _telescope(i: Index) -> tuple[Poly, int, Index] | None:
    """Match max[v < I](A + c*v + (I - 1 - v) * c) and return (A, c, I)."""
    if not isinstance(i, BoundedMax) or not isinstance(i.body, Plus):
        return None
    v, bound = i.binder, i.bound
    if v in free_vars(bound):
        return None
    remaining = normalize(Monus(Monus(bound, ONE), Var(v)))
    for head, tail in ((i.body.left, i.body.right), (i.body.right, i.body.left)):
        step = _scaled(tail, remaining)
        if step is None:
            continue
        ph = exact_poly(head)
        if ph is None:
            continue
        rest, pos, neg = ph.split(v)
        if neg.terms or pos != Poly({((v, 1),): step}):
            continue
        return rest, step, bound
    return None


def _scaled(tail: Index, remaining: Index) -> int | None:
    if tail == remaining:
        return 1
    if isinstance(tail, Times) and isinstance(tail.left, Const) and tail.right == remaining:
        return tail.left.value
    return None


def _telescope_closed_form(base: Poly, step: int, bound: Index) -> Index:
    return normalize(Monus(Plus(base.to_index(), Times(Const(step), bound)), Const(step)))


def _bounded_max(v: str, bound: Index, body: Index) -> Index:
    if bound == ZERO or body == ZERO:
        return ZERO
    if isinstance(bound, Const) and bound.value <= UNROLL_LIMIT:
        out: Index = ZERO
        for k in range(bound.value):
            out = _max(out, normalize(subst_index(body, v, Const(k))))
        return out
    if v not in free_vars(body):
        pb = exact_poly(bound)
        if pb is not None and pb.is_nonneg() and pb.constant() >= 1:
            return body
    shape = _telescope(BoundedMax(v, bound, body))
    if shape is not None:
        base, step, _ = shape
        if dominated(base, Poly.const(step)):
            return _telescope_closed_form(base, step, bound)
    return BoundedMax(v, bound, body)
