"""Deciding index judgments: forall-quantified inequalities and equalities over naturals.

A judgment is proved from polynomial bounds: every index has a list of upper
polynomials (its value never exceeds their maximum, or zero) and a list of lower
polynomials (each never exceeds it).  ``lhs <= rhs`` holds when each upper
polynomial of ``lhs`` is coefficient-wise dominated by some lower polynomial of
``rhs``.  Failing that, variables are split into the cases ``0`` and ``v + 1``.
Counterexamples come from enumeration, which can refute but never prove.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Protocol

from .index import (
    ONE,
    ZERO,
    BoundedMax,
    Const,
    Index,
    IllFormedIndex,
    Max,
    Monus,
    Plus,
    Times,
    Var,
    evaluate,
    format_index,
    free_vars,
    subst_index,
    well_formed,
)
from .normalize import normalize
from .poly import Poly, dominated, prune_lower, prune_upper

DEFAULT_BUDGET = 8
SPLIT_DEPTH = 2
MAX_CANDIDATES = 48
MAX_ENUMERATION = 200_000


def default_budget() -> int:
    raw = os.environ.get("PQR_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    value = int(raw)
    if value < 0:
        raise ValueError("PQR_BUDGET must be a natural number")
    return value


class Verdict:
    pass


@dataclass(frozen=True)
class Valid(Verdict):
    def __str__(self) -> str:
        return "Valid"


@dataclass(frozen=True)
class Refuted(Verdict):
    witness: dict = field(default_factory=dict, hash=False)

    def __str__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.witness.items())
        return f"Refuted({{{inner}}})"


@dataclass(frozen=True)
class Unknown(Verdict):
    checked_bound: int

    def __str__(self) -> str:
        return f"Unknown({self.checked_bound})"


@dataclass(frozen=True)
class Goal:
    """A judgment handed to an external solver."""

    ctx: tuple[str, ...]
    relation: str  # "<=" or "="
    lhs: Index
    rhs: Index

    def text(self) -> str:
        head = f"forall {' '.join(self.ctx)}. " if self.ctx else ""
        return f"{head}{format_index(self.lhs)} {self.relation} {format_index(self.rhs)}"


class ExternalSolver(Protocol):
    """Adapter for an outside decision procedure; returns None when it gives up."""

    def decide(self, goal: Goal) -> Verdict | None: ...


# polynomial bounds


def _cap(polys: Iterable[Poly], upper: bool) -> tuple[Poly, ...]:
    pruned = prune_upper(polys) if upper else prune_lower(polys)
    return pruned[:MAX_CANDIDATES]


def _with_zero(i: Index) -> tuple[Poly, ...]:
    # upper bounds hold only together with the implicit 0, so put it back before combining
    return prune_upper(upper_bounds(i) + (Poly.const(0),))


@lru_cache(maxsize=65536)
def upper_bounds(i: Index) -> tuple[Poly, ...]:
    """Polynomials whose pointwise maximum, together with 0, bounds ``i`` from above."""
    if isinstance(i, Const):
        return (Poly.const(i.value),)
    if isinstance(i, Var):
        return (Poly.var(i.name),)
    if isinstance(i, Plus):
        return _cap((a + b for a in _with_zero(i.left) for b in _with_zero(i.right)), True)
    if isinstance(i, Times):
        return _cap((a * b for a in _with_zero(i.left) for b in _with_zero(i.right)), True)
    if isinstance(i, Max):
        return _cap(upper_bounds(i.left) + upper_bounds(i.right), True)
    if isinstance(i, Monus):
        return _cap((a - b for a in _with_zero(i.left) for b in lower_bounds(i.right)), True)
    if isinstance(i, BoundedMax):
        out = []
        for p in upper_bounds(i.body):
            rest, pos, _ = p.split(i.binder)
            if not pos.terms:
                out.append(rest)
                continue
            for n in upper_bounds(i.bound):
                out.append(rest + pos.subst(i.binder, n - Poly.const(1)))
        return _cap(out, True)
    raise TypeError(f"not an index: {i!r}")


@lru_cache(maxsize=65536)
def lower_bounds(i: Index) -> tuple[Poly, ...]:
    """Polynomials each of which is pointwise at most ``i``."""
    zero = Poly.const(0)
    if isinstance(i, Const):
        return (Poly.const(i.value),)
    if isinstance(i, Var):
        return (Poly.var(i.name),)
    if isinstance(i, Plus):
        return _cap((a + b for a in lower_bounds(i.left) for b in lower_bounds(i.right)), False)
    if isinstance(i, Times):
        left = [a for a in lower_bounds(i.left) if a.is_nonneg()]
        right = [b for b in lower_bounds(i.right) if b.is_nonneg()]
        return _cap([zero] + [a * b for a in left for b in right], False)
    if isinstance(i, Max):
        return _cap(lower_bounds(i.left) + lower_bounds(i.right), False)
    if isinstance(i, Monus):
        subtrahend = upper_bounds(i.right)
        if len(subtrahend) != 1 or not subtrahend[0].is_nonneg():
            return (zero,)
        return _cap([zero] + [a - subtrahend[0] for a in lower_bounds(i.left)], False)
    if isinstance(i, BoundedMax):
        if not any(dominated(Poly.const(1), n) for n in lower_bounds(i.bound)):
            return (zero,)
        first = normalize(subst_index(i.body, i.binder, ZERO))
        last = normalize(subst_index(i.body, i.binder, Monus(i.bound, ONE)))
        return _cap([zero, *lower_bounds(first), *lower_bounds(last)], False)
    raise TypeError(f"not an index: {i!r}")


def _dominates(lhs: Index, rhs: Index) -> bool:
    lows = lower_bounds(rhs)
    return all(any(dominated(u, low) for low in lows) for u in upper_bounds(lhs))


@lru_cache(maxsize=65536)
def prove_leq(lhs: Index, rhs: Index, depth: int = SPLIT_DEPTH) -> bool:
    """Sound (incomplete) proof that lhs <= rhs for every assignment of naturals."""
    lhs, rhs = normalize(lhs), normalize(rhs)
    if lhs == rhs or lhs == ZERO:
        return True
    variables = sorted(free_vars(lhs) | free_vars(rhs))
    if not variables:
        return evaluate(lhs, {}) <= evaluate(rhs, {})
    if _dominates(lhs, rhs):
        return True
    if depth == 0:
        return False
    for v in variables:
        succ = Plus(Var(v), ONE)
        if prove_leq(subst_index(lhs, v, ZERO), subst_index(rhs, v, ZERO), depth - 1) and prove_leq(
            subst_index(lhs, v, succ), subst_index(rhs, v, succ), depth - 1
        ):
            return True
    return False


def _search_counterexample(ctx: tuple[str, ...], lhs: Index, rhs: Index, budget: int) -> dict | None:
    relevant = sorted(free_vars(lhs) | free_vars(rhs))
    if (budget + 1) ** len(relevant) > MAX_ENUMERATION:
        return None
    for values in itertools.product(range(budget + 1), repeat=len(relevant)):
        env = dict(zip(relevant, values))
        if evaluate(lhs, env) > evaluate(rhs, env):
            return {v: env.get(v, 0) for v in ctx} | env
    return None


def _require_well_formed(ctx: tuple[str, ...], *indices: Index) -> None:
    for i in indices:
        if not well_formed(ctx, i):
            missing = sorted(free_vars(i) - set(ctx))
            raise IllFormedIndex(f"index {format_index(i)} has variables outside the context: {missing}")


def check_leq(
    ctx: Iterable[str],
    lhs: Index,
    rhs: Index,
    budget: int = DEFAULT_BUDGET,
    solver: ExternalSolver | None = None,
) -> Verdict:
    ctx = tuple(ctx)
    _require_well_formed(ctx, lhs, rhs)
    if not (free_vars(lhs) | free_vars(rhs)):
        ok = evaluate(lhs, {}) <= evaluate(rhs, {})
        return Valid() if ok else Refuted({v: 0 for v in ctx})
    if prove_leq(lhs, rhs):
        return Valid()
    witness = _search_counterexample(ctx, lhs, rhs, budget)
    if witness is not None:
        return Refuted(witness)
    if solver is not None:
        answer = solver.decide(Goal(ctx, "<=", lhs, rhs))
        if isinstance(answer, Refuted) and verifies(lhs, rhs, answer.witness):
            return answer
        if isinstance(answer, Valid):
            return answer
    return Unknown(budget)


def check_eq(
    ctx: Iterable[str],
    lhs: Index,
    rhs: Index,
    budget: int = DEFAULT_BUDGET,
    solver: ExternalSolver | None = None,
) -> Verdict:
    forward = check_leq(ctx, lhs, rhs, budget, solver)
    if isinstance(forward, Refuted):
        return forward
    backward = check_leq(ctx, rhs, lhs, budget, solver)
    if isinstance(backward, Refuted):
        return backward
    if isinstance(forward, Valid) and isinstance(backward, Valid):
        return Valid()
    return Unknown(budget)


def check(ctx: Iterable[str], relation: str, lhs: Index, rhs: Index,
          budget: int = DEFAULT_BUDGET, solver: ExternalSolver | None = None) -> Verdict:
    if relation == "<=":
        return check_leq(ctx, lhs, rhs, budget, solver)
    if relation == "=":
        return check_eq(ctx, lhs, rhs, budget, solver)
    raise ValueError(f"unknown relation {relation!r}")


def verifies(lhs: Index, rhs: Index, witness: Mapping[str, int]) -> bool:
    """The witness falsifies lhs <= rhs."""
    return evaluate(lhs, witness) > evaluate(rhs, witness)


@lru_cache(maxsize=16384)
def simplify(ctx: tuple[str, ...], i: Index) -> Index:
    """A provably equal, usually smaller, index: normalize, then try polynomial candidates."""
    i = normalize(i)
    if isinstance(i, (Const, Var)):
        return i
    for candidate in upper_bounds(i):
        if not candidate.is_nonneg():
            continue
        guess = normalize(candidate.to_index())
        if guess != i and prove_leq(i, guess) and prove_leq(guess, i):
            return guess
    return i
