"""Index terms: arithmetic over naturals used to annotate types with sizes and widths."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping


class Index:
    """Base class of index terms."""

    def __str__(self) -> str:
        return format_index(self)


@dataclass(frozen=True)
class Const(Index):
    value: int

    def __post_init__(self) -> None:
        if not isinstance(self.value, int) or self.value < 0:
            raise ValueError(f"index constants are naturals, got {self.value!r}")


@dataclass(frozen=True)
class Var(Index):
    name: str


@dataclass(frozen=True)
class Plus(Index):
    left: Index
    right: Index


@dataclass(frozen=True)
class Monus(Index):
    """Truncated subtraction: never goes below zero."""

    left: Index
    right: Index


@dataclass(frozen=True)
class Times(Index):
    left: Index
    right: Index


@dataclass(frozen=True)
class Max(Index):
    left: Index
    right: Index


@dataclass(frozen=True)
class BoundedMax(Index):
    """Maximum of ``body`` for ``binder`` ranging over 0 .. bound-1 (0 when empty)."""

    binder: str
    bound: Index
    body: Index


ZERO = Const(0)
ONE = Const(1)


class IllFormedIndex(Exception):
    """Raised on ill-formed indices (unbound variables)."""


def index_ctx(names: Iterable[str]) -> tuple[str, ...]:
    ctx = tuple(names)
    if len(set(ctx)) != len(ctx):
        raise ValueError(f"duplicate index variable in context {ctx}")
    return ctx


def free_vars(i: Index) -> frozenset[str]:
    if isinstance(i, Const):
        return frozenset()
    if isinstance(i, Var):
        return frozenset((i.name,))
    if isinstance(i, BoundedMax):
        return free_vars(i.bound) | (free_vars(i.body) - {i.binder})
    return free_vars(i.left) | free_vars(i.right)


def well_formed(ctx: Iterable[str], i: Index) -> bool:
    return free_vars(i) <= set(ctx)


def evaluate(i: Index, env: Mapping[str, int]) -> int:
    if isinstance(i, Const):
        return i.value
    if isinstance(i, Var):
        try:
            return env[i.name]
        except KeyError:
            raise IllFormedIndex(f"unbound index variable {i.name!r}") from None
    if isinstance(i, Plus):
        return evaluate(i.left, env) + evaluate(i.right, env)
    if isinstance(i, Monus):
        return max(0, evaluate(i.left, env) - evaluate(i.right, env))
    if isinstance(i, Times):
        left = evaluate(i.left, env)
        return 0 if left == 0 else left * evaluate(i.right, env)
    if isinstance(i, Max):
        return max(evaluate(i.left, env), evaluate(i.right, env))
    if isinstance(i, BoundedMax):
        bound = evaluate(i.bound, env)
        inner = dict(env)
        best = 0
        for k in range(bound):
            inner[i.binder] = k
            best = max(best, evaluate(i.body, inner))
        return best
    raise TypeError(f"not an index: {i!r}")


def interpret(ctx: Iterable[str], i: Index, env: Mapping[str, int]) -> int:
    """Value of ``i`` under ``env``; ``i`` must be well formed in ``ctx``."""
    ctx = tuple(ctx)
    if not well_formed(ctx, i):
        missing = sorted(free_vars(i) - set(ctx))
        raise IllFormedIndex(f"index {i} mentions variables outside the context: {missing}")
    absent = [v for v in ctx if v not in env]
    if absent:
        raise IllFormedIndex(f"no value given for index variables {absent}")
    return evaluate(i, env)


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    stem = base.rstrip("'")
    candidate = stem + "'"
    while candidate in avoid:
        candidate += "'"
    return candidate


def subst_index(target: Index, var: str, replacement: Index) -> Index:
    """Capture-avoiding substitution of ``replacement`` for ``var``."""
    if var not in free_vars(target):
        return target
    return _subst(target, var, replacement, free_vars(replacement))


def _subst(t: Index, var: str, rep: Index, rep_fv: frozenset[str]) -> Index:
    if isinstance(t, Const):
        return t
    if isinstance(t, Var):
        return rep if t.name == var else t
    if isinstance(t, BoundedMax):
        bound = _subst(t.bound, var, rep, rep_fv)
        if t.binder == var:
            return BoundedMax(t.binder, bound, t.body)
        binder, body = t.binder, t.body
        if binder in rep_fv and var in free_vars(body):
            new = fresh_name(binder, rep_fv | free_vars(body) | {var})
            body = _subst(body, binder, Var(new), frozenset((new,)))
            binder = new
        return BoundedMax(binder, bound, _subst(body, var, rep, rep_fv))
    return type(t)(_subst(t.left, var, rep, rep_fv), _subst(t.right, var, rep, rep_fv))


def subst_many(target: Index, mapping: Mapping[str, Index]) -> Index:
    """Simultaneous substitution, via fresh intermediate names."""
    if not mapping:
        return target
    taken = set(free_vars(target))
    for rep in mapping.values():
        taken |= free_vars(rep)
    temps = {}
    for name in mapping:
        temp = fresh_name(name + "_", taken)
        taken.add(temp)
        temps[name] = temp
        target = subst_index(target, name, Var(temp))
    for name, rep in mapping.items():
        target = subst_index(target, temps[name], rep)
    return target


def plus(*terms: Index) -> Index:
    """Left-nested sum, dropping zero constants."""
    out: Index | None = None
    for t in terms:
        if t == ZERO:
            continue
        out = t if out is None else Plus(out, t)
    return ZERO if out is None else out


def maximum(*terms: Index) -> Index:
    out: Index | None = None
    for t in terms:
        if out is None:
            out = t
        elif t != out:
            out = Max(out, t)
    return ZERO if out is None else out


# printing

_SUM, _PROD, _ATOM = 1, 2, 3


def format_index(i: Index) -> str:
    return _fmt(i, 0)


def _fmt(i: Index, level: int) -> str:
    if isinstance(i, Const):
        return str(i.value)
    if isinstance(i, Var):
        return i.name
    if isinstance(i, Max):
        return f"max({_fmt(i.left, 0)}, {_fmt(i.right, 0)})"
    if isinstance(i, BoundedMax):
        text = f"max[{i.binder} < {_fmt(i.bound, 0)}] {_fmt(i.body, 0)}"
        return text if level == 0 else f"({text})"
    if isinstance(i, (Plus, Monus)):
        op = "+" if isinstance(i, Plus) else "-"
        text = f"{_fmt(i.left, _SUM)} {op} {_fmt(i.right, _PROD)}"
        return text if level <= _SUM else f"({text})"
    if isinstance(i, Times):
        text = f"{_fmt(i.left, _PROD)} * {_fmt(i.right, _ATOM)}"
        return text if level <= _PROD else f"({text})"
    raise TypeError(f"not an index: {i!r}")
