"""Abstract syntax: types, values, terms and programs, plus substitution."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional, Union

from . import index as ix
from .index import Index

QUBIT_KIND = "Qubit"
BIT_KIND = "Bit"
WIRE_KINDS = (QUBIT_KIND, BIT_KIND)

Span = tuple  # (line, column)


# types


class Type:
    def __str__(self) -> str:
        from .printer import format_type

        return format_type(self)


@dataclass(frozen=True)
class UnitT(Type):
    pass


@dataclass(frozen=True)
class WireT(Type):
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in WIRE_KINDS:
            raise ValueError(f"unknown wire kind {self.kind!r}")


@dataclass(frozen=True)
class NatT(Type):
    pass


@dataclass(frozen=True)
class Bang(Type):
    inner: Type


@dataclass(frozen=True)
class Tensor(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class Arrow(Type):
    domain: Type
    codomain: Type
    width: Index
    capture: Index


@dataclass(frozen=True)
class ListT(Type):
    length: Index
    element: Type


@dataclass(frozen=True)
class Circ(Type):
    width: Index
    input: Type
    output: Type


UNIT = UnitT()
NAT = NatT()
QUBIT = WireT(QUBIT_KIND)
BIT = WireT(BIT_KIND)


def is_parameter(t: Type) -> bool:
    """Freely duplicable and discardable types."""
    if isinstance(t, (UnitT, NatT, Bang, Circ)):
        return True
    if isinstance(t, Tensor):
        return is_parameter(t.left) and is_parameter(t.right)
    if isinstance(t, ListT):
        return is_parameter(t.element)
    return False


def is_bundle_type(t: Type) -> bool:
    if isinstance(t, (UnitT, WireT)):
        return True
    if isinstance(t, Tensor):
        return is_bundle_type(t.left) and is_bundle_type(t.right)
    if isinstance(t, ListT):
        return is_bundle_type(t.element)
    return False


# values and terms


@dataclass(frozen=True)
class Node:
    span: Optional[Span] = field(default=None, compare=False, repr=False, kw_only=True)

    def __str__(self) -> str:
        from .printer import format_node

        return format_node(self)


class Value(Node):
    pass


class Term(Node):
    pass


@dataclass(frozen=True)
class UnitVal(Value):
    pass


@dataclass(frozen=True)
class Variable(Value):
    name: str


@dataclass(frozen=True)
class Label(Value):
    name: str
    kind: str


@dataclass(frozen=True)
class Lambda(Value):
    param: str
    annotation: Type
    body: Term


@dataclass(frozen=True)
class Lift(Value):
    body: Term


@dataclass(frozen=True)
class BoxedCircuit(Value):
    input: Value
    circuit: object  # circuit.Circuit
    output: Value


@dataclass(frozen=True)
class Pair(Value):
    left: Value
    right: Value


@dataclass(frozen=True)
class Nil(Value):
    pass


@dataclass(frozen=True)
class Cons(Value):
    head: Value
    tail: Value


@dataclass(frozen=True)
class Fold(Value):
    binder: str
    step: Value
    base: Value


@dataclass(frozen=True)
class NatLit(Value):
    value: int


@dataclass(frozen=True)
class Prim(Value):
    """A primitive from the gate library (a gate or ``makeRGate``)."""

    name: str


@dataclass(frozen=True)
class DefRef(Value):
    """Reference to an index-parameterized definition, instantiated at ``indices``."""

    name: str
    indices: tuple


@dataclass(frozen=True)
class App(Term):
    function: Value
    argument: Value


@dataclass(frozen=True)
class Dest(Term):
    left: str
    right: str
    pair: Value
    body: Term


@dataclass(frozen=True)
class Force(Term):
    value: Value


@dataclass(frozen=True)
class Box(Term):
    bundle_type: Type
    value: Value


@dataclass(frozen=True)
class Apply(Term):
    circuit: Value
    argument: Value


@dataclass(frozen=True)
class Return(Term):
    value: Value


@dataclass(frozen=True)
class Let(Term):
    name: str
    bound: Term
    body: Term


NAT_OPS = ("+", "-", "*")


@dataclass(frozen=True)
class NatOp(Term):
    op: str
    left: Value
    right: Value


Expr = Union[Term, Value]


@dataclass(frozen=True)
class Definition:
    name: str
    body: Expr
    params: tuple = ()
    annotation: Optional[Type] = None
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Program:
    index_params: tuple
    definitions: tuple

    @property
    def main(self) -> Optional[Definition]:
        for d in self.definitions:
            if d.name == "main":
                return d
        return None

    def lookup(self, name: str) -> Definition:
        for d in self.definitions:
            if d.name == name:
                return d
        raise KeyError(name)

    def __str__(self) -> str:
        from .printer import format_program

        return format_program(self)


# free variables


def _memo(key: str):
    """Cache a per-node result on the (immutable) node itself."""

    def wrap(fn):
        def inner(node):
            cached = node.__dict__.get(key)
            if cached is None:
                cached = fn(node)
                object.__setattr__(node, key, cached)
            return cached

        inner.__name__ = fn.__name__
        inner.__doc__ = fn.__doc__
        return inner

    return wrap


@_memo("_free_vars")
def free_term_vars(node: Expr) -> frozenset[str]:
    if isinstance(node, Variable):
        return frozenset((node.name,))
    if isinstance(node, Lambda):
        return free_term_vars(node.body) - {node.param}
    if isinstance(node, Let):
        return free_term_vars(node.bound) | (free_term_vars(node.body) - {node.name})
    if isinstance(node, Dest):
        return free_term_vars(node.pair) | (free_term_vars(node.body) - {node.left, node.right})
    out: frozenset[str] = frozenset()
    for child in _children(node):
        out |= free_term_vars(child)
    return out


def _children(node: Expr) -> tuple:
    if isinstance(node, (Lift,)):
        return (node.body,)
    if isinstance(node, (Pair,)):
        return (node.left, node.right)
    if isinstance(node, Cons):
        return (node.head, node.tail)
    if isinstance(node, Fold):
        return (node.step, node.base)
    if isinstance(node, BoxedCircuit):
        return (node.input, node.output)
    if isinstance(node, App):
        return (node.function, node.argument)
    if isinstance(node, (Force, Box, Return)):
        return (node.value,)
    if isinstance(node, Apply):
        return (node.circuit, node.argument)
    if isinstance(node, NatOp):
        return (node.left, node.right)
    if isinstance(node, Lambda):
        return (node.body,)
    if isinstance(node, Let):
        return (node.bound, node.body)
    if isinstance(node, Dest):
        return (node.pair, node.body)
    return ()


def bound_names(node: Expr) -> frozenset[str]:
    """Every term variable name occurring anywhere, free or bound."""
    out: set[str] = set()

    def walk(n: Expr) -> None:
        if isinstance(n, Variable):
            out.add(n.name)
        elif isinstance(n, Lambda):
            out.add(n.param)
        elif isinstance(n, Let):
            out.add(n.name)
        elif isinstance(n, Dest):
            out.update((n.left, n.right))
        for c in _children(n):
            walk(c)

    walk(node)
    return frozenset(out)


def labels_in(v: Expr) -> list[Label]:
    """Labels occurring free in a value or term (boxed circuits are closed)."""
    if isinstance(v, Label):
        return [v]
    if isinstance(v, BoxedCircuit):
        return []
    out: list[Label] = []
    for c in _children(v):
        out.extend(labels_in(c))
    return out


def type_index_vars(t: Type) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for i in _type_indices(t):
        out |= ix.free_vars(i)
    for c in _type_children(t):
        out |= type_index_vars(c)
    return out


def _type_indices(t: Type) -> tuple:
    if isinstance(t, Arrow):
        return (t.width, t.capture)
    if isinstance(t, (ListT, Circ)):
        return (t.length,) if isinstance(t, ListT) else (t.width,)
    return ()


def _type_children(t: Type) -> tuple:
    if isinstance(t, Bang):
        return (t.inner,)
    if isinstance(t, Tensor):
        return (t.left, t.right)
    if isinstance(t, Arrow):
        return (t.domain, t.codomain)
    if isinstance(t, ListT):
        return (t.element,)
    if isinstance(t, Circ):
        return (t.input, t.output)
    return ()


def index_vars(node: Expr | Type) -> frozenset[str]:
    """Free index variables of a type, value or term."""
    if isinstance(node, Type):
        return type_index_vars(node)
    return _node_index_vars(node)


@_memo("_index_vars")
def _node_index_vars(node: Expr) -> frozenset[str]:
    if isinstance(node, Fold):
        return (index_vars(node.step) - {node.binder}) | index_vars(node.base)
    out: frozenset[str] = frozenset()
    if isinstance(node, Lambda):
        out |= type_index_vars(node.annotation)
    elif isinstance(node, Box):
        out |= type_index_vars(node.bundle_type)
    elif isinstance(node, DefRef):
        for i in node.indices:
            out |= ix.free_vars(i)
    for c in _children(node):
        out |= _node_index_vars(c)
    return out


# substitution


def map_type_indices(t: Type, f: Callable[[Index], Index]) -> Type:
    if isinstance(t, (UnitT, WireT, NatT)):
        return t
    if isinstance(t, Bang):
        return Bang(map_type_indices(t.inner, f))
    if isinstance(t, Tensor):
        return Tensor(map_type_indices(t.left, f), map_type_indices(t.right, f))
    if isinstance(t, Arrow):
        return Arrow(map_type_indices(t.domain, f), map_type_indices(t.codomain, f), f(t.width), f(t.capture))
    if isinstance(t, ListT):
        return ListT(f(t.length), map_type_indices(t.element, f))
    if isinstance(t, Circ):
        return Circ(f(t.width), map_type_indices(t.input, f), map_type_indices(t.output, f))
    raise TypeError(f"not a type: {t!r}")


def subst_type_index(t: Type, var: str, rep: Index) -> Type:
    if var not in type_index_vars(t):
        return t
    return map_type_indices(t, lambda i: ix.subst_index(i, var, rep))


def fresh_var(base: str, avoid: Iterable[str]) -> str:
    return ix.fresh_name(base, avoid)


def subst_value(target: Expr, var: str, replacement: Value) -> Expr:
    """Capture-avoiding substitution of ``replacement`` for the term variable ``var``."""
    if var not in free_term_vars(target):
        return target
    return _subst_v(target, var, replacement, free_term_vars(replacement))


def _subst_v(n: Expr, var: str, rep: Value, rep_fv: frozenset[str]) -> Expr:
    if var not in free_term_vars(n):
        return n
    if isinstance(n, Variable):
        return rep
    if isinstance(n, Lambda):
        param, body = _avoid_capture(n.param, n.body, rep_fv, var)
        return replace(n, param=param, body=_subst_v(body, var, rep, rep_fv))
    if isinstance(n, Let):
        bound = _subst_v(n.bound, var, rep, rep_fv)
        if n.name == var:
            return replace(n, bound=bound)
        name, body = _avoid_capture(n.name, n.body, rep_fv, var)
        return replace(n, bound=bound, name=name, body=_subst_v(body, var, rep, rep_fv))
    if isinstance(n, Dest):
        pair = _subst_v(n.pair, var, rep, rep_fv)
        if var in (n.left, n.right):
            return replace(n, pair=pair)
        left, body = _avoid_capture(n.left, n.body, rep_fv | {n.right}, var)
        right, body = _avoid_capture(n.right, body, rep_fv | {left}, var)
        return replace(n, pair=pair, left=left, right=right, body=_subst_v(body, var, rep, rep_fv))
    return _rebuild(n, lambda c: _subst_v(c, var, rep, rep_fv))


def _avoid_capture(name: str, body: Expr, rep_fv: frozenset[str], var: str) -> tuple[str, Expr]:
    if name not in rep_fv:
        return name, body
    new = fresh_var(name, rep_fv | free_term_vars(body) | bound_names(body) | {var})
    return new, _subst_v(body, name, Variable(new), frozenset((new,)))


def _rebuild(n: Expr, f: Callable[[Expr], Expr]) -> Expr:
    if isinstance(n, Lift):
        return replace(n, body=f(n.body))
    if isinstance(n, Pair):
        return replace(n, left=f(n.left), right=f(n.right))
    if isinstance(n, Cons):
        return replace(n, head=f(n.head), tail=f(n.tail))
    if isinstance(n, Fold):
        return replace(n, step=f(n.step), base=f(n.base))
    if isinstance(n, BoxedCircuit):
        return n
    if isinstance(n, App):
        return replace(n, function=f(n.function), argument=f(n.argument))
    if isinstance(n, (Force, Box, Return)):
        return replace(n, value=f(n.value))
    if isinstance(n, Apply):
        return replace(n, circuit=f(n.circuit), argument=f(n.argument))
    if isinstance(n, NatOp):
        return replace(n, left=f(n.left), right=f(n.right))
    return n


def subst_index_syntax(target: Expr | Type, var: str, replacement: Index) -> Expr | Type:
    """Substitute an index for an index variable everywhere; renames clashing fold binders."""
    if isinstance(target, Type):
        return subst_type_index(target, var, replacement)
    if var not in index_vars(target):
        return target
    return _subst_i(target, var, replacement, ix.free_vars(replacement))


def _subst_i(n: Expr, var: str, rep: Index, rep_fv: frozenset[str]) -> Expr:
    if var not in index_vars(n):
        return n
    if isinstance(n, Fold):
        base = _subst_i(n.base, var, rep, rep_fv)
        if n.binder == var:
            return replace(n, base=base)
        binder, step = n.binder, n.step
        if binder in rep_fv:
            new = ix.fresh_name(binder, rep_fv | index_vars(step) | all_index_names(step) | {var})
            step = _subst_i(step, binder, ix.Var(new), frozenset((new,)))
            binder = new
        return replace(n, binder=binder, step=_subst_i(step, var, rep, rep_fv), base=base)
    if isinstance(n, Lambda):
        return replace(n, annotation=subst_type_index(n.annotation, var, rep), body=_subst_i(n.body, var, rep, rep_fv))
    if isinstance(n, Box):
        return replace(n, bundle_type=subst_type_index(n.bundle_type, var, rep), value=_subst_i(n.value, var, rep, rep_fv))
    if isinstance(n, DefRef):
        return replace(n, indices=tuple(ix.subst_index(i, var, rep) for i in n.indices))
    if isinstance(n, Let):
        return replace(n, bound=_subst_i(n.bound, var, rep, rep_fv), body=_subst_i(n.body, var, rep, rep_fv))
    if isinstance(n, Dest):
        return replace(n, pair=_subst_i(n.pair, var, rep, rep_fv), body=_subst_i(n.body, var, rep, rep_fv))
    return _rebuild(n, lambda c: _subst_i(c, var, rep, rep_fv))


def all_index_names(node: Expr) -> frozenset[str]:
    """Every index variable name mentioned, including binders."""
    out: set[str] = set(index_vars(node))

    def walk(n: Expr) -> None:
        if isinstance(n, Fold):
            out.add(n.binder)
            out.update(index_vars(n.step))
        for c in _children(n):
            walk(c)

    walk(node)
    return frozenset(out)


def subst_indices(target: Expr | Type, mapping: dict) -> Expr | Type:
    """Simultaneous index substitution through fresh intermediate names."""
    if not mapping:
        return target
    taken = set(mapping)
    for rep in mapping.values():
        taken |= ix.free_vars(rep)
    taken |= index_vars(target) if not isinstance(target, Type) else type_index_vars(target)
    temps = {}
    for name in mapping:
        temp = ix.fresh_name(name + "_", taken)
        taken.add(temp)
        temps[name] = temp
        target = subst_index_syntax(target, name, ix.Var(temp))
    for name, rep in mapping.items():
        target = subst_index_syntax(target, temps[name], rep)
    return target
