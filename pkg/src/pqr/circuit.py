"""Circuits as label contexts plus a sequence of gate applications, and their width."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from . import index as ix
from . import syntax as sx
from .syntax import BIT, QUBIT, UNIT


class CircuitError(Exception):
    def __init__(self, message: str, position: int | None = None):
        prefix = f"op {position}: " if position is not None else ""
        super().__init__(prefix + message)
        self.position = position


class LabelContext(Mapping):
    """Immutable, insertion-ordered map from label names to wire kinds."""

    __slots__ = ("_items", "_hash")

    def __init__(self, items: Iterable[tuple[str, str]] | Mapping[str, str] = ()):
        pairs = items.items() if isinstance(items, Mapping) else items
        data: dict[str, str] = {}
        for name, kind in pairs:
            if kind not in sx.WIRE_KINDS:
                raise CircuitError(f"label {name} has unknown kind {kind!r}")
            if name in data:
                raise CircuitError(f"label {name} declared twice")
            data[name] = kind
        self._items = data
        self._hash = None

    def __getitem__(self, key: str) -> str:
        return self._items[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._items.items()))
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, LabelContext):
            return self._items == other._items
        return NotImplemented

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}:{v}" for k, v in self._items.items())
        return f"{{{inner}}}"

    def union(self, other: Mapping[str, str]) -> LabelContext:
        clash = set(self) & set(other)
        if clash:
            raise CircuitError(f"label contexts overlap on {sorted(clash)}")
        return LabelContext(list(self.items()) + list(other.items()))

    def without(self, names: Iterable[str]) -> LabelContext:
        drop = set(names)
        return LabelContext((k, v) for k, v in self.items() if k not in drop)

    def restrict(self, names: Iterable[str]) -> LabelContext:
        return LabelContext((n, self[n]) for n in names)


EMPTY = LabelContext()


class LabelSupply:
    """Deterministic source of fresh labels ``l0, l1, ...``; owned by the caller."""

    def __init__(self, start: int = 0, prefix: str = "l"):
        self.counter = start
        self.prefix = prefix

    def fresh(self) -> str:
        name = f"{self.prefix}{self.counter}"
        self.counter += 1
        return name


# wire bundles


def bundle_labels(b: sx.Value) -> list[sx.Label]:
    if isinstance(b, sx.Label):
        return [b]
    if isinstance(b, (sx.UnitVal, sx.Nil)):
        return []
    if isinstance(b, sx.Pair):
        return bundle_labels(b.left) + bundle_labels(b.right)
    if isinstance(b, sx.Cons):
        return bundle_labels(b.head) + bundle_labels(b.tail)
    raise CircuitError(f"not a wire bundle: {b}")


def is_bundle(v: sx.Value) -> bool:
    try:
        bundle_labels(v)
    except CircuitError:
        return False
    return True


def _closed_eq(a: sx.Type, b: sx.Type) -> bool:
    """Equality of closed bundle types up to index evaluation."""
    if isinstance(a, sx.ListT) and isinstance(b, sx.ListT):
        return ix.evaluate(a.length, {}) == ix.evaluate(b.length, {}) and _closed_eq(a.element, b.element)
    if isinstance(a, sx.Tensor) and isinstance(b, sx.Tensor):
        return _closed_eq(a.left, b.left) and _closed_eq(a.right, b.right)
    return a == b


def _bundle_type(b: sx.Value, q: Mapping[str, str], element: sx.Type | None) -> sx.Type:
    if isinstance(b, sx.UnitVal):
        return UNIT
    if isinstance(b, sx.Label):
        if b.name not in q:
            raise CircuitError(f"label {b.name} is not available")
        if q[b.name] != b.kind:
            raise CircuitError(f"label {b.name} has kind {q[b.name]}, used as {b.kind}")
        return sx.WireT(b.kind)
    if isinstance(b, sx.Pair):
        return sx.Tensor(_bundle_type(b.left, q, _component(element, "left")), _bundle_type(b.right, q, _component(element, "right")))
    if isinstance(b, (sx.Nil, sx.Cons)):
        items = []
        while isinstance(b, sx.Cons):
            items.append(b.head)
            b = b.tail
        if not isinstance(b, sx.Nil):
            raise CircuitError("list bundle does not end in []")
        inner = element.element if isinstance(element, sx.ListT) else None
        types = [_bundle_type(x, q, inner) for x in items]
        if types:
            first = types[0]
            for t in types[1:]:
                if not _closed_eq(t, first):
                    raise CircuitError("list bundle elements have different types")
            elem = first
        elif inner is not None:
            elem = inner
        else:
            raise CircuitError("cannot determine the element type of an empty list bundle")
        return sx.ListT(ix.Const(len(items)), elem)
    raise CircuitError(f"not a wire bundle: {b}")


def _component(t: sx.Type | None, side: str) -> sx.Type | None:
    if isinstance(t, sx.Tensor):
        return getattr(t, side)
    return None


def wire_judgment(q: Mapping[str, str], b: sx.Value, expected: sx.Type | None = None) -> sx.Type:
    """Type of bundle ``b`` under ``q``; ``b`` must use every label of ``q`` exactly once.

    ``expected`` supplies element types for empty lists; when given, the result
    must also match it.
    """
    labels = [lab.name for lab in bundle_labels(b)]
    seen: set[str] = set()
    for name in labels:
        if name in seen:
            raise CircuitError(f"label {name} appears twice in a bundle")
        seen.add(name)
    extra = set(q) - seen
    if extra:
        raise CircuitError(f"labels {sorted(extra)} are not used by the bundle")
    t = _bundle_type(b, q, expected)
    if expected is not None and not _closed_eq(t, expected):
        raise CircuitError(f"bundle has type {t}, expected {expected}")
    return t


def bundle_context(b: sx.Value) -> LabelContext:
    return LabelContext((lab.name, lab.kind) for lab in bundle_labels(b))


# gates


@dataclass(frozen=True)
class GateDecl:
    name: str
    input_type: sx.Type
    output_type: sx.Type
    inits: int = field(init=False)

    def __post_init__(self) -> None:
        if not (sx.is_bundle_type(self.input_type) and sx.is_bundle_type(self.output_type)):
            raise CircuitError(f"gate {self.name} must map bundle types to bundle types")
        inits = _closed_wires(self.output_type) - _closed_wires(self.input_type)
        object.__setattr__(self, "inits", inits)


def _closed_wires(t: sx.Type) -> int:
    if isinstance(t, sx.WireT):
        return 1
    if isinstance(t, sx.Tensor):
        return _closed_wires(t.left) + _closed_wires(t.right)
    if isinstance(t, sx.ListT):
        return ix.evaluate(t.length, {}) * _closed_wires(t.element)
    return 0


def _registry() -> dict[str, GateDecl]:
    pair = sx.Tensor(QUBIT, QUBIT)
    gates = [
        GateDecl("H", QUBIT, QUBIT),
        GateDecl("CNOT", pair, pair),
        GateDecl("INIT0", UNIT, QUBIT),
        GateDecl("INIT1", UNIT, QUBIT),
        GateDecl("DISCARD", QUBIT, UNIT),
        GateDecl("MEAS", QUBIT, BIT),
        GateDecl("CINIT0", UNIT, BIT),
        GateDecl("CINIT1", UNIT, BIT),
        GateDecl("CDISCARD", BIT, UNIT),
    ]
    return {g.name: g for g in gates}


_GATES = _registry()


def gate_registry() -> dict[str, GateDecl]:
    return dict(_GATES)


def rotation_gate(n: int) -> GateDecl:
    """The controlled rotation R(n), one gate per natural ``n``."""
    if n < 0:
        raise CircuitError("rotation gates are indexed by naturals")
    pair = sx.Tensor(QUBIT, QUBIT)
    return GateDecl(f"R{n}", pair, pair)


# circuits


@dataclass(frozen=True)
class Op:
    gate: GateDecl
    consumed: sx.Value
    produced: sx.Value


@dataclass(frozen=True)
class Circuit:
    """An input label context followed by gate applications.

    ``outputs`` and ``width`` are derived by replay on construction unless
    supplied, and are excluded from equality.
    """

    inputs: LabelContext
    ops: tuple = ()
    outputs: LabelContext = field(default=None, compare=False, repr=False)
    width: int = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.outputs is None or self.width is None:
            out, width = _replay(self.inputs, self.ops)
            object.__setattr__(self, "outputs", out)
            object.__setattr__(self, "width", width)

    @property
    def outputs_count(self) -> int:
        return len(self.outputs)

    @property
    def discarded(self) -> int:
        return self.width - len(self.outputs)

    def labels(self) -> set[str]:
        names = set(self.inputs)
        for op in self.ops:
            names.update(lab.name for lab in bundle_labels(op.produced))
        return names


def _step(outputs: LabelContext, width: int, op: Op, position: int) -> tuple[LabelContext, int]:
    consumed = [lab.name for lab in bundle_labels(op.consumed)]
    missing = [n for n in consumed if n not in outputs]
    if missing:
        raise CircuitError(f"gate {op.gate.name} uses absent labels {missing}", position)
    if len(set(consumed)) != len(consumed):
        raise CircuitError(f"gate {op.gate.name} consumes a label twice", position)
    try:
        wire_judgment(outputs.restrict(consumed), op.consumed, op.gate.input_type)
    except CircuitError as err:
        raise CircuitError(f"gate {op.gate.name}: {err}", position) from None
    remaining = outputs.without(consumed)
    produced = bundle_context(op.produced) if _distinct(op.produced) else None
    if produced is None:
        raise CircuitError(f"gate {op.gate.name} produces a label twice", position)
    clash = set(produced) & set(remaining)
    if clash:
        raise CircuitError(f"gate {op.gate.name} produces labels {sorted(clash)} that are still live", position)
    try:
        wire_judgment(produced, op.produced, op.gate.output_type)
    except CircuitError as err:
        raise CircuitError(f"gate {op.gate.name}: {err}", position) from None
    discarded = width - len(outputs)
    width += max(0, op.gate.inits - discarded)
    return remaining.union(produced), width


def _distinct(b: sx.Value) -> bool:
    names = [lab.name for lab in bundle_labels(b)]
    return len(names) == len(set(names))


def _replay(inputs: LabelContext, ops: Iterable[Op]) -> tuple[LabelContext, int]:
    outputs, width = inputs, len(inputs)
    for k, op in enumerate(ops):
        outputs, width = _step(outputs, width, op, k)
    return outputs, width


def identity(q: Mapping[str, str]) -> Circuit:
    q = q if isinstance(q, LabelContext) else LabelContext(q)
    return Circuit(q, (), q, len(q))


def width(c: Circuit) -> int:
    return c.width


def outputs_count(c: Circuit) -> int:
    return len(c.outputs)


def typecheck_circuit(c: Circuit) -> tuple[LabelContext, LabelContext]:
    """Replay the operations, checking each one; returns (inputs, outputs)."""
    outputs, _ = _replay(c.inputs, c.ops)
    return c.inputs, outputs


def _extend(c: Circuit, op: Op) -> Circuit:
    outputs, w = _step(c.outputs, c.width, op, len(c.ops))
    return Circuit(c.inputs, c.ops + (op,), outputs, w)


def freshlabels(t: sx.Type, supply: LabelSupply) -> tuple[LabelContext, sx.Value]:
    """Fresh labels for a closed bundle type, in left-to-right order."""
    if sx.type_index_vars(t):
        raise CircuitError(f"cannot box a circuit family: {t} has free index variables")
    if not sx.is_bundle_type(t):
        raise CircuitError(f"{t} is not a bundle type")
    pairs: list[tuple[str, str]] = []

    def build(u: sx.Type) -> sx.Value:
        if isinstance(u, sx.UnitT):
            return sx.UnitVal()
        if isinstance(u, sx.WireT):
            name = supply.fresh()
            pairs.append((name, u.kind))
            return sx.Label(name, u.kind)
        if isinstance(u, sx.Tensor):
            left = build(u.left)
            return sx.Pair(left, build(u.right))
        if isinstance(u, sx.ListT):
            items = [build(u.element) for _ in range(ix.evaluate(u.length, {}))]
            out: sx.Value = sx.Nil()
            for item in reversed(items):
                out = sx.Cons(item, out)
            return out
        raise CircuitError(f"{u} is not a bundle type")

    bundle = build(t)
    return LabelContext(pairs), bundle


def apply_gate(c: Circuit, g: GateDecl, consumed: sx.Value, supply: LabelSupply) -> tuple[Circuit, sx.Value]:
    _, produced = freshlabels(g.output_type, supply)
    return _extend(c, Op(g, consumed, produced)), produced


@lru_cache(maxsize=256)
def gate_circuit(g: GateDecl) -> sx.BoxedCircuit:
    """The boxed single-gate circuit, with labels private to the literal."""
    local = LabelSupply(prefix="g")
    q, inp = freshlabels(g.input_type, local)
    c, out = apply_gate(identity(q), g, inp, local)
    return sx.BoxedCircuit(inp, c, out)


def concat(c: Circuit, d: Circuit) -> Circuit:
    """Append ``d`` after ``c``; ``d``'s inputs must be live outputs of ``c``
    and its other labels must be new to ``c``."""
    for name, kind in d.inputs.items():
        if c.outputs.get(name) != kind:
            raise CircuitError(f"label {name}:{kind} is not an output of the first circuit")
    shared = c.labels() & d.labels()
    if shared != set(d.inputs):
        raise CircuitError(f"circuits share labels {sorted(shared - set(d.inputs))} outside the interface")
    out = c
    for op in d.ops:
        out = _extend(out, op)
    return out


def rename_bundle(b: sx.Value, mapping: Mapping[str, str]) -> sx.Value:
    if isinstance(b, sx.Label):
        return sx.Label(mapping.get(b.name, b.name), b.kind)
    if isinstance(b, sx.Pair):
        return sx.Pair(rename_bundle(b.left, mapping), rename_bundle(b.right, mapping))
    if isinstance(b, sx.Cons):
        return sx.Cons(rename_bundle(b.head, mapping), rename_bundle(b.tail, mapping))
    return b


def rename(c: Circuit, mapping: Mapping[str, str]) -> Circuit:
    """Rename labels; the induced map on the circuit's labels must be injective."""
    labels = c.labels()
    image = [mapping.get(n, n) for n in labels]
    if len(set(image)) != len(image):
        raise CircuitError("label renaming is not injective")
    inputs = LabelContext((mapping.get(n, n), k) for n, k in c.inputs.items())
    ops = tuple(Op(op.gate, rename_bundle(op.consumed, mapping), rename_bundle(op.produced, mapping)) for op in c.ops)
    outputs = LabelContext((mapping.get(n, n), k) for n, k in c.outputs.items())
    return Circuit(inputs, ops, outputs, c.width)


def canonical(c: Circuit) -> Circuit:
    """Rename labels to ``c0, c1, ...`` in order of first appearance."""
    order = list(c.inputs)
    for op in c.ops:
        order.extend(lab.name for lab in bundle_labels(op.produced))
    staging = {name: f"\0{k}" for k, name in enumerate(order)}
    final = {f"\0{k}": f"c{k}" for k in range(len(order))}
    return rename(rename(c, staging), final)


def equivalent(c: Circuit, d: Circuit) -> bool:
    """Equal up to a renaming of labels."""
    return canonical(c) == canonical(d)


def append_boxed(c: Circuit, at: sx.Value, boxed: sx.BoxedCircuit, supply: LabelSupply) -> tuple[Circuit, sx.Value]:
    """Splice a boxed circuit onto the bundle ``at`` of ``c``'s outputs."""
    at_labels = bundle_labels(at)
    for lab in at_labels:
        if c.outputs.get(lab.name) != lab.kind:
            raise CircuitError(f"label {lab.name}:{lab.kind} is not a live output")
    at_ctx = c.outputs.restrict(dict.fromkeys(lab.name for lab in at_labels))
    d = boxed.circuit
    at_type = wire_judgment(at_ctx, at, None if at_labels else _shape_hint(boxed, d))
    in_type = wire_judgment(d.inputs, boxed.input, at_type)
    if not _closed_eq(at_type, in_type):
        raise CircuitError(f"cannot apply a circuit expecting {in_type} to {at_type}")
    mapping = {src.name: dst.name for src, dst in zip(bundle_labels(boxed.input), at_labels)}
    for op in d.ops:
        for lab in bundle_labels(op.produced):
            mapping[lab.name] = supply.fresh()
    renamed = rename(d, mapping)
    return concat(c, renamed), rename_bundle(boxed.output, mapping)


def _shape_hint(boxed: sx.BoxedCircuit, d: Circuit) -> sx.Type | None:
    try:
        return wire_judgment(d.inputs, boxed.input)
    except CircuitError:
        return None


def to_json(c: Circuit) -> dict:
    return {
        "inputs": dict(c.inputs),
        "ops": [
            {
                "gate": op.gate.name,
                "consumes": [lab.name for lab in bundle_labels(op.consumed)],
                "produces": [lab.name for lab in bundle_labels(op.produced)],
            }
            for op in c.ops
        ],
        "outputs": dict(c.outputs),
        "width": c.width,
    }
