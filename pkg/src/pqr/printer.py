"""Pretty-printer producing text the parser reads back to the same tree."""

from __future__ import annotations

from . import index as ix
from . import syntax as sx


def format_type(t: sx.Type) -> str:
    if isinstance(t, sx.Arrow):
        return f"{_tensor(t.domain)} -o[{ix.format_index(t.width)},{ix.format_index(t.capture)}] {format_type(t.codomain)}"
    return _tensor(t)


def _tensor(t: sx.Type) -> str:
    if isinstance(t, sx.Tensor):
        return f"{_tensor(t.left)} * {_prefix(t.right)}"
    return _prefix(t)


def _prefix(t: sx.Type) -> str:
    if isinstance(t, sx.UnitT):
        return "Unit"
    if isinstance(t, sx.NatT):
        return "Nat"
    if isinstance(t, sx.WireT):
        return t.kind
    if isinstance(t, sx.Bang):
        return f"!{_prefix(t.inner)}"
    if isinstance(t, sx.ListT):
        return f"List[{ix.format_index(t.length)}] {_prefix(t.element)}"
    if isinstance(t, sx.Circ):
        return f"Circ[{ix.format_index(t.width)}]({format_type(t.input)}, {format_type(t.output)})"
    return f"({format_type(t)})"


def format_node(n: sx.Expr) -> str:
    return _expr(n)


def _expr(n: sx.Expr) -> str:
    if isinstance(n, sx.Let):
        return f"let {n.name} = {_expr(n.bound)} in {_expr(n.body)}"
    if isinstance(n, sx.Dest):
        return f"let ({n.left}, {n.right}) = {_value(n.pair)} in {_expr(n.body)}"
    if isinstance(n, sx.Return):
        return f"return {_value(n.value)}"
    if isinstance(n, sx.Force):
        return f"force {_atom(n.value)}"
    if isinstance(n, sx.Box):
        return f"box[{format_type(n.bundle_type)}] {_atom(n.value)}"
    if isinstance(n, sx.Apply):
        return f"apply({_value(n.circuit)}, {_value(n.argument)})"
    if isinstance(n, sx.App):
        return f"{_operand(n.function, closed=True)} {_atom(n.argument)}"
    if isinstance(n, sx.NatOp):
        return f"{_operand(n.left, closed=True)} {n.op} {_operand(n.right, closed=True)}"
    return _value(n)


def _value(v: sx.Value) -> str:
    if isinstance(v, sx.Cons):
        return f"{_operand(v.head, closed=True)} : {_value(v.tail)}"
    return _operand(v, closed=False)


def _operand(v: sx.Value, closed: bool) -> str:
    """``closed``: text follows, so right-extending forms need parentheses."""
    if isinstance(v, sx.Fold):
        text = f"fold[{v.binder}] {_atom(v.step)} {_atom(v.base)}"
        return f"({text})" if closed else text
    if isinstance(v, sx.Lambda):
        text = f"\\{v.param} :: {format_type(v.annotation)} . {_expr(v.body)}"
        return f"({text})" if closed else text
    if isinstance(v, sx.Lift):
        text = f"lift {_expr(v.body)}"
        return f"({text})" if closed else text
    return _atom(v)


def _atom(v: sx.Expr) -> str:
    if isinstance(v, sx.Variable):
        return v.name
    if isinstance(v, sx.DefRef):
        return f"{v.name}[{', '.join(ix.format_index(i) for i in v.indices)}]"
    if isinstance(v, sx.NatLit):
        return str(v.value)
    if isinstance(v, sx.UnitVal):
        return "()"
    if isinstance(v, sx.Nil):
        return "[]"
    if isinstance(v, sx.Prim):
        return v.name
    if isinstance(v, sx.Pair):
        return f"({_value(v.left)}, {_value(v.right)})"
    if isinstance(v, sx.Label):
        return f"<{v.name}:{v.kind}>"
    if isinstance(v, sx.BoxedCircuit):
        ops = len(v.circuit.ops)
        return f"<box {_value(v.input)} => {_value(v.output)}, {ops} ops>"
    return f"({_expr(v)})"


def format_definition(d: sx.Definition) -> str:
    params = f"[{', '.join(d.params)}]" if d.params else ""
    annotation = f" : {format_type(d.annotation)}" if d.annotation is not None else ""
    return f"def {d.name}{params}{annotation} =\n  {_layout(d.body, 2)};"


def _layout(n: sx.Expr, indent: int) -> str:
    """Like ``_expr`` but one binding per line; whitespace is insignificant to the parser."""
    pad = "\n" + " " * indent
    if isinstance(n, sx.Let):
        return f"let {n.name} = {_expr(n.bound)} in{pad}{_layout(n.body, indent)}"
    if isinstance(n, sx.Dest):
        return f"let ({n.left}, {n.right}) = {_value(n.pair)} in{pad}{_layout(n.body, indent)}"
    if isinstance(n, sx.Lambda):
        return f"\\{n.param} :: {format_type(n.annotation)} .{pad}  {_layout(n.body, indent + 2)}"
    if isinstance(n, sx.Lift):
        return f"lift {_layout(n.body, indent)}"
    if isinstance(n, sx.Return) and isinstance(n.value, (sx.Lambda, sx.Lift)):
        return f"return {_layout(n.value, indent)}"
    return _expr(n)


def format_program(p: sx.Program) -> str:
    parts = []
    if p.index_params:
        parts.append(f"forall {' '.join(p.index_params)}.")
    parts.extend(format_definition(d) for d in p.definitions)
    return "\n\n".join(parts) + "\n"


def pretty(node) -> str:
    """Print any syntax tree: program, definition, type, index, term or value."""
    if isinstance(node, sx.Program):
        return format_program(node)
    if isinstance(node, sx.Definition):
        return format_definition(node)
    if isinstance(node, sx.Type):
        return format_type(node)
    if isinstance(node, ix.Index):
        return ix.format_index(node)
    return format_node(node)
