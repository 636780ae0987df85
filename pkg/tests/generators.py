"""Seeded random generators shared by the property tests and the acceptance run."""

from __future__ import annotations

import random

from pqr import circuit as cc
from pqr import index as ix
from pqr import syntax as sx
from pqr.circuit import LabelContext, LabelSupply

# circuits

_GATES = cc.gate_registry()


def random_circuit(rng: random.Random, inputs: LabelContext, supply: LabelSupply, n_ops: int) -> cc.Circuit:
    """A well-typed circuit over ``inputs`` built from random gate applications."""
    c = cc.identity(inputs)
    for _ in range(n_ops):
        qubits = [n for n, k in c.outputs.items() if k == "Qubit"]
        bits = [n for n, k in c.outputs.items() if k == "Bit"]
        choices = ["INIT0", "INIT1", "CINIT0"]
        if qubits:
            choices += ["H", "DISCARD", "MEAS"]
        if len(qubits) >= 2:
            choices += ["CNOT", "ROT"]
        if bits:
            choices += ["CDISCARD"]
        name = rng.choice(choices)
        if name == "ROT":
            gate = cc.rotation_gate(rng.randint(1, 4))
        else:
            gate = _GATES[name]
        if name in ("CNOT", "ROT"):
            a, b = rng.sample(qubits, 2)
            arg = sx.Pair(sx.Label(a, "Qubit"), sx.Label(b, "Qubit"))
        elif name in ("H", "DISCARD", "MEAS"):
            arg = sx.Label(rng.choice(qubits), "Qubit")
        elif name == "CDISCARD":
            arg = sx.Label(rng.choice(bits), "Bit")
        else:
            arg = sx.UnitVal()
        c, _ = cc.apply_gate(c, gate, arg, supply)
    return c


def random_inputs(rng: random.Random, supply: LabelSupply, most: int = 4) -> LabelContext:
    return LabelContext((supply.fresh(), rng.choice(("Qubit", "Qubit", "Bit"))) for _ in range(rng.randint(0, most)))


def circuit_pair(rng: random.Random):
    """C : Q -> (L, H) and D : H -> K sharing exactly the labels of H."""
    supply = LabelSupply()
    q = random_inputs(rng, supply)
    c = random_circuit(rng, q, supply, rng.randint(0, 8))
    outs = list(c.outputs.items())
    rng.shuffle(outs)
    cut = rng.randint(0, len(outs))
    handed = LabelContext(outs[:cut])
    kept = c.outputs.without(handed)
    d = random_circuit(rng, handed, supply, rng.randint(0, 8))
    return q, c, kept, handed, d


# indices


def random_index(rng: random.Random, names: tuple[str, ...], depth: int = 3, bound: tuple = (),
                 nesting: int = 2) -> ix.Index:
    """A random well-formed index; bounded maxima have shallow bounds and nest at most ``nesting`` deep,
    which keeps exhaustive interpretation cheap."""
    scope = names + bound
    if depth == 0 or rng.random() < 0.25:
        if scope and rng.random() < 0.6:
            return ix.Var(rng.choice(scope))
        return ix.Const(rng.randint(0, 4))
    kinds = ("plus", "monus", "times", "max", "plus", "max") + (("bmax",) if nesting else ())
    kind = rng.choice(kinds)
    sub = lambda: random_index(rng, names, depth - 1, bound, nesting)
    if kind == "plus":
        return ix.Plus(sub(), sub())
    if kind == "monus":
        return ix.Monus(sub(), sub())
    if kind == "times":
        return ix.Times(sub(), sub())
    if kind == "max":
        return ix.Max(sub(), sub())
    binder = ix.fresh_name("b", set(scope))
    length = random_index(rng, names, 1, bound, 0)
    body = random_index(rng, names, depth - 1, bound + (binder,), nesting - 1)
    return ix.BoundedMax(binder, length, body)


# syntax trees for the round trip

_IDENTS = ("x", "y", "qs", "acc", "n", "c")
_INDEX_VARS = ("i", "j", "k")


def random_type(rng: random.Random, depth: int = 2) -> sx.Type:
    if depth == 0 or rng.random() < 0.3:
        return rng.choice((sx.UNIT, sx.NAT, sx.QUBIT, sx.BIT))
    kind = rng.choice(("bang", "tensor", "arrow", "list", "circ"))
    sub = lambda: random_type(rng, depth - 1)
    idx = lambda: random_index(rng, _INDEX_VARS, 2)
    if kind == "bang":
        return sx.Bang(sub())
    if kind == "tensor":
        return sx.Tensor(sub(), sub())
    if kind == "arrow":
        return sx.Arrow(sub(), sub(), idx(), idx())
    if kind == "list":
        return sx.ListT(idx(), sub())
    return sx.Circ(idx(), sub(), sub())


def random_value(rng: random.Random, depth: int = 3) -> sx.Value:
    if depth == 0 or rng.random() < 0.25:
        kind = rng.choice(("var", "unit", "nil", "nat", "prim", "ref"))
        if kind == "var":
            return sx.Variable(rng.choice(_IDENTS))
        if kind == "unit":
            return sx.UnitVal()
        if kind == "nil":
            return sx.Nil()
        if kind == "nat":
            return sx.NatLit(rng.randint(0, 9))
        if kind == "prim":
            return sx.Prim(rng.choice(("H", "CNOT", "INIT0", "DISCARD", "makeRGate")))
        return sx.DefRef("rev", (random_index(rng, _INDEX_VARS, 1),))
    kind = rng.choice(("lam", "lift", "pair", "cons", "fold"))
    if kind == "lam":
        return sx.Lambda(rng.choice(_IDENTS), random_type(rng), random_term(rng, depth - 1))
    if kind == "lift":
        return sx.Lift(random_term(rng, depth - 1))
    if kind == "pair":
        return sx.Pair(random_value(rng, depth - 1), random_value(rng, depth - 1))
    if kind == "cons":
        return sx.Cons(random_value(rng, depth - 1), random_value(rng, depth - 1))
    return sx.Fold(rng.choice(_INDEX_VARS), random_value(rng, depth - 1), random_value(rng, depth - 1))


def random_term(rng: random.Random, depth: int = 3) -> sx.Term:
    v = lambda: random_value(rng, depth - 1)
    kind = rng.choice(("ret", "let", "dest", "app", "force", "box", "apply", "natop"))
    if depth == 0 or kind == "ret":
        return sx.Return(random_value(rng, max(depth - 1, 0)))
    if kind == "let":
        return sx.Let(rng.choice(_IDENTS), random_term(rng, depth - 1), random_term(rng, depth - 1))
    if kind == "dest":
        a, b = rng.sample(_IDENTS, 2)
        return sx.Dest(a, b, v(), random_term(rng, depth - 1))
    if kind == "app":
        return sx.App(v(), v())
    if kind == "force":
        return sx.Force(v())
    if kind == "box":
        return sx.Box(random_type(rng, 1), v())
    if kind == "apply":
        return sx.Apply(v(), v())
    return sx.NatOp(rng.choice(sx.NAT_OPS), v(), v())


# well-typed programs


class _Env:
    """Live linear variables: name -> "Qubit" | "Bit" | ("List", length text)."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.live: dict[str, object] = {}
        self.counter = 0

    def fresh(self, base: str = "v") -> str:
        self.counter += 1
        return f"{base}{self.counter}"

    def of(self, kind) -> list[str]:
        if kind == "List":
            return [n for n, k in self.live.items() if isinstance(k, tuple)]
        return [n for n, k in self.live.items() if k == kind]

    def take(self, kind) -> str:
        name = self.rng.choice(self.of(kind))
        del self.live[name]
        return name


def _gate_block(rng: random.Random, env: _Env, names: list[str], steps: int) -> tuple[list[str], list[str]]:
    """A let chain of qubit gates over ``names``; returns (lines, final names)."""
    lines: list[str] = []
    names = list(names)
    for _ in range(steps):
        kind = rng.choice(("H", "CNOT", "ancilla", "H"))
        if kind == "CNOT" and len(names) >= 2:
            a, b = rng.sample(range(len(names)), 2)
            x, y = env.fresh("w"), env.fresh("w")
            lines.append(f"let ({x}, {y}) = apply(CNOT, ({names[a]}, {names[b]})) in")
            names[a], names[b] = x, y
        elif kind == "ancilla" and names:
            a = rng.randrange(len(names))
            anc, x, y, u = env.fresh("a"), env.fresh("w"), env.fresh("w"), env.fresh("u")
            lines.append(f"let {anc} = apply({rng.choice(('INIT0', 'INIT1'))}, ()) in")
            lines.append(f"let ({x}, {y}) = apply(CNOT, ({names[a]}, {anc})) in")
            lines.append(f"let {u} = apply(DISCARD, {y}) in")
            names[a] = x
        elif names:
            a = rng.randrange(len(names))
            x = env.fresh("w")
            lines.append(f"let {x} = apply(H, {names[a]}) in")
            names[a] = x
    return lines, names


def _op(rng: random.Random, env: _Env) -> list[str]:
    qubits, bits, lists = env.of("Qubit"), env.of("Bit"), env.of("List")
    options = ["init"]
    if qubits:
        options += ["h", "discard", "meas", "lambda", "lift"]
    if len(qubits) >= 2:
        options += ["cnot", "box", "rot"]
    if bits:
        options += ["cdiscard"]
    if qubits and lists:
        options += ["cons", "capture"]
    if lists:
        options += ["map", "ancillas", "drain"]
    kind = rng.choice(options)
    out = env.fresh()
    if kind == "init":
        gate = rng.choice(("INIT0", "INIT1", "CINIT0"))
        env.live[out] = "Bit" if gate.startswith("C") else "Qubit"
        return [f"let {out} = apply({gate}, ()) in"]
    if kind == "h":
        q = env.take("Qubit")
        env.live[out] = "Qubit"
        return [f"let {out} = apply(H, {q}) in"]
    if kind == "discard":
        return [f"let {out} = apply(DISCARD, {env.take('Qubit')}) in"]
    if kind == "meas":
        q = env.take("Qubit")
        env.live[out] = "Bit"
        return [f"let {out} = apply(MEAS, {q}) in"]
    if kind == "cdiscard":
        return [f"let {out} = apply(CDISCARD, {env.take('Bit')}) in"]
    if kind in ("cnot", "rot"):
        a, b = env.take("Qubit"), env.take("Qubit")
        x, y = env.fresh(), env.fresh()
        env.live[x] = env.live[y] = "Qubit"
        if kind == "cnot":
            return [f"let ({x}, {y}) = apply(CNOT, ({a}, {b})) in"]
        n, g = env.fresh("n"), env.fresh("g")
        return [
            f"let {n} = {rng.randint(0, 3)} + {rng.randint(1, 3)} in",
            f"let {g} = makeRGate {n} in",
            f"let ({x}, {y}) = apply({g}, ({a}, {b})) in",
        ]
    if kind == "lambda":
        p = env.fresh("p")
        lines, (last,) = _gate_block(rng, env, [p], rng.randint(1, 3))
        body = " ".join(lines + [f"return {last}"])
        q = env.take("Qubit")
        env.live[out] = "Qubit"
        return [f"let {out} = (\\{p} :: Qubit . {body}) {q} in"]
    if kind == "lift":
        p, f, g = env.fresh("p"), env.fresh("f"), env.fresh("g")
        lines, (last,) = _gate_block(rng, env, [p], rng.randint(1, 3))
        body = " ".join(lines + [f"return {last}"])
        q = env.take("Qubit")
        env.live[out] = "Qubit"
        return [
            f"let {f} = lift return \\{p} :: Qubit . {body} in",
            f"let {g} = force {f} in",
            f"let {out} = {g} {q} in",
        ]
    if kind == "box":
        a, b = env.fresh("p"), env.fresh("p")
        lines, (x, y) = _gate_block(rng, env, [a, b], rng.randint(1, 4))
        body = " ".join(lines + [f"return ({x}, {y})"])
        c, r1, r2 = env.fresh("c"), env.fresh(), env.fresh()
        q1, q2 = env.take("Qubit"), env.take("Qubit")
        env.live[r1] = env.live[r2] = "Qubit"
        return [
            f"let {c} = box[Qubit * Qubit] (lift return \\({a}, {b}) :: Qubit * Qubit . {body}) in",
            f"let ({r1}, {r2}) = apply({c}, ({q1}, {q2})) in",
        ]
    if kind == "cons":
        q = env.take("Qubit")
        lst = env.rng.choice(lists)
        length = env.live.pop(lst)[1]
        env.live[out] = ("List", f"{length} + 1")
        return [f"let {out} = {q} : {lst} in"]
    lst = env.rng.choice(lists)
    length = env.live.pop(lst)[1]
    k, acc, q = env.fresh("k"), env.fresh("acc"), env.fresh("q")
    if kind == "map":
        lines, (last,) = _gate_block(rng, env, [q], rng.randint(1, 2))
        body = " ".join(lines + [f"return ({last} : {acc})"])
        env.live[out] = ("List", length)
        return [f"let {out} = (fold[{k}] (lift return \\({acc}, {q}) :: List[{k}] Qubit * Qubit . {body}) []) {lst} in"]
    if kind == "ancillas":
        anc, x, y, u = env.fresh("a"), env.fresh("w"), env.fresh("w"), env.fresh("u")
        body = (
            f"let {anc} = apply(INIT0, ()) in let ({x}, {y}) = apply(CNOT, ({q}, {anc})) in "
            f"let {u} = apply(DISCARD, {y}) in return ({x} : {acc})"
        )
        env.live[out] = ("List", length)
        return [f"let {out} = (fold[{k}] (lift return \\({acc}, {q}) :: List[{k}] Qubit * Qubit . {body}) []) {lst} in"]
    if kind == "drain":
        u = env.fresh("u")
        body = f"let {u} = apply(DISCARD, {q}) in return {acc}"
        return [f"let {out} = (fold[{k}] (lift return \\({acc}, {q}) :: Unit * Qubit . {body}) ()) {lst} in"]
    t, t2, q2, rest = env.fresh("t"), env.fresh("t"), env.fresh("q"), env.fresh()
    ctl = env.take("Qubit")
    body = f"let ({t2}, {q2}) = apply(CNOT, ({t}, {q})) in return ({t2}, {q2} : {acc})"
    env.live[out] = "Qubit"
    env.live[rest] = ("List", length)
    return [
        f"let ({out}, {rest}) = (fold[{k}] (lift return \\(({t}, {acc}), {q}) :: "
        f"(Qubit * List[{k}] Qubit) * Qubit . {body}) ({ctl}, [])) {lst} in"
    ]


def _type_text(kind) -> str:
    return f"List[{kind[1]}] Qubit" if isinstance(kind, tuple) else kind


def random_program(rng: random.Random, max_ops: int = 10) -> str:
    """Source text of a closed, well-typed program ``main`` over index variables i and j."""
    env = _Env(rng)
    params = ["i", "j"][: rng.randint(1, 2)]
    inputs = []
    for _ in range(rng.randint(1, 3)):
        name = env.fresh("x")
        kind = rng.choice(("Qubit", ("List", rng.choice(params)), ("List", rng.choice(params))))
        env.live[name] = kind
        inputs.append((name, kind))
    lines = []
    for _ in range(rng.randint(1, max_ops)):
        lines += _op(rng, env)
    pattern, in_type = inputs[0][0], _type_text(inputs[0][1])
    for name, kind in inputs[1:]:
        pattern = f"({pattern}, {name})"
        in_type = f"{in_type} * {_type_text(kind)}"
    live = list(env.live)
    result = "()" if not live else live[0]
    for name in live[1:]:
        result = f"({result}, {name})"
    body = "\n    ".join(lines + [f"return {result}"])
    return f"forall {' '.join(params)}.\n\ndef main =\n  \\{pattern} :: {in_type} .\n    {body};\n"
