"""Big-step evaluation of (circuit, term) configurations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from . import circuit as cc
from . import index as ix
from . import syntax as sx
from . import typechecker as tc
from .circuit import Circuit, LabelSupply


class EvaluationError(Exception):
    def __init__(self, rule: str, message: str, node=None):
        span = getattr(node, "span", None)
        where = f"{span[0]}:{span[1]}: " if span else ""
        super().__init__(f"{where}[{rule}] {message}")
        self.rule = rule


@dataclass
class Configuration:
    circuit: Circuit
    payload: sx.Expr
    supply: LabelSupply = field(default_factory=LabelSupply)


Tracer = Callable[[dict], None]


class Evaluator:
    def __init__(self, supply: LabelSupply | None = None, trace: Tracer | None = None):
        self.supply = supply or LabelSupply()
        self.trace = trace

    def _fire(self, rule: str, payload: sx.Expr, c: Circuit) -> None:
        if self.trace is not None:
            text = str(payload)
            if len(text) > 80:
                text = text[:77] + "..."
            self.trace({"rule": rule, "payload": text, "width": c.width})

    def term(self, c: Circuit, m: sx.Expr) -> tuple[Circuit, sx.Value]:
        while True:
            if isinstance(m, sx.Value):
                return c, m
            if isinstance(m, sx.Return):
                self._fire("return", m, c)
                return c, m.value
            if isinstance(m, sx.Let):
                self._fire("let", m, c)
                c, v = self.term(c, m.bound)
                m = sx.subst_value(m.body, m.name, v)
                continue
            if isinstance(m, sx.Dest):
                self._fire("dest", m, c)
                if not isinstance(m.pair, sx.Pair):
                    raise EvaluationError("dest", f"cannot destructure {m.pair}", m)
                body = sx.subst_value(m.body, m.left, m.pair.left)
                m = sx.subst_value(body, m.right, m.pair.right)
                continue
            if isinstance(m, sx.Force):
                self._fire("force", m, c)
                if not isinstance(m.value, sx.Lift):
                    raise EvaluationError("force", f"cannot force {m.value}", m)
                m = m.value.body
                continue
            if isinstance(m, sx.App):
                fn, arg = m.function, m.argument
                if isinstance(fn, sx.Lambda):
                    self._fire("app", m, c)
                    m = sx.subst_value(fn.body, fn.param, arg)
                    continue
                if isinstance(fn, sx.Fold):
                    return self._fold(c, fn, arg, m)
                if isinstance(fn, sx.Prim) and fn.name == "makeRGate":
                    self._fire("app", m, c)
                    if not isinstance(arg, sx.NatLit):
                        raise EvaluationError("app", f"makeRGate expects a natural, got {arg}", m)
                    return c, cc.gate_circuit(cc.rotation_gate(arg.value))
                raise EvaluationError("app", f"cannot apply {fn}", m)
            if isinstance(m, sx.Apply):
                self._fire("apply", m, c)
                boxed = _as_boxed(m.circuit, m)
                try:
                    return cc.append_boxed(c, m.argument, boxed, self.supply)
                except cc.CircuitError as err:
                    raise EvaluationError("apply", str(err), m) from None
            if isinstance(m, sx.Box):
                self._fire("box", m, c)
                return c, self._box(m)
            if isinstance(m, sx.NatOp):
                self._fire("natop", m, c)
                return c, _natop(m)
            raise EvaluationError("eval", f"no rule applies to {m}", m)

    def _fold(self, c: Circuit, fold: sx.Fold, arg: sx.Value, node) -> tuple[Circuit, sx.Value]:
        if not isinstance(fold.step, sx.Lift):
            raise EvaluationError("fold-step", f"a fold step must be lifted, got {fold.step}", node)
        acc = fold.base
        k = 0
        while True:
            if isinstance(arg, sx.Nil):
                self._fire("fold-end", node, c)
                return c, acc
            if not isinstance(arg, sx.Cons):
                raise EvaluationError("fold-step", f"a fold is applied to a list, got {arg}", node)
            self._fire("fold-step", node, c)
            body = sx.subst_index_syntax(fold.step.body, fold.binder, ix.Const(k))
            before = c
            c, step = self.term(c, body)
            if c is not before and c != before:
                raise EvaluationError("fold-step", "the step function built a circuit before being applied", node)
            c, acc = self.term(c, sx.App(step, sx.Pair(acc, arg.head)))
            arg = arg.tail
            k += 1

    def _box(self, m: sx.Box) -> sx.BoxedCircuit:
        if not isinstance(m.value, sx.Lift):
            raise EvaluationError("box", f"box expects a lifted function, got {m.value}", m)
        try:
            q, bundle = cc.freshlabels(m.bundle_type, self.supply)
        except cc.CircuitError as err:
            raise EvaluationError("box", str(err), m) from None
        sandbox = cc.identity(q)
        after, fn = self.term(sandbox, m.value.body)
        if after != sandbox:
            raise EvaluationError("box", "the boxed computation built a circuit before receiving its input", m)
        d, out = self.term(sandbox, sx.App(fn, bundle))
        return sx.BoxedCircuit(bundle, d, out)


def _as_boxed(v: sx.Value, node) -> sx.BoxedCircuit:
    if isinstance(v, sx.BoxedCircuit):
        return v
    if isinstance(v, sx.Prim):
        gates = cc.gate_registry()
        if v.name in gates:
            return cc.gate_circuit(gates[v.name])
    raise EvaluationError("apply", f"cannot apply {v} as a circuit", node)


def _natop(m: sx.NatOp) -> sx.NatLit:
    if not (isinstance(m.left, sx.NatLit) and isinstance(m.right, sx.NatLit)):
        raise EvaluationError("natop", f"arithmetic on non-numerals in {m}", m)
    a, b = m.left.value, m.right.value
    if m.op == "+":
        return sx.NatLit(a + b)
    if m.op == "-":
        return sx.NatLit(max(0, a - b))
    return sx.NatLit(a * b)


def evaluate(cfg: Configuration, trace: Tracer | None = None) -> Configuration:
    """Evaluate a closed configuration; the supply in ``cfg`` is advanced."""
    if sx.free_term_vars(cfg.payload):
        raise EvaluationError("eval", f"free variables {sorted(sx.free_term_vars(cfg.payload))}")
    if sx.index_vars(cfg.payload):
        raise EvaluationError("eval", f"free index variables {sorted(sx.index_vars(cfg.payload))}")
    c, v = Evaluator(cfg.supply, trace).term(cfg.circuit, cfg.payload)
    return Configuration(c, v, cfg.supply)


# whole programs


@dataclass
class RunResult:
    value: sx.Value
    circuit: Circuit
    bound: Optional[ix.Index]  # static width bound, instantiated
    bound_value: Optional[int]
    result_type: sx.Type
    input: sx.Value

    def to_json(self) -> dict:
        return {
            "value": str(self.value),
            "type": str(self.result_type),
            "bound": self.bound_value,
            "circuit": cc.to_json(self.circuit),
        }


class WidthViolation(Exception):
    pass


def entry_definition(program: sx.Program, name: str | None = None) -> sx.Definition:
    if name is not None:
        return program.lookup(name)
    if program.main is not None:
        return program.main
    if not program.definitions:
        raise EvaluationError("run", "the program has no definitions")
    return program.definitions[-1]


def run_program(program: sx.Program, index_args: Mapping[str, int], input_spec: sx.Type | None = None,
                entry: str | None = None, trace: Tracer | None = None,
                report: tc.DefinitionReport | None = None) -> RunResult:
    """Instantiate the indices, feed fresh input labels to the entry point and evaluate.

    The width of the resulting circuit is checked against the statically
    inferred bound; a violation raises :class:`WidthViolation`.
    """
    d = entry_definition(program, entry)
    theta = tc.definition_ctx(program, d)
    missing = [v for v in theta if v not in index_args]
    if missing:
        raise EvaluationError("run", f"missing index arguments for {missing}")
    env = {v: int(index_args[v]) for v in theta}
    mapping = {v: ix.Const(n) for v, n in env.items()}
    if report is None:
        report = tc.check_definition(program, d)
    static_type = report.type
    body = sx.subst_indices(tc.expand(program, d), mapping)
    supply = LabelSupply()
    if isinstance(body, sx.Term):
        bound = report.effect
        result_type = static_type
        inputs, bundle = cc.EMPTY, sx.UnitVal()
        payload: sx.Expr = body
    elif isinstance(static_type, sx.Arrow):
        bound = static_type.width
        result_type = static_type.codomain
        spec = input_spec if input_spec is not None else static_type.domain
        spec = sx.subst_indices(spec, mapping)
        inputs, bundle = cc.freshlabels(spec, supply)
        payload = sx.App(body, bundle)
    else:
        bound = ix.ZERO
        result_type = static_type
        inputs, bundle = cc.EMPTY, sx.UnitVal()
        payload = sx.Return(body)
    start = cc.identity(inputs)
    out = evaluate(Configuration(start, payload, supply), trace)
    bound_value = ix.evaluate(bound, env) if bound is not None else None
    if bound_value is not None and out.circuit.width > bound_value:
        raise WidthViolation(f"circuit width {out.circuit.width} exceeds the static bound {bound} = {bound_value}")
    result_type = sx.subst_indices(result_type, mapping)
    return RunResult(out.payload, out.circuit, bound, bound_value, result_type, bundle)


def json_tracer(stream) -> Tracer:
    def emit(event: dict) -> None:
        stream.write(json.dumps(event) + "\n")
    return emit
