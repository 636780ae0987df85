"""Linear type-and-effect checking with index obligations.

Judgments are algorithmic: the whole typing context is passed down and each
judgment returns the set of linear resources (variables and labels) it
consumed.  Effects are width bounds; they are simplified eagerly, and every
non-trivial index comparison is recorded as an :class:`Obligation` together
with the verdict of the index solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

from . import circuit as cc
from . import index as ix
from . import syntax as sx
from .index import ONE, ZERO, Index
from .normalize import normalize
from .solver import DEFAULT_BUDGET, ExternalSolver, Refuted, Unknown, Valid, Verdict, check, simplify

STRICT = "strict"
PERMISSIVE = "permissive"
_LABEL = "#"  # prefix distinguishing consumed labels from consumed variables


class TypeCheckError(Exception):
    def __init__(self, message: str, node=None, rule: str | None = None):
        span = getattr(node, "span", None)
        where = f"{span[0]}:{span[1]}: " if span else ""
        tag = f"[{rule}] " if rule else ""
        super().__init__(f"{where}{tag}{message}")
        self.message = message
        self.span = span
        self.rule = rule


@dataclass(frozen=True)
class Obligation:
    ctx: tuple
    relation: str
    lhs: Index
    rhs: Index
    verdict: Verdict
    rule: str

    def text(self) -> str:
        head = f"forall {' '.join(self.ctx)}. " if self.ctx else ""
        return f"{head}{self.lhs} {self.relation} {self.rhs}"

    def to_json(self) -> dict:
        return {
            "ctx": list(self.ctx),
            "relation": self.relation,
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "verdict": str(self.verdict),
            "rule": self.rule,
        }


@dataclass(frozen=True)
class ValueResult:
    type: sx.Type
    used: frozenset = frozenset()


@dataclass(frozen=True)
class TermResult:
    type: sx.Type
    effect: Index
    used: frozenset = frozenset()


# wire counts


def wire_count(t: sx.Type) -> Index:
    if isinstance(t, (sx.UnitT, sx.Bang, sx.Circ, sx.NatT)):
        return ZERO
    if isinstance(t, sx.WireT):
        return ONE
    if isinstance(t, sx.Tensor):
        return ix.Plus(wire_count(t.left), wire_count(t.right))
    if isinstance(t, sx.Arrow):
        return t.capture
    if isinstance(t, sx.ListT):
        return ix.Times(t.length, wire_count(t.element))
    raise TypeError(f"not a type: {t!r}")


def context_wire_count(gamma: Mapping[str, sx.Type], labels: Mapping[str, str] = {}) -> Index:
    """Wire count of a typing context together with a label context."""
    total: Index = ix.Const(len(labels))
    for t in gamma.values():
        total = ix.Plus(total, wire_count(t))
    return normalize(total)


def prim_type(name: str) -> sx.Type:
    if name == "makeRGate":
        pair = sx.Tensor(sx.QUBIT, sx.QUBIT)
        return sx.Arrow(sx.NAT, sx.Circ(ix.Const(2), pair, pair), ZERO, ZERO)
    gates = cc.gate_registry()
    if name not in gates:
        raise TypeCheckError(f"unknown primitive {name}")
    boxed = cc.gate_circuit(gates[name])
    g = gates[name]
    return sx.Circ(ix.Const(boxed.circuit.width), g.input_type, g.output_type)


class _Mismatch(Exception):
    pass


class Checker:
    """One checking session: accumulates obligations under a mode and solver budget."""

    def __init__(self, mode: str = STRICT, budget: int = DEFAULT_BUDGET,
                 solver: ExternalSolver | None = None, default_length: Index | None = None):
        if mode not in (STRICT, PERMISSIVE):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.budget = budget
        self.solver = solver
        self.default_length = default_length
        self.obligations: list[Obligation] = []

    # obligations and subtyping

    def require(self, theta: tuple, relation: str, lhs: Index, rhs: Index, rule: str,
                always: bool = False) -> Verdict:
        """Decide an index judgment; recorded unless trivial (``always`` records it regardless)."""
        nl, nr = normalize(lhs), normalize(rhs)
        if not always and (nl == nr or (relation == "<=" and nl == ZERO)):
            return Valid()
        verdict = check(theta, relation, lhs, rhs, self.budget, self.solver)
        self.obligations.append(Obligation(tuple(theta), relation, lhs, rhs, verdict, rule))
        return verdict

    def _emit(self, theta: tuple, rule: str, record: bool):
        def emit(relation: str, lhs: Index, rhs: Index) -> bool:
            if record:
                return not isinstance(self.require(theta, relation, lhs, rhs, rule), Refuted)
            nl, nr = normalize(lhs), normalize(rhs)
            if nl == nr or (relation == "<=" and nl == ZERO):
                return True
            return isinstance(check(theta, relation, lhs, rhs, self.budget), Valid)
        return emit

    def subtype(self, theta: tuple, a: sx.Type, b: sx.Type, node=None, rule: str = "sub") -> None:
        """Record the obligations making ``a`` a subtype of ``b``; shape mismatch is an error."""
        try:
            _sub(a, b, self._emit(theta, rule, True))
        except _Mismatch:
            raise TypeCheckError(f"expected {b}, found {a}", node, rule) from None

    def is_subtype(self, theta: tuple, a: sx.Type, b: sx.Type) -> bool:
        """Tentative check: no obligations recorded, true only if everything is Valid."""
        try:
            return _sub(a, b, self._emit(theta, "sub", False))
        except _Mismatch:
            return False

    def equivalent(self, theta: tuple, a: sx.Type, b: sx.Type, node=None, rule: str = "eq") -> None:
        try:
            _equiv(a, b, self._emit(theta, rule, True))
        except _Mismatch:
            raise TypeCheckError(f"expected {b}, found {a}", node, rule) from None

    def simplified(self, theta: tuple, i: Index) -> Index:
        return simplify(tuple(theta), i)

    # helpers

    def _wf(self, theta: tuple, t: sx.Type, node) -> None:
        loose = sx.type_index_vars(t) - set(theta)
        if loose:
            raise TypeCheckError(f"index variables {sorted(loose)} are not in scope in {t}", node, "wf")

    def _count(self, theta: tuple, gamma: Mapping, used: frozenset) -> Index:
        total: Index = ix.Const(sum(1 for u in used if u.startswith(_LABEL)))
        for u in sorted(used):
            if not u.startswith(_LABEL):
                total = ix.Plus(total, wire_count(gamma[u]))
        return self.simplified(theta, total)

    @staticmethod
    def _join(a: frozenset, b: frozenset, node) -> frozenset:
        twice = a & b
        if twice:
            name = sorted(twice)[0]
            what = f"label {name[1:]}" if name.startswith(_LABEL) else f"linear variable {name}"
            raise TypeCheckError(f"{what} is used more than once", node, "linearity")
        return a | b

    @staticmethod
    def _consumed(name: str, t: sx.Type, used: frozenset, node) -> None:
        if not sx.is_parameter(t) and name not in used:
            raise TypeCheckError(f"linear variable {name} of type {t} is never used", node, "linearity")

    # values

    def value(self, theta: tuple, gamma: Mapping[str, sx.Type], q: Mapping[str, str],
              v: sx.Value, hint: sx.Type | None = None) -> ValueResult:
        if isinstance(v, sx.UnitVal):
            return ValueResult(sx.UNIT)
        if isinstance(v, sx.NatLit):
            return ValueResult(sx.NAT)
        if isinstance(v, sx.Variable):
            if v.name not in gamma:
                raise TypeCheckError(f"unbound variable {v.name}", v, "var")
            t = gamma[v.name]
            return ValueResult(t, frozenset() if sx.is_parameter(t) else frozenset((v.name,)))
        if isinstance(v, sx.Label):
            if q.get(v.name) != v.kind:
                raise TypeCheckError(f"label {v.name}:{v.kind} is not available", v, "lab")
            return ValueResult(sx.WireT(v.kind), frozenset((_LABEL + v.name,)))
        if isinstance(v, sx.Prim):
            return ValueResult(prim_type(v.name))
        if isinstance(v, sx.Lambda):
            self._wf(theta, v.annotation, v)
            inner = {**gamma, v.param: v.annotation}
            body_hint = hint.codomain if isinstance(hint, sx.Arrow) else None
            r = self.term(theta, inner, q, v.body, body_hint)
            self._consumed(v.param, v.annotation, r.used, v)
            captured = r.used - {v.param}
            capture = self._count(theta, gamma, captured)
            return ValueResult(sx.Arrow(v.annotation, r.type, r.effect, capture), captured)
        if isinstance(v, sx.Lift):
            inner_hint = hint.inner if isinstance(hint, sx.Bang) else None
            r = self.term(theta, gamma, q, v.body, inner_hint)
            if r.used:
                names = ", ".join(sorted(u.lstrip(_LABEL) for u in r.used))
                raise TypeCheckError(f"lift captures linear resources: {names}", v, "lift")
            self.require(theta, "<=", r.effect, ZERO, "lift")
            return ValueResult(sx.Bang(r.type))
        if isinstance(v, sx.BoxedCircuit):
            try:
                inputs, outputs = cc.typecheck_circuit(v.circuit)
                t_in = cc.wire_judgment(inputs, v.input)
                t_out = cc.wire_judgment(outputs, v.output)
            except cc.CircuitError as err:
                raise TypeCheckError(str(err), v, "circ") from None
            return ValueResult(sx.Circ(ix.Const(v.circuit.width), t_in, t_out))
        if isinstance(v, sx.Pair):
            left_hint = hint.left if isinstance(hint, sx.Tensor) else None
            right_hint = hint.right if isinstance(hint, sx.Tensor) else None
            a = self.value(theta, gamma, q, v.left, left_hint)
            b = self.value(theta, gamma, q, v.right, right_hint)
            return ValueResult(sx.Tensor(a.type, b.type), self._join(a.used, b.used, v))
        if isinstance(v, sx.Nil):
            if not isinstance(hint, sx.ListT):
                raise TypeCheckError("cannot determine the element type of []; add a type annotation", v, "nil")
            self._wf(theta, hint.element, v)
            return ValueResult(sx.ListT(ZERO, hint.element))
        if isinstance(v, sx.Cons):
            return self._cons(theta, gamma, q, v, hint)
        if isinstance(v, sx.Fold):
            length = None
            if isinstance(hint, sx.Arrow) and isinstance(hint.domain, sx.ListT):
                length = hint.domain.length
            return self.fold(theta, gamma, q, v, length)
        if isinstance(v, sx.DefRef):
            raise TypeCheckError(f"reference {v.name} was not expanded", v, "var")
        raise TypeCheckError(f"not a value: {v!r}", v)

    def _cons(self, theta, gamma, q, v: sx.Cons, hint) -> ValueResult:
        elem_hint = hint.element if isinstance(hint, sx.ListT) else None
        head = self.value(theta, gamma, q, v.head, elem_hint)
        tail_hint = sx.ListT(ZERO, elem_hint if elem_hint is not None else head.type)
        tail = self.value(theta, gamma, q, v.tail, tail_hint)
        if not isinstance(tail.type, sx.ListT):
            raise TypeCheckError(f"the tail of a list must be a list, found {tail.type}", v.tail, "cons")
        elem = tail.type.element
        if self.is_subtype(theta, head.type, elem):
            joined = elem
        elif self.is_subtype(theta, elem, head.type):
            joined = head.type
        else:
            self.subtype(theta, head.type, elem, v.head, "cons")
            joined = elem
        length = self.simplified(theta, ix.Plus(tail.type.length, ONE))
        return ValueResult(sx.ListT(length, joined), self._join(head.used, tail.used, v))

    def fold(self, theta: tuple, gamma, q, v: sx.Fold, length: Index | None) -> ValueResult:
        if length is None:
            length = self.default_length
        if length is None:
            raise TypeCheckError("cannot determine the length of the folded list; add a type annotation", v, "fold")
        binder, step = v.binder, v.step
        if binder in theta or binder in ix.free_vars(length):
            new = ix.fresh_name(binder, set(theta) | ix.free_vars(length) | sx.all_index_names(step))
            step = sx.subst_index_syntax(step, binder, ix.Var(new))
            binder = new
        inner = tuple(theta) + (binder,)
        rs = self.value(inner, gamma, q, step)
        if rs.used:
            raise TypeCheckError("the step function of a fold cannot capture linear resources", v.step, "fold")
        st = rs.type
        if not (isinstance(st, sx.Bang) and isinstance(st.inner, sx.Arrow) and isinstance(st.inner.domain, sx.Tensor)):
            raise TypeCheckError(f"a fold step must have type !(B * A -o[J,J'] B'), found {st}", v.step, "fold")
        arrow = st.inner
        acc, elem = arrow.domain.left, arrow.domain.right
        if binder in sx.type_index_vars(elem):
            raise TypeCheckError(f"the element type {elem} cannot depend on the fold index", v.step, "fold")
        succ = sx.subst_type_index(acc, binder, ix.Plus(ix.Var(binder), ONE))
        self.equivalent(inner, arrow.codomain, succ, v.step, "fold")
        start = sx.subst_type_index(acc, binder, ZERO)
        rb = self.value(theta, gamma, q, v.base, start)
        self.subtype(theta, rb.type, start, v.base, "fold")
        capture = self._count(theta, gamma, rb.used)
        remaining = ix.Monus(ix.Monus(length, ONE), ix.Var(binder))
        per_step = ix.Plus(arrow.width, ix.Times(remaining, wire_count(elem)))
        bound = ix.Max(capture, ix.BoundedMax(binder, length, per_step))
        width = self.simplified(theta, bound)
        if width != bound:
            self.require(theta, "=", bound, width, "fold", always=True)
        result = sx.subst_type_index(acc, binder, length)
        return ValueResult(sx.Arrow(sx.ListT(length, elem), result, width, capture), rb.used)

    # terms

    def term(self, theta: tuple, gamma: Mapping[str, sx.Type], q: Mapping[str, str],
             m: sx.Term, hint: sx.Type | None = None) -> TermResult:
        if isinstance(m, sx.Return):
            r = self.value(theta, gamma, q, m.value, hint)
            return TermResult(r.type, self._count(theta, gamma, r.used), r.used)
        if isinstance(m, sx.Let):
            bound = self.term(theta, gamma, q, m.bound)
            body = self.term(theta, {**gamma, m.name: bound.type}, q, m.body, hint)
            self._consumed(m.name, bound.type, body.used, m)
            rest = body.used - {m.name}
            effect = self.simplified(theta, ix.Max(ix.Plus(bound.effect, self._count(theta, gamma, rest)), body.effect))
            return TermResult(body.type, effect, self._join(bound.used, rest, m))
        if isinstance(m, sx.Dest):
            if m.left == m.right:
                raise TypeCheckError(f"pattern binds {m.left} twice", m, "dest")
            pair = self.value(theta, gamma, q, m.pair)
            if not isinstance(pair.type, sx.Tensor):
                raise TypeCheckError(f"cannot destructure a value of type {pair.type}", m.pair, "dest")
            inner = {**gamma, m.left: pair.type.left, m.right: pair.type.right}
            body = self.term(theta, inner, q, m.body, hint)
            self._consumed(m.left, pair.type.left, body.used, m)
            self._consumed(m.right, pair.type.right, body.used, m)
            rest = body.used - {m.left, m.right}
            return TermResult(body.type, body.effect, self._join(pair.used, rest, m))
        if isinstance(m, sx.App):
            return self._app(theta, gamma, q, m)
        if isinstance(m, sx.Apply):
            c = self.value(theta, gamma, q, m.circuit)
            if not isinstance(c.type, sx.Circ):
                raise TypeCheckError(f"apply expects a circuit, found {c.type}", m.circuit, "apply")
            arg = self.value(theta, gamma, q, m.argument, c.type.input)
            self.subtype(theta, arg.type, c.type.input, m.argument, "apply")
            return TermResult(c.type.output, c.type.width, self._join(c.used, arg.used, m))
        if isinstance(m, sx.Force):
            r = self.value(theta, gamma, q, m.value)
            if not isinstance(r.type, sx.Bang):
                raise TypeCheckError(f"force expects a lifted value, found {r.type}", m.value, "force")
            return TermResult(r.type.inner, ZERO, r.used)
        if isinstance(m, sx.Box):
            return self._box(theta, gamma, q, m)
        if isinstance(m, sx.NatOp):
            used = frozenset()
            for operand in (m.left, m.right):
                r = self.value(theta, gamma, q, operand, sx.NAT)
                if r.type != sx.NAT:
                    raise TypeCheckError(f"arithmetic expects Nat, found {r.type}", operand, "natop")
                used = self._join(used, r.used, m)
            return TermResult(sx.NAT, ZERO, used)
        raise TypeCheckError(f"not a term: {m!r}", m)

    def _app(self, theta, gamma, q, m: sx.App) -> TermResult:
        if isinstance(m.function, sx.Fold):
            arg = self.value(theta, gamma, q, m.argument)
            if not isinstance(arg.type, sx.ListT):
                raise TypeCheckError(f"a fold is applied to a list, found {arg.type}", m.argument, "app")
            fn = self.fold(theta, gamma, q, m.function, arg.type.length)
        else:
            fn = self.value(theta, gamma, q, m.function)
            if not isinstance(fn.type, sx.Arrow):
                raise TypeCheckError(f"cannot apply a value of type {fn.type}", m.function, "app")
            arg = self.value(theta, gamma, q, m.argument, fn.type.domain)
        self.subtype(theta, arg.type, fn.type.domain, m.argument, "app")
        return TermResult(fn.type.codomain, fn.type.width, self._join(fn.used, arg.used, m))

    def _box(self, theta, gamma, q, m: sx.Box) -> TermResult:
        self._wf(theta, m.bundle_type, m)
        if not sx.is_bundle_type(m.bundle_type):
            raise TypeCheckError(f"box needs a bundle type, found {m.bundle_type}", m, "box")
        r = self.value(theta, gamma, q, m.value)
        t = r.type
        if not (isinstance(t, sx.Bang) and isinstance(t.inner, sx.Arrow)):
            raise TypeCheckError(f"box expects a lifted function, found {t}", m.value, "box")
        arrow = t.inner
        if not sx.is_bundle_type(arrow.codomain):
            raise TypeCheckError(f"a boxed function must return a bundle, found {arrow.codomain}", m.value, "box")
        self.equivalent(theta, m.bundle_type, arrow.domain, m, "box")
        return TermResult(sx.Circ(arrow.width, m.bundle_type, arrow.codomain), ZERO, r.used)

    def check_term(self, theta, gamma, q, m: sx.Term, expected: sx.Type, effect: Index) -> TermResult:
        """Check ``m`` against a type and an effect bound (subsumption)."""
        r = self.term(theta, gamma, q, m, expected)
        self.subtype(theta, r.type, expected, m)
        self.require(theta, "<=", r.effect, effect, "csub")
        return r


def _sub(a: sx.Type, b: sx.Type, emit) -> bool:
    if isinstance(a, sx.Arrow) and isinstance(b, sx.Arrow):
        ok = _sub(b.domain, a.domain, emit)
        ok = _sub(a.codomain, b.codomain, emit) and ok
        ok = emit("<=", a.width, b.width) and ok
        return emit("=", a.capture, b.capture) and ok
    if isinstance(a, sx.ListT) and isinstance(b, sx.ListT):
        ok = emit("=", a.length, b.length)
        return _sub(a.element, b.element, emit) and ok
    if isinstance(a, sx.Circ) and isinstance(b, sx.Circ):
        ok = emit("<=", a.width, b.width)
        ok = _equiv(a.input, b.input, emit) and ok
        return _equiv(a.output, b.output, emit) and ok
    if isinstance(a, sx.Bang) and isinstance(b, sx.Bang):
        return _sub(a.inner, b.inner, emit)
    if isinstance(a, sx.Tensor) and isinstance(b, sx.Tensor):
        ok = _sub(a.left, b.left, emit)
        return _sub(a.right, b.right, emit) and ok
    if a == b and isinstance(a, (sx.UnitT, sx.WireT, sx.NatT)):
        return True
    raise _Mismatch()


def _equiv(a: sx.Type, b: sx.Type, emit) -> bool:
    if isinstance(a, sx.Arrow) and isinstance(b, sx.Arrow):
        ok = _equiv(a.domain, b.domain, emit)
        ok = _equiv(a.codomain, b.codomain, emit) and ok
        ok = emit("=", a.width, b.width) and ok
        return emit("=", a.capture, b.capture) and ok
    if isinstance(a, sx.ListT) and isinstance(b, sx.ListT):
        ok = emit("=", a.length, b.length)
        return _equiv(a.element, b.element, emit) and ok
    if isinstance(a, sx.Circ) and isinstance(b, sx.Circ):
        ok = emit("=", a.width, b.width)
        ok = _equiv(a.input, b.input, emit) and ok
        return _equiv(a.output, b.output, emit) and ok
    if isinstance(a, sx.Bang) and isinstance(b, sx.Bang):
        return _equiv(a.inner, b.inner, emit)
    if isinstance(a, sx.Tensor) and isinstance(b, sx.Tensor):
        ok = _equiv(a.left, b.left, emit)
        return _equiv(a.right, b.right, emit) and ok
    if a == b and isinstance(a, (sx.UnitT, sx.WireT, sx.NatT)):
        return True
    raise _Mismatch()


def check_subtype(ctx, a: sx.Type, b: sx.Type, budget: int = DEFAULT_BUDGET,
                  solver: ExternalSolver | None = None) -> tuple[Verdict, list[Obligation]]:
    """Decide ``a <: b`` under the index context; returns the combined verdict and obligations."""
    checker = Checker(budget=budget, solver=solver)
    try:
        _sub(a, b, checker._emit(tuple(ctx), "sub", True))
    except _Mismatch:
        return Refuted({}), []
    return combine(o.verdict for o in checker.obligations), checker.obligations


def combine(verdicts) -> Verdict:
    out: Verdict = Valid()
    for v in verdicts:
        if isinstance(v, Refuted):
            return v
        if isinstance(v, Unknown):
            out = v
    return out


def infer_value(ctx, gamma, q, v: sx.Value, checker: Checker | None = None) -> ValueResult:
    return (checker or Checker()).value(tuple(ctx), dict(gamma), dict(q), v)


def infer_term(ctx, gamma, q, m: sx.Term, checker: Checker | None = None) -> TermResult:
    return (checker or Checker()).term(tuple(ctx), dict(gamma), dict(q), m)


# programs


def expand(program: sx.Program, definition: sx.Definition) -> sx.Expr:
    """The definition body with references to earlier definitions replaced by their bodies."""
    env: dict[str, sx.Definition] = {}
    expanded: dict[str, sx.Expr] = {}
    for d in program.definitions:
        expanded[d.name] = _expand(d.body, env, expanded, program.index_params, frozenset(), frozenset())
        env[d.name] = d
        if d is definition or d.name == definition.name:
            return expanded[d.name]
    raise KeyError(definition.name)


def _expand(node, env, expanded, params, bound: frozenset, binders: frozenset):
    if isinstance(node, sx.Variable) and node.name not in bound and node.name in env:
        return _instantiate(node, env[node.name], (), expanded, params, binders)
    if isinstance(node, sx.DefRef):
        if node.name not in env:
            raise TypeCheckError(f"unknown definition {node.name}", node, "var")
        return _instantiate(node, env[node.name], node.indices, expanded, params, binders)
    rec = lambda n, b=bound, f=binders: _expand(n, env, expanded, params, b, f)
    if isinstance(node, sx.Lambda):
        return replace(node, body=rec(node.body, bound | {node.param}))
    if isinstance(node, sx.Let):
        return replace(node, bound=rec(node.bound), body=rec(node.body, bound | {node.name}))
    if isinstance(node, sx.Dest):
        return replace(node, pair=rec(node.pair), body=rec(node.body, bound | {node.left, node.right}))
    if isinstance(node, sx.Fold):
        return replace(node, step=rec(node.step, bound, binders | {node.binder}), base=rec(node.base))
    return sx._rebuild(node, rec)


def _instantiate(node, d: sx.Definition, indices: tuple, expanded, params, binders):
    if len(indices) != len(d.params):
        raise TypeCheckError(
            f"definition {d.name} takes {len(d.params)} index arguments, given {len(indices)}", node, "var"
        )
    body = expanded[d.name]
    if not isinstance(body, sx.Value):
        raise TypeCheckError(f"definition {d.name} is a computation and cannot be referenced", node, "var")
    captured = (sx.index_vars(body) - set(d.params)) & binders
    if captured:
        raise TypeCheckError(
            f"definition {d.name} mentions {sorted(captured)}, which a surrounding fold rebinds", node, "var"
        )
    return sx.subst_indices(body, dict(zip(d.params, indices)))


@dataclass
class DefinitionReport:
    name: str
    type: Optional[sx.Type]
    effect: Optional[Index]
    obligations: list = field(default_factory=list)
    index_ctx: tuple = ()
    declared: Optional[sx.Type] = None

    def verdict(self) -> Verdict:
        return combine(o.verdict for o in self.obligations)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "type": str(self.type),
            "effect": None if self.effect is None else str(self.effect),
            "obligations": [o.to_json() for o in self.obligations],
        }

    def text(self) -> str:
        head = f"{self.name} : {self.type}"
        if self.effect is not None:
            head += f" ; {self.effect}"
        lines = [head]
        for o in self.obligations:
            lines.append(f"  [{o.rule}] {o.text()} : {o.verdict}")
        return "\n".join(lines)


@dataclass
class ProgramReport:
    definitions: list
    mode: str = STRICT

    def obligations(self) -> list[Obligation]:
        return [o for d in self.definitions for o in d.obligations]

    @property
    def refuted(self) -> list[Obligation]:
        return [o for o in self.obligations() if isinstance(o.verdict, Refuted)]

    @property
    def unknown(self) -> list[Obligation]:
        return [o for o in self.obligations() if isinstance(o.verdict, Unknown)]

    @property
    def ok(self) -> bool:
        if self.refuted:
            return False
        return self.mode == PERMISSIVE or not self.unknown

    def lookup(self, name: str) -> DefinitionReport:
        for d in self.definitions:
            if d.name == name:
                return d
        raise KeyError(name)

    def to_json(self) -> dict:
        status = "ok" if self.ok else ("refuted" if self.refuted else "unverified")
        return {"status": status, "mode": self.mode, "definitions": [d.to_json() for d in self.definitions]}

    def text(self) -> str:
        lines = [d.text() for d in self.definitions]
        for o in self.unknown:
            tag = "warning" if self.mode == PERMISSIVE else "error"
            lines.append(f"{tag}: unverified obligation {o.text()}")
        for o in self.refuted:
            lines.append(f"error: refuted obligation {o.text()} with {o.verdict}")
        return "\n".join(lines)


def definition_ctx(program: sx.Program, d: sx.Definition) -> tuple:
    return tuple(dict.fromkeys(program.index_params + d.params))


def check_definition(program: sx.Program, d: sx.Definition, mode: str = STRICT,
                     budget: int = DEFAULT_BUDGET, solver: ExternalSolver | None = None) -> DefinitionReport:
    theta = definition_ctx(program, d)
    default = ix.Var((d.params or theta)[0]) if theta else None
    checker = Checker(mode, budget, solver, default)
    body = expand(program, d)
    if d.annotation is not None:
        checker._wf(theta, d.annotation, d)
    try:
        if isinstance(body, sx.Value):
            r = checker.value(theta, {}, {}, body, d.annotation)
            t, effect = r.type, None
        else:
            r = checker.term(theta, {}, {}, body, d.annotation)
            t, effect = r.type, r.effect
        if d.annotation is not None:
            checker.subtype(theta, t, d.annotation, d, "annotation")
    except TypeCheckError as err:
        if err.span is None and d.span is not None:
            raise TypeCheckError(f"in {d.name}: {err.message}", d, err.rule) from None
        raise
    return DefinitionReport(d.name, t, effect, checker.obligations, theta, d.annotation)


def check_program(program: sx.Program, mode: str = STRICT, budget: int = DEFAULT_BUDGET,
                  solver: ExternalSolver | None = None) -> ProgramReport:
    reports = [check_definition(program, d, mode, budget, solver) for d in program.definitions]
    return ProgramReport(reports, mode)


def check_configuration(value: sx.Value, expected: sx.Type, outputs: Mapping[str, str],
                        budget: int = DEFAULT_BUDGET) -> list[str]:
    """Problems with ``value`` as a result of type ``expected`` over live labels ``outputs``."""
    checker = Checker(budget=budget)
    try:
        r = checker.value((), {}, dict(outputs), value, expected)
        checker.subtype((), r.type, expected, value, "preservation")
    except TypeCheckError as err:
        return [str(err)]
    problems = []
    unused = sorted(set(outputs) - {u[1:] for u in r.used})
    if unused:
        problems.append(f"labels {unused} are live but not part of the result")
    for o in checker.obligations:
        if not isinstance(o.verdict, Valid):
            problems.append(f"obligation {o.text()} is {o.verdict}")
    return problems
