"""Acceptance criteria, one check each.

Run with ``pytest tests/test_acceptance.py`` (PASS/FAIL lines appear in the
terminal summary) or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import io
import itertools
import json
import random
import sys
import time
from functools import lru_cache
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from conftest import GOLDEN, STDLIB, STDLIB_FILES
from generators import circuit_pair, random_index, random_program, random_term, random_value
from pqr import circuit as cc
from pqr import cli
from pqr import evaluator as ev
from pqr import index as ix
from pqr import typechecker as tc
from pqr.index import BoundedMax, Const, Plus, Times, Var
from pqr.normalize import normalize
from pqr.parser import parse, parse_expr, parse_index, parse_type
from pqr.printer import format_program, pretty
from pqr.solver import Refuted, Valid, check_eq, check_leq, verifies

RESULTS: dict[int, tuple[bool, str]] = {}
GENERATED_PROGRAMS = 250


def _load(name):
    return parse((STDLIB / f"{name}.pqr").read_text())


def _cli(*argv):
    out = io.StringIO()
    return cli.main(list(argv), out), out.getvalue()


class Timer:
    def __init__(self, limit: float):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.2f}s, limit {self.limit}s"


def criterion_1():
    with Timer(1.0) as t:
        code, out = _cli("check", "stdlib/dumbnot.pqr")
        assert code == 0 and out.strip() == "dumbNot : Qubit -o[2,0] Qubit", out
        code, out = _cli("run", "stdlib/dumbnot.pqr", "--json")
        circuit = json.loads(out)["circuit"]
        assert code == 0
        assert [op["gate"] for op in circuit["ops"]] == ["INIT1", "CNOT", "DISCARD"]
        assert circuit["width"] == 2
    return f"dumbNot : Qubit -o[2,0] Qubit, 3 ops, width 2 ({t.elapsed:.2f}s)"


def criterion_2():
    with Timer(1.0) as t:
        program = _load("hadamardn")
        report = tc.check_program(program)
        assert report.ok
        assert report.lookup("hadamardN").type == parse_type("List[i] Qubit -o[i,0] List[i] Qubit")
        widths = [ev.run_program(program, {"i": n}).circuit.width for n in (0, 1, 5)]
        assert widths == [0, 1, 5], widths
    return f"widths at i=0,1,5: {widths} ({t.elapsed:.2f}s)"


def criterion_3():
    with Timer(2.0) as t:
        program = _load("qft")
        report = tc.check_program(program)
        qft = report.lookup("qft")
        assert report.ok and qft.type == parse_type("List[i] Qubit -o[i,0] List[i] Qubit")
        folds = {o.text(): o.verdict for o in qft.obligations if o.rule == "fold"}
        inner = "forall i j. max(1, max[e < j] e + 2 + (j - 1 - e) * 1) = j + 1"
        outer = "forall i. max(0, max[j < i] j + 1 + (i - 1 - j) * 1) = i"
        assert folds.get(inner) == Valid() and folds.get(outer) == Valid(), folds
        result = ev.run_program(program, {"i": 3}, report=qft)
        gates = [op.gate.name for op in result.circuit.ops]
        assert gates == ["H", "R2", "H", "R3", "R2", "H"], gates
        assert result.circuit.width == 3
        assert cc.to_json(result.circuit) == json.loads((GOLDEN / "qft_i3.json").read_text())
    return f"width 3, {' '.join(gates)}, both fold equalities Valid ({t.elapsed:.2f}s)"


def criterion_4():
    rev = tc.check_program(_load("rev")).lookup("rev")
    qlen = tc.check_program(_load("qlen")).lookup("main")
    assert rev.type == parse_type("List[i] Qubit -o[i,0] List[i] Qubit"), rev.type
    assert qlen.type == parse_type("List[i] Qubit -o[i,0] Nat * List[i] Qubit"), qlen.type
    return f"rev : {rev.type}; qlen : {qlen.type}"


def criterion_5():
    with Timer(10.0) as t:
        rng = random.Random(5)
        for _ in range(1000):
            q, c, kept, handed, d = circuit_pair(rng)
            out = cc.concat(c, d)
            assert cc.typecheck_circuit(out) == (q, kept.union(d.outputs))
            assert out.width <= max(c.width, d.width + len(kept))
    return f"1000 pairs, 0 violations ({t.elapsed:.2f}s)"


@lru_cache(maxsize=None)
def _total_correctness_runs():
    """Every (program, instantiation) run: stdlib files plus generated programs, indices 0..4."""
    programs = [(p.stem, parse(p.read_text())) for p in STDLIB_FILES]
    rng = random.Random(6)
    programs += [(f"generated-{k}", parse(random_program(rng))) for k in range(GENERATED_PROGRAMS)]
    runs = []
    for name, program in programs:
        report = tc.check_program(program)
        assert report.ok, f"{name} does not check:\n{report.text()}"
        d = ev.entry_definition(program)
        theta = tc.definition_ctx(program, d)
        for values in itertools.product(range(5), repeat=len(theta)):
            env = dict(zip(theta, values))
            runs.append((name, env, ev.run_program(program, env, report=report.lookup(d.name))))
    return len(programs), runs


def criterion_6():
    with Timer(60.0) as t:
        count, runs = _total_correctness_runs()
        violations = [(n, env) for n, env, r in runs if r.circuit.width > r.bound_value]
        assert count >= 200 + len(STDLIB_FILES)
        assert not violations, violations[:5]
    return f"{count} programs, {len(runs)} runs, 0 violations ({t.elapsed:.2f}s)"


def criterion_7():
    _, runs = _total_correctness_runs()
    failures = []
    for name, env, r in runs:
        problems = tc.check_configuration(r.value, r.result_type, r.circuit.outputs)
        if problems:
            failures.append((name, env, problems))
    assert not failures, failures[:3]
    return f"{len(runs)} results re-check at their types"


def criterion_8():
    rng = random.Random(8)
    names = ("i", "j")
    for _ in range(1000):
        t = random_index(rng, names, 6)
        n = normalize(t)
        for _ in range(20):
            env = {v: rng.randint(0, 10) for v in names}
            assert ix.interpret(names, n, env) == ix.interpret(names, t, env), (t, env)
    valid = refuted = 0
    for _ in range(600):
        lhs, rhs = random_index(rng, ("i",), 3), random_index(rng, ("i",), 3)
        v = check_leq(("i",), lhs, rhs)
        if isinstance(v, Valid):
            valid += 1
            assert all(ix.evaluate(lhs, {"i": k}) <= ix.evaluate(rhs, {"i": k}) for k in range(9)), (lhs, rhs)
        if isinstance(v, Refuted):
            refuted += 1
            assert verifies(lhs, rhs, v.witness), (lhs, rhs, v)
    assert ix.interpret((), parse_index("5 - 7"), {}) == 0
    assert ix.interpret((), parse_index("max(2, 3)"), {}) == 3
    assert ix.interpret((), BoundedMax("j", Const(3), Times(Var("j"), Var("j"))), {}) == 4
    assert ix.interpret((), BoundedMax("j", Const(0), Plus(Var("j"), Const(9))), {}) == 0
    assert normalize(BoundedMax("j", Const(3), Plus(Var("j"), Const(1)))) == Const(3)
    assert check_leq(("i",), Var("i"), parse_index("i - 1")) == Refuted({"i": 1})
    assert check_eq(("i",), Var("i"), parse_index("i + 1")) == Refuted({"i": 0})
    return f"normalize 1000x20 exact; {valid} Valid / {refuted} Refuted verdicts sound; unit cases exact"


def criterion_9():
    for path in STDLIB_FILES:
        program = parse(path.read_text())
        assert parse(format_program(program)) == program, path.name
    rng = random.Random(9)
    for k in range(500):
        node = random_term(rng, 4) if k % 2 else random_value(rng, 4)
        assert parse_expr(pretty(node)) == node, pretty(node)
    return f"{len(STDLIB_FILES)} stdlib files and 500 generated trees"


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 10)}


def _record(k):
    try:
        detail = CRITERIA[k]()
    except AssertionError as err:
        RESULTS[k] = (False, str(err).splitlines()[0] if str(err) else "assertion failed")
        raise
    RESULTS[k] = (True, detail)


@pytest.mark.parametrize("k", range(1, 10))
def test_criterion(k):
    _record(k)


def summary_lines() -> list[str]:
    return [f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}" for k, (ok, detail) in sorted(RESULTS.items())]


if __name__ == "__main__":
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    for k in CRITERIA:
        try:
            _record(k)
        except AssertionError:
            pass
        print(summary_lines()[-1], flush=True)
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
