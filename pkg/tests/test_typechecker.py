import pytest

from pqr import syntax as sx
from pqr import typechecker as tc
from pqr.circuit import LabelContext
from pqr.index import Const
from pqr.parser import parse, parse_expr, parse_type
from pqr.solver import Refuted, Unknown, Valid

LATE_FAILURE = (
    "forall i.\n"
    "def f : List[i] Qubit -o[10 - (i - 9),0] List[i] Qubit =\n"
    "  \\qs :: List[i] Qubit . return qs;\n"
)


def check(src, mode=tc.STRICT, budget=8):
    return tc.check_program(parse(src), mode, budget)


def last(src):
    return check(src).definitions[-1]


@pytest.mark.parametrize("name, definition, expected", [
    ("dumbnot", "dumbNot", "Qubit -o[2,0] Qubit"),
    ("hadamardn", "hadamardN", "List[i] Qubit -o[i,0] List[i] Qubit"),
    ("rev", "rev", "List[i] Qubit -o[i,0] List[i] Qubit"),
    ("qlen", "main", "List[i] Qubit -o[i,0] Nat * List[i] Qubit"),
    ("qlen", "qlen", "List[n] Qubit -o[n,0] Nat * List[n] Qubit"),
    ("qft", "qft", "List[i] Qubit -o[i,0] List[i] Qubit"),
    ("qft", "qftStep", "!(List[j] Qubit * Qubit -o[j + 1,0] List[j + 1] Qubit)"),
    ("qft", "rotate", "Nat -o[0,0] Qubit * List[e] Qubit * Qubit -o[e + 2,0] Qubit * List[e + 1] Qubit"),
    ("iter", "iter", "List[n] Unit * Qubit -o[max(1, max[k < n] 2),0] Qubit"),
])
def test_stdlib_types(stdlib, name, definition, expected):
    report = tc.check_program(stdlib(name))
    assert report.ok
    assert report.lookup(definition).type == parse_type(expected)


def test_qft_fold_equalities_are_discharged(stdlib):
    report = tc.check_program(stdlib("qft"))
    folds = {(o.text(), o.verdict) for o in report.lookup("qft").obligations if o.rule == "fold"}
    assert ("forall i j. max(1, max[e < j] e + 2 + (j - 1 - e) * 1) = j + 1", Valid()) in folds
    assert ("forall i. max(0, max[j < i] j + 1 + (i - 1 - j) * 1) = i", Valid()) in folds


def test_qft_with_narrow_annotation_is_refuted(stdlib):
    program = stdlib("qft")
    qft = program.lookup("qft")
    narrow = parse_type("List[i] Qubit -o[i - 1,0] List[i] Qubit")
    bad = sx.Program(program.index_params, program.definitions[:-1] + (sx.Definition("qft", qft.body, (), narrow),))
    report = tc.check_program(bad)
    assert not report.ok
    assert [o.verdict for o in report.refuted] == [Refuted({"i": 1})]


class TestLinearity:
    def test_duplication(self):
        with pytest.raises(tc.TypeCheckError, match="more than once") as err:
            check("def f = \\q :: Qubit . return (q, q);")
        assert err.value.rule == "linearity" and err.value.span == (1, 30)

    def test_discarding(self):
        with pytest.raises(tc.TypeCheckError, match="never used"):
            check("def f = \\q :: Qubit . return ();")

    def test_parameters_are_freely_used(self):
        d = last("def f = \\n :: Nat . return (n, n);")
        assert d.type == parse_type("Nat -o[0,0] Nat * Nat")

    def test_lift_cannot_capture(self):
        with pytest.raises(tc.TypeCheckError, match="lift"):
            check("def f = \\q :: Qubit . return lift return q;")

    def test_closures_count_captured_wires(self):
        d = last("def f = \\q :: Qubit . return \\u :: Unit . return q;")
        assert d.type == parse_type("Qubit -o[1,0] Unit -o[1,1] Qubit")

    def test_fold_step_cannot_capture(self):
        src = ("forall i. def f = \\(q, qs) :: Qubit * List[i] Qubit . (fold[k] (lift return "
               "\\(a, x) :: List[k] Qubit * Qubit . let u = apply(DISCARD, q) in return (x : a)) []) qs;")
        with pytest.raises(tc.TypeCheckError, match="lift captures"):
            check(src)

    def test_lifted_functions_are_duplicable(self):
        src = ("def f = \\(a, b) :: Qubit * Qubit . let g = lift return \\q :: Qubit . apply(H, q) in "
               "let h = force g in let a = h a in let k = force g in let b = k b in return (a, b);")
        assert last(src).type == parse_type("Qubit * Qubit -o[2,0] Qubit * Qubit")


class TestRules:
    def test_apply_argument_type(self):
        with pytest.raises(tc.TypeCheckError, match="expected Qubit \\* Qubit"):
            check("def f = \\q :: Qubit . apply(CNOT, q);")

    def test_box_gives_a_circuit(self):
        d = last("def f = box[Qubit * Qubit] (lift return \\(a, b) :: Qubit * Qubit . apply(CNOT, (a, b)));")
        assert d.type == parse_type("Circ[2](Qubit * Qubit, Qubit * Qubit)") and d.effect == Const(0)

    def test_term_effect(self):
        d = last("def f = let q = apply(INIT0, ()) in let q = apply(H, q) in apply(MEAS, q);")
        assert d.type == sx.BIT and d.effect == Const(1)

    def test_let_effect_accounts_for_live_wires(self):
        src = ("def f = \\a :: Qubit . let b = apply(INIT0, ()) in let c = apply(INIT0, ()) in "
               "let u = apply(DISCARD, b) in let v = apply(DISCARD, c) in return a;")
        assert last(src).type == parse_type("Qubit -o[3,0] Qubit")

    def test_natural_arithmetic(self):
        assert last("def f = let n = 2 + 3 in return n;").type == sx.NAT
        with pytest.raises(tc.TypeCheckError, match="Nat"):
            check("def f = \\q :: Qubit . let n = q + 1 in return n;")

    def test_force_needs_a_lifted_value(self):
        with pytest.raises(tc.TypeCheckError, match="force"):
            check("def f = force ();")

    def test_fold_needs_a_length(self):
        with pytest.raises(tc.TypeCheckError, match="length"):
            check("def f = fold[k] (lift return \\(a, x) :: List[k] Qubit * Qubit . return (x : a)) [];")

    def test_fold_binder_clash_is_renamed(self):
        src = ("forall k. def f : List[k] Qubit -o[k,0] List[k] Qubit = "
               "fold[k] (lift return \\(a, x) :: List[k] Qubit * Qubit . return (x : a)) [];")
        assert last(src).type == parse_type("List[k] Qubit -o[k,0] List[k] Qubit")

    def test_not_a_function(self):
        with pytest.raises(tc.TypeCheckError, match="cannot apply"):
            check("def f = () ();")

    def test_definition_arity(self):
        with pytest.raises(tc.TypeCheckError):
            check("def g[n] = return (); def f = g[1, 2];")


class TestSubtyping:
    def test_wider_arrow_is_a_supertype(self):
        verdict, obligations = tc.check_subtype(("i",), parse_type("Qubit -o[i,0] Qubit"), parse_type("Qubit -o[i + 1,0] Qubit"))
        assert verdict == Valid()

    def test_contravariant_lists(self):
        verdict, _ = tc.check_subtype(("i",), parse_type("List[i] Qubit"), parse_type("List[i + 1] Qubit"))
        assert isinstance(verdict, Refuted)

    def test_shape_mismatch_is_refuted_without_obligations(self):
        assert tc.check_subtype((), sx.QUBIT, sx.BIT) == (Refuted({}), [])


class TestModes:
    def test_strict_rejects_unknown(self):
        report = check(LATE_FAILURE)
        assert not report.ok and report.unknown and isinstance(report.unknown[0].verdict, Unknown)
        assert "error: unverified obligation" in report.text()

    def test_permissive_accepts_unknown_with_a_warning(self):
        report = check(LATE_FAILURE, tc.PERMISSIVE)
        assert report.ok and "warning: unverified obligation" in report.text()

    def test_larger_budget_refutes(self):
        report = check(LATE_FAILURE, budget=10)
        assert report.refuted[0].verdict == Refuted({"i": 10})

    def test_report_json_shape(self, stdlib):
        data = tc.check_program(stdlib("dumbnot")).to_json()
        assert data["status"] == "ok"
        assert data["definitions"] == [{"name": "dumbNot", "type": "Qubit -o[2,0] Qubit", "effect": None, "obligations": []}]
        ob = tc.check_program(stdlib("rev")).lookup("rev").obligations[0].to_json()
        assert list(ob)[:5] == ["ctx", "relation", "lhs", "rhs", "verdict"]


class TestConfiguration:
    def test_result_must_account_for_every_live_label(self):
        value = sx.Label("a", "Qubit")
        assert tc.check_configuration(value, sx.QUBIT, LabelContext({"a": "Qubit"})) == []
        assert tc.check_configuration(value, sx.QUBIT, LabelContext({"a": "Qubit", "b": "Qubit"}))

    def test_result_type_must_match(self):
        value = parse_expr("()")
        assert tc.check_configuration(value, sx.QUBIT, LabelContext({}))


def test_expansion_substitutes_indices(stdlib):
    program = stdlib("qft")
    body = tc.expand(program, program.lookup("qft"))
    assert not any(isinstance(n, sx.DefRef) for n in _walk(body))
    assert "j" in sx.all_index_names(body)


def _walk(n):
    yield n
    for c in sx._children(n):
        yield from _walk(c)
