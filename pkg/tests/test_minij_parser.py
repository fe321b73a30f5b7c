import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CALC, CALC_TESTS, TEXT
from report_fault_injector.errors import MiniJTypeError, ParseError
from report_fault_injector.minij import parse, parse_expression, parse_statement, statement_paths, typecheck, unparse
from report_fault_injector.minij.lexer import tokenize
from report_fault_injector.minij.nodes import (
    Assign,
    Binary,
    BoolLit,
    Call,
    Cast,
    FloatLit,
    FuncDecl,
    If,
    Index,
    IntLit,
    Name,
    Postfix,
    StrLit,
    TypeRef,
    Unary,
    VarDecl,
    get_at,
    walk_preorder,
)
from report_fault_injector.minij.parser import ASSIGN_OPS, BINARY_LEVELS


def test_tokenize_kinds():
    kinds = [(t.kind, t.text) for t in tokenize('x += 1.5; // note\n"a\\n"')]
    assert kinds == [
        ("ident", "x"),
        ("op", "+="),
        ("float", "1.5"),
        ("op", ";"),
        ("string", '"a\\n"'),
        ("eof", ""),
    ]


def test_tokenize_tracks_lines():
    tokens = tokenize("a\n  /* multi\nline */ b")
    assert (tokens[1].line, tokens[1].col) == (3, 9)


def test_multiplication_binds_tighter():
    assert parse_expression("1 + 2 * 3") == Binary("+", IntLit(1, "1"), Binary("*", IntLit(2, "2"), IntLit(3, "3")))


def test_subtraction_is_left_associative():
    assert parse_expression("a - b - c") == Binary("-", Binary("-", Name("a"), Name("b")), Name("c"))


def test_assignment_is_right_associative():
    assert parse_expression("a = b = c") == Assign("=", Name("a"), Assign("=", Name("b"), Name("c")))


def test_cast_binds_to_operand():
    expr = parse_expression("(float) x / y")
    assert expr == Binary("/", Cast(TypeRef("float"), Name("x")), Name("y"))


def test_logical_precedence():
    expr = parse_expression("a || b && !c")
    assert expr == Binary("||", Name("a"), Binary("&&", Name("b"), Unary("!", Name("c"))))


def test_postfix_and_index():
    assert parse_expression("xs[i]++") == Postfix("++", Index(Name("xs"), Name("i")))


def test_invalid_assignment_target():
    with pytest.raises(ParseError, match="invalid assignment target"):
        parse_expression("1 = 2")


def test_else_if_chain():
    stmt = parse_statement("if (a) { x = 1; } else if (b) { x = 2; } else { x = 3; }")
    assert isinstance(stmt, If)
    assert isinstance(stmt.orelse, If)
    assert stmt.orelse.orelse is not None


def test_else_if_counts_as_statement():
    unit = parse("void f(bool a, bool b) {\n    if (a) { } else if (b) { return; }\n}\n")
    kinds = [type(get_at(unit, p)).__name__ for p in statement_paths(unit)]
    assert kinds == ["If", "If", "Return"]


@pytest.mark.parametrize(
    "text, message",
    [
        ('string s = "abc;', "unterminated string"),
        ("int x = 1; /* open", "unterminated comment"),
        ("int[] xs = [];", "must not be empty"),
        ("void x;", "void"),
        ("int x = 1 $ 2;", "unexpected character"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(ParseError, match=message):
        parse(text)


def test_missing_semicolon_position():
    with pytest.raises(ParseError) as info:
        parse("int f() {\n    int x = 1\n    return x;\n}\n", path="src/f.mj")
    assert info.value.line == 3
    assert info.value.path == "src/f.mj"
    assert str(info.value).startswith("src/f.mj:3:")


def test_integer_literal_range():
    assert parse_expression("-2147483648") == Unary("-", IntLit(2147483648, "2147483648"))
    with pytest.raises(ParseError, match="out of range"):
        parse_expression("2147483649")


def test_float_literal_keeps_text():
    lit = parse_expression("2.50")
    assert lit == FloatLit(2.5, "2.50")
    assert unparse(lit) == "2.50"


def test_spans_are_one_based():
    expr = parse_expression("a + b")
    assert expr.span.as_tuple() == (1, 1, 1, 6)
    assert (expr.span.start, expr.span.end) == (0, 5)


def test_equality_ignores_span():
    assert parse_expression("x + 1") == parse_expression("x   +\n1")


def test_unit_declarations():
    unit = parse("int limit = 3;\n\n" + CALC)
    assert isinstance(unit.decls[0], VarDecl)
    assert [d.name for d in unit.decls if isinstance(d, FuncDecl)] == ["add", "scale", "half"]


@pytest.mark.parametrize("text", [CALC, TEXT, CALC_TESTS])
def test_canonical_text_round_trips(text):
    assert unparse(parse(text)) == text


def test_unparse_wraps_lower_precedence():
    expr = Binary("*", Binary("+", Name("a"), Name("b")), Name("c"))
    assert unparse(expr) == "(a + b) * c"
    assert unparse(Binary("-", Name("a"), Binary("-", Name("b"), Name("c")))) == "a - (b - c)"
    assert unparse(Unary("-", Unary("-", Name("x")))) == "-(-x)"


def test_string_escapes_round_trip():
    lit = StrLit('say "hi"\n\tthen\\stop')
    assert parse_expression(unparse(lit)) == lit


# property: unparse is a right inverse of parse on expression trees

BINARY_OPS = [op for level in BINARY_LEVELS for op in level]
NAMES = st.sampled_from(["a", "b", "total", "x1", "items"])

leaves = st.one_of(
    st.integers(0, 10_000).map(lambda v: IntLit(v, str(v))),
    st.builds(lambda i, d: FloatLit(float(f"{i}.{d}"), f"{i}.{d}"), st.integers(0, 99), st.sampled_from(["0", "5", "25"])),
    st.booleans().map(BoolLit),
    st.text(alphabet='ab "\\\n\t', max_size=6).map(StrLit),
    NAMES.map(Name),
)
targets = st.one_of(NAMES.map(Name), st.builds(Index, NAMES.map(Name), leaves))


def _extend(children):
    return st.one_of(
        st.builds(Binary, st.sampled_from(BINARY_OPS), children, children),
        st.builds(Unary, st.sampled_from(["-", "!"]), children),
        st.builds(Unary, st.sampled_from(["++", "--"]), targets),
        st.builds(Postfix, st.sampled_from(["++", "--"]), targets),
        st.builds(Cast, st.sampled_from([TypeRef("int"), TypeRef("float")]), children),
        st.builds(lambda f, args: Call(f, tuple(args)), st.sampled_from(["f", "len"]), st.lists(children, max_size=3)),
        st.builds(Index, NAMES.map(Name), children),
        st.builds(Assign, st.sampled_from(ASSIGN_OPS), targets, children),
    )


expressions = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=3000, deadline=None)
@given(expressions)
def test_unparse_then_parse_is_identity(expr):
    assert parse_expression(unparse(expr)) == expr


# property: re-parsing the canonical text of a unit does not change how it type-checks

SIGNATURE = "int f(int a, int b, int[] items, float total, bool x1)"

int_leaves = st.one_of(
    st.sampled_from(["a", "b"]).map(Name),
    st.integers(0, 999).map(lambda v: IntLit(v, str(v))),
    st.just(Cast(TypeRef("int"), Name("total"))),
    st.just(Call("len", (Name("items"),))),
    st.builds(Index, st.just(Name("items")), st.sampled_from(["a", "b"]).map(Name)),
)

int_expressions = st.recursive(
    int_leaves,
    lambda children: st.one_of(
        st.builds(Binary, st.sampled_from(["+", "-", "*", "/", "%", "&", "<<"]), children, children),
        st.builds(Unary, st.just("-"), children),
        st.builds(
            lambda x, y: Call("f", (x, y, Name("items"), Name("total"), Name("x1"))),
            children,
            children,
        ),
    ),
    max_leaves=10,
)


def type_summary(unit):
    """Expression types along the preorder walk, or the type error message."""
    try:
        table = typecheck(unit, "src/f.mj")
    except MiniJTypeError as e:
        return ("error", e.message)
    typed = ((path, table.type_of(node)) for path, node in walk_preorder(unit))
    return tuple((path, str(t)) for path, t in typed if t is not None)


@settings(max_examples=1000, deadline=None)
@given(st.one_of(int_expressions, expressions))
def test_typecheck_survives_reparse(expr):
    unit = parse(f"{SIGNATURE} {{\n    return {unparse(expr)};\n}}\n")
    again = parse(unparse(unit))
    assert again == unit
    assert type_summary(again) == type_summary(unit)


@settings(max_examples=200, deadline=None)
@given(int_expressions)
def test_well_typed_bodies_stay_well_typed(expr):
    unit = parse(f"{SIGNATURE} {{\n    return {unparse(expr)};\n}}\n")
    summary = type_summary(parse(unparse(unit)))
    assert summary[0] != "error"
    assert summary == type_summary(unit)
