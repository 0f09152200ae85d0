import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpus import INVALID, VALID
from yangvir.algebra import H, Element, Generator, Params, algebra_for, builtin_table
from yangvir.dsl import load_profile, parse_expression, parse_presentation
from yangvir.errors import AlgebraError, ParseError
from yangvir.presentation import PROFILES, builtin_presentation, profile_source
from yangvir.tensor import TensorElement


@pytest.mark.parametrize("name", sorted(VALID))
def test_valid_corpus(name):
    pres = parse_presentation(VALID[name])
    # canonical text is stable under re-parsing of the same source
    assert parse_presentation(VALID[name]).canonical() == pres.canonical()


@pytest.mark.parametrize("name", sorted(INVALID))
def test_invalid_corpus(name):
    source, line, column, fragment = INVALID[name]
    with pytest.raises(ParseError) as info:
        parse_presentation(source)
    err = info.value
    assert (err.line, err.column) == (line, column)
    assert fragment in err.message
    lines = source.replace("\r\n", "\n").split("\n")
    assert 1 <= err.line <= len(lines)
    assert 1 <= err.column <= len(lines[err.line - 1]) + 1
    assert err.snippet == lines[err.line - 1]


def test_error_rendering():
    with pytest.raises(ParseError) as info:
        parse_presentation("param x = 0.5\n")
    assert str(info.value) == "1:11: floating point literals are not allowed; use a fraction\n  param x = 0.5\n            ^"


@pytest.mark.parametrize("profile", PROFILES)
def test_profiles_match_builtin_tables(profile):
    parsed = load_profile(profile)
    builtin = builtin_presentation(profile)
    assert parsed.canonical() == builtin.canonical()
    assert parsed.table.canonical() == builtin_table(profile).canonical()
    params = builtin.params
    p_alg = algebra_for(parsed.table, params)
    b_alg = algebra_for(builtin_table(profile), params)
    gens = [H] + [Generator(f, m) for f in "ab" for m in range(-4, 5)]
    for x, y in itertools.product(gens, repeat=2):
        assert p_alg.bracket_gen(x, y) == b_alg.bracket_gen(x, y)


def test_empty_presentation():
    pres = parse_presentation("")
    assert pres.table.families == () and pres.cotails == ()
    assert parse_expression("3/4", pres) == Element.scalar(Fraction(3, 4))
    with pytest.raises(ParseError):
        parse_expression("a[1]", pres)


def test_orientation_is_canonical():
    a = parse_presentation(VALID["heisenberg"])
    b = parse_presentation(VALID["reversed_rule"])
    assert a.canonical() == b.canonical()


def test_named_mode_variables_are_renamed():
    a = parse_presentation(VALID["named_mode_var"])
    b = parse_presentation(VALID["default_grade"])
    assert a.canonical() == b.canonical()


def test_delta_normalization():
    a = parse_presentation(VALID["heisenberg"])
    b = parse_presentation(VALID["delta_scaled"])
    assert a.canonical() == b.canonical()


def test_indexed_param_values():
    pres = parse_presentation(VALID["indexed_param"])
    eps = pres.params.as_dict()["eps"]
    assert eps.lookup("eps", 3) == 4 and eps.lookup("eps", -2) == 2 and eps.lookup("eps", 9) == Fraction(1, 2)


class TestExpressions:
    def test_examples(self):
        assert str(parse_expression("comm(b[2], b[-2])")) == "4*b[0] - 8/3*a[0]^3"
        assert str(parse_expression("a[1]*a[-1]")) == "a[-1]*a[1] + a[0]"
        assert str(parse_expression("H^0")) == "1"
        assert str(parse_expression("comm(H, b[5])")) == "5*b[5]"
        assert str(parse_expression("comm(a[0], b[7])")) == "0"

    def test_arithmetic(self):
        assert str(parse_expression("(a[1] + a[2]) * 2 - a[2]/3")) == "2*a[1] + 5/3*a[2]"
        assert str(parse_expression("-(-H)")) == "H"
        assert str(parse_expression("a[0]^3 - a[0]*a[0]*a[0]")) == "0"

    def test_tensor(self):
        t = parse_expression("b[1] (x) 1 + 2 * (a[1] (x) a[0])")
        assert isinstance(t, TensorElement)
        assert t == TensorElement.pure(Generator("b", 1), ()) + TensorElement.pure(Generator("a", 1), Generator("a", 0)) * 2

    def test_parameters(self):
        pres = builtin_presentation("example")
        assert str(parse_expression("comm(b[1], b[-1])", pres, {"eps": 2})) == "2*b[0] - 4/3*a[0]^3"

    @pytest.mark.parametrize(
        "source, fragment",
        [
            ("q[1]", "unknown generator family"),
            ("a[x]", "integer literal"),
            ("a[1", "unclosed"),
            ("a[1] +", "unexpected end"),
            ("a", "needs a mode"),
            ("H[1]", "takes no mode"),
            ("delta(1)", "delta"),
            ("a[1] / a[2]", "division"),
            ("a[1] / 0", "division"),
            ("1.5", "floating point"),
            ("", "empty"),
            ("a[1] a[2]", "unexpected"),
            ("a[1] + a[1] (x) a[1]", "tensor"),
            ("a[1]^99", "exponent"),
            ("a[99999999999999999999]", "64-bit"),
        ],
    )
    def test_errors(self, source, fragment):
        with pytest.raises(ParseError) as info:
            parse_expression(source)
        assert fragment in info.value.message

    def test_deep_nesting(self):
        with pytest.raises(ParseError):
            parse_expression("(" * 5000 + "H" + ")" * 5000)


printable = st.text(alphabet=st.sampled_from(list("ab H[]()+-*/^,=:;{}0123456789mn#.\n x(x)delta comm")), max_size=60)


@given(printable)
def test_presentation_fuzz_never_crashes(source):
    try:
        parse_presentation(source)
    except ParseError as err:
        assert err.line >= 1 and err.column >= 1


@given(printable)
def test_expression_fuzz_never_crashes(source):
    try:
        parse_expression(source)
    except (ParseError, AlgebraError):
        pass


@given(st.text(max_size=40))
def test_arbitrary_text(source):
    try:
        parse_presentation(source)
    except ParseError:
        pass


def test_profile_source_matches_files():
    assert "cotail b[m]" in profile_source("example")
    with pytest.raises(ValueError):
        profile_source("nope")


def test_round_trip_renderings():
    alg = algebra_for(builtin_table("example"), Params.of({"eps": 1, "alpha": 0, "beta": 0}))
    gens = [H] + [Generator(f, m) for f in "ab" for m in range(-2, 3)]
    for x, y in itertools.product(gens, repeat=2):
        e = alg.multiply(Element.of(x), Element.of(y)) + alg.bracket_gen(x, y)
        assert parse_expression(str(e)) == e
