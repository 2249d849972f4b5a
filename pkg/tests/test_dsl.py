import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbita.dsl import DslError, format_form, format_map, parse, print_document
from orbita.elliptic import O, EllipticCurve, ProductSystem
from orbita.errors import NotAMorphismError
from orbita.projective import HomogForm, Morphism, ProjPoint


def only_diag(src):
    with pytest.raises(DslError) as info:
        parse(src)
    diags = info.value.diagnostics
    assert diags
    for d in diags:
        lines = src.splitlines()
        assert 1 <= d.line <= len(lines)
        assert 1 <= d.column <= len(lines[d.line - 1]) + 1
    return diags


def test_parse_map_example():
    doc = parse("map f : P1 -> P1 = [x0^2 - x1^2, x1^2]")
    f = doc.maps["f"]
    assert f.degree == 2
    assert f == Morphism.from_coeffs([1, 0, -1], [0, 0, 1])


def test_rejection_examples():
    d = only_diag("map g : P1 -> P1 = [x0^2, x0*x1]")
    assert "resultant" in d[0].message
    d = only_diag("map h : P1 -> P1 = [x0^2 + x1, x1^2]")
    assert "homogeneous" in d[0].message and d[0].column == 28
    d = only_diag("map k : P1 -> P1 = [x0^2 + , x1^2]")
    assert d[0].column == 28


def test_more_rejections():
    assert "degree" in only_diag("map a : P1 -> P1 = [x0^2, x1^3]")[0].message
    assert only_diag("map a : P1 -> P2 = [x0^2, x1^2]")
    assert only_diag("map a : P1 -> P1 = [x0^2, x1^2, x0*x1]")
    assert only_diag("map a : P1 -> P1 = [x0^2, x2^2]")
    assert only_diag("map a : P1 -> P1 = [x0, x1]")
    assert only_diag("curve E = [0, 0]")
    assert only_diag("curve E = [0, 1]\npoint P on E = [1 : 1]")
    assert only_diag("point P on E = O")
    # a second error on a later line is also reported, with its position
    d = only_diag("map a : P1 -> P1 = [x0^2, x0*x1]\nmap a : P1 -> P1 = [x0^2, x1^2]\nmap a : P1 -> P1 = [x0^2, x1^2]")
    assert {x.line for x in d} >= {1, 3}


def test_diagnostic_rendering():
    d = only_diag("# comment\nmap h : P1 -> P1 = [x0^2 + x1, x1^2]")[0]
    text = str(d)
    assert "2:28" in text
    assert "^" in text
    assert d.excerpt.strip().startswith("map h")


def test_points_curves_products():
    doc = parse(
        """
        curve E = [0, -2]
        point G on E = [3 : 5]
        point Z on E = O
        point p = [1/2 : -3 : 0]
        product s on E x E = ([1] + G, [2])
        """
    )
    E = EllipticCurve(0, -2)
    assert doc.curves["E"] == E
    assert doc["G"] == E.point(3, 5)
    assert doc["Z"] == O
    assert doc["p"] == ProjPoint.of(1, -6, 0)
    s = doc["s"]
    assert isinstance(s, ProductSystem)
    assert (s.m1, s.translation, s.m2) == (1, E.point(3, 5), 2)


def test_big_integers_and_comments():
    src = "map b : P1 -> P1 = [99999999999999999999999999*x0^2 + x1^2, x1^2]  # big\n"
    f = parse(src).maps["b"]
    assert f.forms[0].terms[(2, 0)] == 99999999999999999999999999


def test_print_is_parseable():
    x, y = HomogForm.variable(0, 2), HomogForm.variable(1, 2)
    f = Morphism([(x * x).scale(-3) + x * y, y * y - x * x])
    text = format_map("f", f)
    assert parse(text).maps["f"] == f
    assert format_form(x * x - (y * y).scale(2)) == "x0^2 - 2*x1^2"


@st.composite
def p1_maps(draw):
    d = draw(st.integers(2, 4))
    F = draw(st.lists(st.integers(-10**6, 10**6), min_size=d + 1, max_size=d + 1))
    G = draw(st.lists(st.integers(-9, 9), min_size=d + 1, max_size=d + 1))
    return F, G


@given(p1_maps())
@settings(max_examples=100)
def test_round_trip_property(data):
    F, G = data
    try:
        f = Morphism.from_coeffs(F, G)
    except NotAMorphismError:
        return
    doc = parse(format_map("m", f))
    assert doc.maps["m"] == f
    assert parse(print_document(doc)) == doc


@given(st.text(alphabet="map fPx01^*+-[],:=>\n ", max_size=60))
@settings(max_examples=200)
def test_garbage_never_crashes(src):
    try:
        parse(src)
    except DslError as e:
        lines = src.splitlines() or [""]
        for d in e.diagnostics:
            assert 1 <= d.line <= max(len(lines), 1)
            assert d.column >= 1
