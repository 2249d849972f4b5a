import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import random_maps
from orbita.certify import (
    canonical_height,
    certify_descent,
    iterations_for,
    truncation_bound,
)
from orbita.errors import BudgetExceededError, DegreeHypothesisError, NotAMorphismError, PreconditionError
from orbita.orbits import periodic_points
from orbita.projective import HomogForm, Morphism, ProjPoint, evaluate

SQ = Morphism.from_coeffs([1, 0, 0], [0, 0, 1])
C1 = Morphism.from_coeffs([1, 0, -1], [0, 0, 1])
CUBE = Morphism.from_coeffs([1, 0, 0, 0], [0, 0, 0, 1])


def test_certificate_examples():
    c = certify_descent(SQ)
    assert (c.B, c.M) == (1, 1)
    assert c.cofactors.p_x.coeffs == (1, 0) and c.cofactors.q_y.coeffs == (0, 1)
    c = certify_descent(CUBE)
    assert (c.B, c.M) == (1, 1)
    c = certify_descent(C1)
    P = ProjPoint.of(5, 1)
    assert evaluate(C1, P).height == 24
    assert c.B * 24 >= 25
    assert c.holds_at(P, evaluate(C1, P))


def test_certificate_errors():
    x, y, z = (HomogForm.variable(i, 3) for i in range(3))
    with pytest.raises(PreconditionError):
        certify_descent(Morphism([x * x, y * y, z * z]))
    with pytest.raises(NotAMorphismError):
        Morphism.from_coeffs([0, 1, 0], [0, 0, 1])
    with pytest.raises(DegreeHypothesisError):
        Morphism.from_coeffs([1, 1], [0, 1])


def test_certificate_json_fields():
    j = certify_descent(C1).to_json()
    assert j["schema"] == "certificate.v1"
    assert {"d", "B", "M", "resultant", "form_norm", "cofactor_norms"} <= set(j)


@st.composite
def map_and_point(draw):
    d = draw(st.sampled_from((2, 3)))
    F = draw(st.lists(st.integers(-5, 5), min_size=d + 1, max_size=d + 1))
    G = draw(st.lists(st.integers(-5, 5), min_size=d + 1, max_size=d + 1))
    a = draw(st.integers(-10**4, 10**4))
    b = draw(st.integers(-10**4, 10**4))
    return F, G, a, b


@given(map_and_point())
@settings(max_examples=200)
def test_descent_inequality(data):
    F, G, a, b = data
    assume((a, b) != (0, 0))
    try:
        f = Morphism.from_coeffs(F, G)
    except NotAMorphismError:
        return
    c = certify_descent(f)
    P = ProjPoint.of(a, b)
    assert c.B * evaluate(f, P).height >= P.height ** c.degree
    # M is the largest height a periodic point can have
    assert c.M ** (c.degree - 1) <= c.B < (c.M + 1) ** (c.degree - 1)


def test_canonical_height_examples():
    c = certify_descent(SQ)
    v = canonical_height(SQ, ProjPoint.of(2, 1), 1e-6, c)
    assert v.contains(math.log(2))
    assert v.radius <= 1e-6
    assert canonical_height(SQ, ProjPoint.of(1, 1), 1e-6).value == 0
    v = canonical_height(C1, ProjPoint.of(0, 1), 1e-6)
    assert abs(v.value) <= v.radius


def test_canonical_height_errors():
    with pytest.raises(ValueError):
        canonical_height(SQ, ProjPoint.of(2, 1), 0)
    with pytest.raises(BudgetExceededError):
        canonical_height(C1, ProjPoint.of(3, 1), 1e-12, max_bits=64)


def test_truncation_bound_shrinks_geometrically():
    c = certify_descent(C1)
    for n in range(5):
        assert truncation_bound(c, n + 1) == pytest.approx(truncation_bound(c, n) / 2)
    n = iterations_for(c, 1e-6)
    assert 2 * truncation_bound(c, n) <= 1e-6 < 2 * truncation_bound(c, n - 1)


@given(st.integers(-200, 200), st.integers(1, 200))
@settings(max_examples=40, deadline=None)
def test_canonical_height_functional_equation(a, b):
    """h(f(P)) = d h(P) up to the two enclosure radii."""
    f = C1
    c = certify_descent(f)
    P = ProjPoint.of(a, b)
    h0 = canonical_height(f, P, 1e-3, c)
    h1 = canonical_height(f, evaluate(f, P), 1e-3, c)
    assert abs(h1.value - 2 * h0.value) <= h1.radius + 2 * h0.radius
    # the canonical height stays within C/(d-1) of the Weil height
    assert abs(h0.value - P.log_height()) <= c.height_constant / (c.degree - 1) + h0.radius


def test_periodic_points_have_zero_canonical_height():
    for F, G in random_maps(count=6):
        f = Morphism.from_coeffs(F, G)
        c = certify_descent(f)
        for P in periodic_points(f, c).periodic_points():
            v = canonical_height(f, P, 1e-8, c)
            assert abs(v.value) <= v.radius
