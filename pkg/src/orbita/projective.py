"""Points of P^n(Q), Weil heights, and morphisms given by homogeneous forms."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from .arith import BinaryForm, gcd_many, rational_roots, resultant
from .errors import BaseLocusError, BudgetExceededError, DegreeHypothesisError, NotAMorphismError

Exponent = tuple[int, ...]


@dataclass(frozen=True, order=False)
class ProjPoint:
    """Canonical representative: coprime integers, first nonzero coordinate > 0.

    Construct through :func:`normalize` (or ``ProjPoint.of``); the constructor
    only validates.
    """

    coords: tuple[int, ...]

    def __post_init__(self):
        c = self.coords
        if not any(c):
            raise ValueError("the zero vector is not a projective point")
        if gcd_many(c) != 1 or next(x for x in c if x) < 0:
            raise ValueError(f"{c} is not a normalized representative; use normalize()")

    @classmethod
    def of(cls, *coords) -> ProjPoint:
        return normalize(coords)

    @property
    def dimension(self) -> int:
        return len(self.coords) - 1

    @property
    def height(self) -> int:
        """Multiplicative height H = max |x_i|."""
        return max(abs(x) for x in self.coords)

    def log_height(self) -> float:
        return math.log(self.height)

    def sort_key(self):
        return (self.height, self.coords)

    def __lt__(self, other: ProjPoint) -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return "[" + ":".join(str(x) for x in self.coords) + "]"

    def __repr__(self) -> str:
        return f"ProjPoint{self}"


def normalize(coords: Iterable) -> ProjPoint:
    """Clear denominators, divide out the gcd and make the first nonzero entry positive."""
    vals = [Fraction(c) for c in coords]
    if not any(vals):
        raise ValueError("all coordinates are zero")
    lcm = 1
    for v in vals:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in vals]
    g = gcd_many(ints)
    if next(x for x in ints if x) < 0:
        g = -g
    return ProjPoint(tuple(x // g for x in ints))


def height(P: ProjPoint) -> int:
    return P.height


class HomogForm:
    """Homogeneous polynomial in ``nvars`` variables with integer coefficients."""

    __slots__ = ("nvars", "degree", "terms", "_hash")

    def __init__(self, nvars: int, degree: int, terms: Mapping[Exponent, int]):
        clean = {}
        for exp, c in terms.items():
            exp = tuple(exp)
            if len(exp) != nvars:
                raise ValueError(f"exponent {exp} does not have {nvars} entries")
            if sum(exp) != degree:
                raise ValueError(f"monomial {exp} is not of degree {degree}")
            if c:
                clean[exp] = int(c)
        self.nvars = nvars
        self.degree = degree
        self.terms = dict(sorted(clean.items(), reverse=True))
        self._hash = hash((nvars, degree, tuple(self.terms.items())))

    @classmethod
    def variable(cls, i: int, nvars: int) -> HomogForm:
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, 1, {tuple(exp): 1})

    @classmethod
    def constant(cls, c: int, nvars: int) -> HomogForm:
        return cls(nvars, 0, {(0,) * nvars: c})

    @classmethod
    def from_binary(cls, F: BinaryForm) -> HomogForm:
        d = F.degree
        return cls(2, d, {(d - i, i): c for i, c in enumerate(F.coeffs)})

    def to_binary(self) -> BinaryForm:
        if self.nvars != 2:
            raise ValueError("only forms in two variables are binary forms")
        d = self.degree
        return BinaryForm([self.terms.get((d - i, i), 0) for i in range(d + 1)])

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomogForm):
            return NotImplemented
        return (self.nvars, self.degree, self.terms) == (other.nvars, other.degree, other.terms)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"HomogForm({self.nvars}, {self.degree}, {self.terms})"

    def __add__(self, other: HomogForm) -> HomogForm:
        if (self.nvars, self.degree) != (other.nvars, other.degree):
            raise ValueError("can only add forms of equal degree in the same variables")
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return HomogForm(self.nvars, self.degree, out)

    def __neg__(self) -> HomogForm:
        return self.scale(-1)

    def __sub__(self, other: HomogForm) -> HomogForm:
        return self + (-other)

    def scale(self, k: int) -> HomogForm:
        return HomogForm(self.nvars, self.degree, {e: k * c for e, c in self.terms.items()})

    def __mul__(self, other: HomogForm) -> HomogForm:
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        out: dict[Exponent, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return HomogForm(self.nvars, self.degree + other.degree, out)

    def __pow__(self, k: int) -> HomogForm:
        result = HomogForm.constant(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __call__(self, coords: Sequence[int]) -> int:
        total = 0
        for exp, c in self.terms.items():
            t = c
            for x, e in zip(coords, exp):
                if e:
                    t *= x ** e
            total += t
        return total

    def substitute(self, forms: Sequence[HomogForm]) -> HomogForm:
        """Composition self(forms[0], ..., forms[n])."""
        if len(forms) != self.nvars:
            raise ValueError("need one form per variable")
        inner = forms[0]
        deg = self.degree * inner.degree
        acc = HomogForm(inner.nvars, deg, {})
        powers: list[dict[int, HomogForm]] = [{} for _ in forms]
        for exp, c in self.terms.items():
            t = HomogForm.constant(c, inner.nvars)
            for i, e in enumerate(exp):
                if e:
                    if e not in powers[i]:
                        powers[i][e] = forms[i] ** e
                    t = t * powers[i][e]
            acc = acc + t
        return acc

    def l1_norm(self) -> int:
        return sum(abs(c) for c in self.terms.values())

    def max_coeff_bits(self) -> int:
        return max((abs(c).bit_length() for c in self.terms.values()), default=0)

    def monomials(self) -> list[Exponent]:
        return [tuple(e) for e in _all_exponents(self.nvars, self.degree)]


def _all_exponents(nvars: int, degree: int):
    for combo in combinations_with_replacement(range(nvars), degree):
        exp = [0] * nvars
        for i in combo:
            exp[i] += 1
        yield tuple(exp)


class Morphism:
    """A self-map of P^n given by n+1 forms of common degree d >= 2.

    On P^1 the resultant is computed once and must be nonzero.  For n >= 2 the
    empty-base-locus condition is not checked; ``certified`` is False and
    evaluation raises :class:`BaseLocusError` at points where every form
    vanishes.
    """

    def __init__(self, forms: Sequence[HomogForm], name: str | None = None):
        forms = tuple(forms)
        if len(forms) < 2:
            raise ValueError("a self-map of P^n needs at least two forms")
        nvars = len(forms)
        d = forms[0].degree
        for F in forms:
            if F.nvars != nvars:
                raise ValueError(f"each form must use {nvars} variables")
            if F.degree != d:
                raise ValueError("all forms must have the same degree")
        if all(F.is_zero() for F in forms):
            raise NotAMorphismError("all forms are zero")
        if d < 2:
            raise DegreeHypothesisError(f"degree {d} < 2")
        self.forms = forms
        self.degree = d
        self.name = name
        # (g, k) when this map was built as g.power(k)
        self._power_of: tuple[Morphism, int] | None = None
        self.resultant: int | None = None
        if nvars == 2:
            self.resultant = resultant(forms[0].to_binary(), forms[1].to_binary())
            if self.resultant == 0:
                raise NotAMorphismError("resultant is zero: the forms share a root")

    @classmethod
    def from_binary(cls, F: BinaryForm, G: BinaryForm, name: str | None = None) -> Morphism:
        return cls([HomogForm.from_binary(F), HomogForm.from_binary(G)], name=name)

    @classmethod
    def from_coeffs(cls, F: Sequence[int], G: Sequence[int], name: str | None = None) -> Morphism:
        return cls.from_binary(BinaryForm(F), BinaryForm(G), name=name)

    @property
    def dimension(self) -> int:
        return len(self.forms) - 1

    @property
    def certified(self) -> bool:
        return self.dimension == 1

    def binary_forms(self) -> tuple[BinaryForm, BinaryForm]:
        if self.dimension != 1:
            raise ValueError("binary forms only exist for maps of P^1")
        return self.forms[0].to_binary(), self.forms[1].to_binary()

    @cached_property
    def form_norm(self) -> int:
        """max_i ||F_i||_1, the constant in H(f(P)) <= norm * H(P)^d."""
        return max(F.l1_norm() for F in self.forms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Morphism) and self.forms == other.forms

    def __hash__(self) -> int:
        return hash(self.forms)

    def __repr__(self) -> str:
        return f"Morphism({list(self.forms)!r})"

    def image_coords(self, P: ProjPoint) -> tuple[int, ...]:
        if P.dimension != self.dimension:
            raise ValueError(f"point of P^{P.dimension} given to a map of P^{self.dimension}")
        return tuple(F(P.coords) for F in self.forms)

    def __call__(self, P: ProjPoint) -> ProjPoint:
        return evaluate(self, P)

    def compose(self, other: Morphism) -> Morphism:
        """self o other."""
        return Morphism([F.substitute(other.forms) for F in self.forms])

    def power(self, k: int, max_bits: int | None = None) -> Morphism:
        if k < 1:
            raise ValueError("power must be >= 1")
        g = self
        for _ in range(k - 1):
            g = self.compose(g)
            if max_bits is not None and max(F.max_coeff_bits() for F in g.forms) > max_bits:
                raise BudgetExceededError("composition coefficients exceed the bit budget")
        if k > 1:
            g._power_of = (self, k)
        return g


def evaluate(f: Morphism, P: ProjPoint) -> ProjPoint:
    img = f.image_coords(P)
    if not any(img):
        raise BaseLocusError(f"{P} lies in the base locus of the map")
    return normalize(img)


def iterate(f: Morphism, P: ProjPoint, k: int) -> ProjPoint:
    if k < 0:
        raise ValueError("iteration count must be >= 0")
    for _ in range(k):
        P = evaluate(f, P)
    return P


def forward_orbit(f: Morphism, P: ProjPoint, steps: int) -> list[ProjPoint]:
    out = [P]
    for _ in range(steps):
        P = evaluate(f, P)
        out.append(P)
    return out


def preimages_p1(f: Morphism, Q: ProjPoint) -> set[ProjPoint]:
    """Every P in P^1(Q) with f(P) = Q."""
    if f.dimension != 1 or Q.dimension != 1:
        raise ValueError("preimages are only computed on P^1")
    a, b = Q.coords
    F, G = f.binary_forms()
    fiber = F.scale(b) - G.scale(a)
    # fiber is nonzero since Res(F, G) != 0 rules out F, G proportional
    out = set()
    if fiber.coeffs[0] == 0:
        out.add(ProjPoint((1, 0)))
    affine = fiber.dehomogenize()
    if affine.degree > 0:
        for r in rational_roots(affine):
            out.add(normalize((r, 1)))
    return out
