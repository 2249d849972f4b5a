"""Short Weierstrass curves over Q: exact group law, Lutz-Nagell torsion, and
the product / affine maps used to exhibit infinite periodic sets."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .arith import UniPoly, divisors, rational_roots
from .errors import NotOnCurveError, PreconditionError, TorsionPointError

# Mazur: a torsion point of E(Q) has order <= 12 and #E(Q)_tors <= 16
MAZUR_MAX_ORDER = 12
MAZUR_MAX_SIZE = 16


@dataclass(frozen=True)
class ECPoint:
    """Affine point (x, y), or the identity when ``x is None``."""

    x: Fraction | None = None
    y: Fraction | None = None

    @classmethod
    def affine(cls, x, y) -> ECPoint:
        return cls(Fraction(x), Fraction(y))

    @property
    def is_identity(self) -> bool:
        return self.x is None

    def sort_key(self):
        if self.is_identity:
            return (0, Fraction(0), Fraction(0))
        return (1, self.x, self.y)

    def __str__(self) -> str:
        if self.is_identity:
            return "O"
        return f"({self.x}, {self.y})"


O = ECPoint()


@dataclass(frozen=True)
class EllipticCurve:
    """y^2 = x^3 + a x + b with integer a, b and nonzero discriminant."""

    a: int
    b: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise ValueError(f"y^2 = x^3 + {self.a}x + {self.b} is singular")

    @property
    def discriminant(self) -> int:
        return -16 * (4 * self.a ** 3 + 27 * self.b ** 2)

    def contains(self, P: ECPoint) -> bool:
        return P.is_identity or P.y ** 2 == P.x ** 3 + self.a * P.x + self.b

    def check(self, P: ECPoint) -> ECPoint:
        if not self.contains(P):
            raise NotOnCurveError(f"{P} is not on {self}")
        return P

    def point(self, x, y) -> ECPoint:
        return self.check(ECPoint.affine(x, y))

    def __str__(self) -> str:
        s = "y^2 = x^3"
        if self.a:
            mag = "" if abs(self.a) == 1 else str(abs(self.a))
            s += f" {'+' if self.a > 0 else '-'} {mag}x"
        if self.b:
            s += f" {'+' if self.b > 0 else '-'} {abs(self.b)}"
        return s

    # group law

    def neg(self, P: ECPoint) -> ECPoint:
        return P if P.is_identity else ECPoint(P.x, -P.y)

    def add(self, P: ECPoint, Q: ECPoint) -> ECPoint:
        self.check(P)
        self.check(Q)
        return self._add(P, Q)

    def _add(self, P: ECPoint, Q: ECPoint) -> ECPoint:
        if P.is_identity:
            return Q
        if Q.is_identity:
            return P
        if P.x == Q.x:
            if P.y != Q.y or P.y == 0:
                return O
            slope = (3 * P.x ** 2 + self.a) / (2 * P.y)
        else:
            slope = (Q.y - P.y) / (Q.x - P.x)
        x3 = slope ** 2 - P.x - Q.x
        y3 = slope * (P.x - x3) - P.y
        return ECPoint(x3, y3)

    def mul(self, m: int, P: ECPoint) -> ECPoint:
        self.check(P)
        if m < 0:
            return self.neg(self.mul(-m, P))
        result, addend = O, P
        while m:
            if m & 1:
                result = self._add(result, addend)
            addend = self._add(addend, addend)
            m >>= 1
        return result

    def order(self, P: ECPoint, limit: int = MAZUR_MAX_ORDER) -> int | None:
        """Order of P if it is at most ``limit``, else None."""
        self.check(P)
        Q = P
        for k in range(1, limit + 1):
            if Q.is_identity:
                return k
            Q = self._add(Q, P)
        return None


def ec_add(E: EllipticCurve, P: ECPoint, Q: ECPoint) -> ECPoint:
    return E.add(P, Q)


def ec_mul(E: EllipticCurve, m: int, P: ECPoint) -> ECPoint:
    return E.mul(m, P)


# --- torsion ---------------------------------------------------------------


@dataclass(frozen=True)
class TorsionGroup:
    curve: EllipticCurve
    points: tuple[ECPoint, ...]
    orders: dict

    @property
    def structure(self) -> str:
        n = len(self.points)
        two_torsion = sum(1 for P in self.points if self.orders[P] in (1, 2))
        if two_torsion == 4:
            return f"Z/2 x Z/{n // 2}"
        return f"Z/{n}"

    @property
    def exponent(self) -> int:
        return math.lcm(*self.orders.values())

    def __contains__(self, P: ECPoint) -> bool:
        return P in self.orders

    def __len__(self) -> int:
        return len(self.points)


def _integer_x_with(E: EllipticCurve, y2: int) -> list[int]:
    """Integers x with x^3 + a x + b = y2."""
    cubic = UniPoly([E.b - y2, E.a, 0, 1])
    return sorted(int(r) for r in rational_roots(cubic) if r.denominator == 1)


def lutz_nagell_candidates(E: EllipticCurve) -> list[ECPoint]:
    """Integral points with y = 0 or y^2 | disc (a superset of the torsion)."""
    disc = E.discriminant
    ys = [0] + [y for y in divisors(disc) if disc % (y * y) == 0]
    out = []
    for y in ys:
        for x in _integer_x_with(E, y * y):
            out.append(ECPoint.affine(x, y))
            if y:
                out.append(ECPoint.affine(x, -y))
    return out


def torsion_group(E: EllipticCurve) -> TorsionGroup:
    orders = {O: 1}
    for P in lutz_nagell_candidates(E):
        k = E.order(P)
        if k is not None:
            orders[P] = k
    pts = tuple(sorted(orders, key=ECPoint.sort_key))
    for P in pts:
        for Q in pts:
            if E.add(P, Q) not in orders:
                raise ArithmeticError("torsion candidates are not closed under addition")
    if len(pts) > MAZUR_MAX_SIZE:
        raise ArithmeticError("torsion group larger than Mazur's bound")
    return TorsionGroup(E, pts, orders)


def is_torsion(E: EllipticCurve, P: ECPoint) -> bool:
    """Exact torsion test for a rational point.

    A non-integral point, or an integral one with y != 0 and y^2 not dividing
    the discriminant, has infinite order by Lutz-Nagell; otherwise search the
    order up to Mazur's bound.
    """
    E.check(P)
    if P.is_identity:
        return True
    if P.x.denominator != 1 or P.y.denominator != 1:
        return False
    y = int(P.y)
    if y != 0 and E.discriminant % (y * y) != 0:
        return False
    return E.order(P) is not None


# --- dynamics of [m] --------------------------------------------------------


@dataclass
class MultiplicationDynamics:
    """Periodic points and backward chains of [m] inside E(Q)_tors."""

    curve: EllipticCurve
    m: int
    torsion: TorsionGroup
    periodic: list[ECPoint]
    chains: dict  # x0 -> (x0, x1, ..., x_{p-1}) with [m] x_{n+1} = x_n

    @property
    def inverse_limit_size(self) -> int:
        return len(self.chains)

    def chain_term(self, x0: ECPoint, n: int) -> ECPoint:
        c = self.chains[x0]
        return c[n % len(c)]


def periodic_under_mult(E: EllipticCurve, m: int, torsion: TorsionGroup | None = None) -> MultiplicationDynamics:
    """Periodic points of [m] on E(Q), all of which are torsion.

    These are the torsion points of order prime to m; each has a unique
    backward chain, obtained by walking its [m]-cycle backwards.
    """
    if abs(m) < 2:
        raise PreconditionError("multiplier must satisfy |m| >= 2")
    if torsion is None:
        torsion = torsion_group(E)
    image = {P: E.mul(m, P) for P in torsion.points}
    periodic = []
    for P in torsion.points:
        Q = image[P]
        for _ in range(len(torsion.points)):
            if Q == P:
                periodic.append(P)
                break
            Q = image[Q]
    preimage_on_cycle = {image[P]: P for P in periodic}
    chains = {}
    for P in periodic:
        chain = [P]
        Q = preimage_on_cycle[P]
        while Q != P:
            chain.append(Q)
            Q = preimage_on_cycle[Q]
        chains[P] = tuple(chain)
    for P in periodic:
        if math.gcd(torsion.orders[P], m) != 1:
            raise ArithmeticError(f"{P} periodic under [{m}] but order not prime to m")
    return MultiplicationDynamics(E, m, torsion, periodic, chains)


# --- products E1 x E2 -----------------------------------------------------------


@dataclass(frozen=True)
class ProductSystem:
    """(P, Q) -> ([m1] P + T, [m2] Q) on E1 x E2."""

    e1: EllipticCurve
    e2: EllipticCurve
    m1: int = 1
    translation: ECPoint = O
    m2: int = 2

    def __post_init__(self):
        self.e1.check(self.translation)
        if self.m1 == 0 or self.m2 == 0:
            raise ValueError("multipliers must be nonzero")
        if (self.m1 * self.m2) ** 2 < 2:
            raise ValueError("the map must have degree >= 2")

    @property
    def degree(self) -> int:
        return (self.m1 * self.m2) ** 2

    def __call__(self, point: tuple[ECPoint, ECPoint]) -> tuple[ECPoint, ECPoint]:
        return product_evaluate(self, point)


def product_evaluate(sys: ProductSystem, point: tuple[ECPoint, ECPoint]) -> tuple[ECPoint, ECPoint]:
    P, Q = point
    return sys.e1.add(sys.e1.mul(sys.m1, P), sys.translation), sys.e2.mul(sys.m2, Q)


def build_d_plus_one_map(e1: EllipticCurve, e2: EllipticCurve, d: int) -> ProductSystem:
    """([d+1] P, Q): fixes (O, Q) for every Q, so E2(Q) infinite gives infinitely many periodic points."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return ProductSystem(e1, e2, m1=d + 1, translation=O, m2=1)


@dataclass(frozen=True)
class ChainReport:
    depth: int
    points: tuple
    relation_holds: bool
    distinct: bool

    @property
    def verified(self) -> bool:
        return self.relation_holds and self.distinct


def translation_chain(sys: ProductSystem, n: int) -> tuple[ECPoint, ECPoint]:
    """x_n = (-[n] T, O)."""
    return sys.e1.mul(-n, sys.translation), O


def verify_backward_chain(sys: ProductSystem, depth: int, generator=None) -> ChainReport:
    """Check f(x_{n+1}) = x_n for n < depth and that x_0..x_depth are distinct.

    Distinct first coordinates also rule out periodicity along the chain.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if is_torsion(sys.e1, sys.translation):
        raise TorsionPointError(f"translation {sys.translation} is torsion; the chain would close up")
    gen = generator or (lambda n: translation_chain(sys, n))
    pts = tuple(gen(n) for n in range(depth + 1))
    relation = all(product_evaluate(sys, pts[n + 1]) == pts[n] for n in range(depth))
    firsts = [p[0] for p in pts]
    distinct = len(set(firsts)) == len(firsts)
    return ChainReport(depth, pts, relation, distinct)


# --- affine maps x -> [m] x + a --------------------------------------------------


@dataclass(frozen=True)
class AffineECMap:
    curve: EllipticCurve
    m: int
    offset: ECPoint = O

    def __post_init__(self):
        if abs(self.m) < 2:
            raise ValueError("multiplier must satisfy |m| >= 2")
        self.curve.check(self.offset)

    def __call__(self, P: ECPoint) -> ECPoint:
        E = self.curve
        return E.add(E.mul(self.m, P), self.offset)

    def iterate(self, P: ECPoint, k: int) -> ECPoint:
        for _ in range(k):
            P = self(P)
        return P


def return_time(fmap: AffineECMap, max_l: int = 64) -> int | None:
    """Least l >= 1 with f^l(O) = O, if one exists up to max_l."""
    P = O
    for l in range(1, max_l + 1):
        P = fmap(P)
        if P.is_identity:
            return l
    return None


@dataclass(frozen=True)
class TorsionImageVerdict:
    offset_torsion: bool
    images: dict
    preserves_torsion: bool

    @property
    def holds(self) -> bool:
        return self.offset_torsion and self.preserves_torsion


def torsion_image_property(fmap: AffineECMap, l: int, torsion: TorsionGroup | None = None) -> TorsionImageVerdict:
    """Given f^l(O) = O, check that f(O) is torsion and f(E_tors) lies in E_tors."""
    if l < 1 or not fmap.iterate(O, l).is_identity:
        raise PreconditionError(f"f^{l}(O) != O")
    E = fmap.curve
    if torsion is None:
        torsion = torsion_group(E)
    images = {P: fmap(P) for P in torsion.points}
    return TorsionImageVerdict(
        offset_torsion=fmap.offset in torsion,
        images=images,
        preserves_torsion=all(Q in torsion for Q in images.values()),
    )


@dataclass(frozen=True)
class AffineProductMap:
    """(x, y) -> ([m1] x + a1, [m2] y + a2) on E1 x E2."""

    e1: EllipticCurve
    e2: EllipticCurve
    m1: int
    m2: int
    a1: ECPoint = O
    a2: ECPoint = O

    def __call__(self, point: tuple[ECPoint, ECPoint]) -> tuple[ECPoint, ECPoint]:
        x, y = point
        return (
            self.e1.add(self.e1.mul(self.m1, x), self.a1),
            self.e2.add(self.e2.mul(self.m2, y), self.a2),
        )

    def iterate(self, point, k: int):
        for _ in range(k):
            point = self(point)
        return point

    def is_torsion(self, point) -> bool:
        return is_torsion(self.e1, point[0]) and is_torsion(self.e2, point[1])


@dataclass(frozen=True)
class ProductCounterexample:
    returns_to_origin: bool
    image_of_origin: tuple
    image_is_torsion: bool

    @property
    def confirms(self) -> bool:
        """True when f^2(0, 0) = (0, 0) while f(0, 0) is not torsion."""
        return self.returns_to_origin and not self.image_is_torsion


def product_torsion_counterexample(E: EllipticCurve, a: ECPoint) -> ProductCounterexample:
    """f(x, y) = (2x, -y + a) on E x E with a of infinite order."""
    if is_torsion(E, a):
        raise TorsionPointError(f"{a} is torsion")
    f = AffineProductMap(E, E, 2, -1, O, a)
    origin = (O, O)
    image = f(origin)
    return ProductCounterexample(
        returns_to_origin=f.iterate(origin, 2) == origin,
        image_of_origin=image,
        image_is_torsion=f.is_torsion(image),
    )


def distinct(points: Iterable) -> bool:
    pts = list(points)
    return len(set(pts)) == len(pts)
