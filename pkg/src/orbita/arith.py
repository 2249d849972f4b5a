"""Exact integer/rational arithmetic and the small amount of polynomial algebra
the dynamics code needs: binary forms, Sylvester resultants and cofactors,
rational roots of integer polynomials.

Python's ``int`` and ``fractions.Fraction`` already give unbounded integers and
rationals in lowest terms, so they are used directly as BigInt / BigRat.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

from .errors import NotAMorphismError


def gcd(a: int, b: int) -> int:
    """Nonnegative gcd; gcd(0, 0) = 0."""
    return math.gcd(a, b)


def gcd_many(values: Iterable[int]) -> int:
    return reduce(math.gcd, values, 0)


def iroot_floor(n: int, k: int) -> int:
    """Largest r with r**k <= n."""
    if k < 1:
        raise ValueError("root index must be >= 1")
    if n < 0:
        raise ValueError("cannot take a root of a negative number")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    # Newton from above: start at a power of two >= the true root
    r = 1 << -(-n.bit_length() // k)
    while True:
        s = ((k - 1) * r + n // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r ** k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def divisors(n: int) -> list[int]:
    """Positive divisors of |n| (n != 0)."""
    from sympy import divisors as _divisors

    return [int(d) for d in _divisors(abs(n))]


@dataclass(frozen=True)
class UniPoly:
    """Integer polynomial; ``coeffs[i]`` is the coefficient of x**i."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Sequence[int]):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(x) for x in c))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def content(self) -> int:
        return gcd_many(self.coeffs)

    def primitive(self) -> UniPoly:
        """Primitive part with positive leading coefficient."""
        if self.is_zero():
            return self
        c = self.content
        if self.coeffs[-1] < 0:
            c = -c
        return UniPoly([x // c for x in self.coeffs])

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def vanishes_at(self, r: Fraction) -> bool:
        """Exact test p(r) == 0, evaluated homogeneously in integers."""
        p, q = r.numerator, r.denominator
        n = self.degree
        return sum(c * p ** i * q ** (n - i) for i, c in enumerate(self.coeffs)) == 0


@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous form sum_i c_i x^(d-i) y^i in two variables."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Sequence[int]):
        c = tuple(int(x) for x in coeffs)
        if not c:
            raise ValueError("a binary form needs at least one coefficient")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __call__(self, x, y):
        d = self.degree
        return sum(c * x ** (d - i) * y ** i for i, c in enumerate(self.coeffs))

    def __add__(self, other: BinaryForm) -> BinaryForm:
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return BinaryForm([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: BinaryForm) -> BinaryForm:
        return self + other.scale(-1)

    def __mul__(self, other: BinaryForm) -> BinaryForm:
        out = [0] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return BinaryForm(out)

    def scale(self, k: int) -> BinaryForm:
        return BinaryForm([k * c for c in self.coeffs])

    def l1_norm(self) -> int:
        return sum(abs(c) for c in self.coeffs)

    def dehomogenize(self) -> UniPoly:
        """Set y = 1; the result is a polynomial in x."""
        return UniPoly(self.coeffs[::-1])

    @classmethod
    def monomial(cls, degree: int, y_power: int, coeff: int = 1) -> BinaryForm:
        c = [0] * (degree + 1)
        c[y_power] = coeff
        return cls(c)

    def __str__(self) -> str:
        d = self.degree
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in (("x", d - i), ("y", i)) if e
            )
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}*{mono}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def solve_exact(matrix: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[Fraction]:
    """Solve A z = b over Q.

    Forward elimination is fraction-free (Bareiss) on the augmented matrix, so
    every intermediate entry is an integer minor; only the back substitution
    divides.  Raises ``ZeroDivisionError`` if A is singular.
    """
    n = len(matrix)
    m = [list(row) + [b] for row, b in zip(matrix, rhs)]
    prev = 1
    for k in range(n):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    break
            else:
                raise ZeroDivisionError("singular system")
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = pivot
    z = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = m[i][n] - sum(m[i][j] * z[j] for j in range(i + 1, n))
        z[i] = Fraction(s) / m[i][i]
    return z


def sylvester_matrix(F: BinaryForm, G: BinaryForm) -> list[list[int]]:
    """Rows: deg G shifts of F's coefficients, then deg F shifts of G's."""
    m, n = F.degree, G.degree
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + list(F.coeffs) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(G.coeffs) + [0] * (size - n - 1 - i))
    return rows


def _check_pair(F: BinaryForm, G: BinaryForm) -> int:
    if F.degree != G.degree:
        raise ValueError(f"degree mismatch: {F.degree} vs {G.degree}")
    if F.degree < 1:
        raise ValueError("forms must have degree >= 1")
    return F.degree


def resultant(F: BinaryForm, G: BinaryForm) -> int:
    _check_pair(F, G)
    return bareiss_det(sylvester_matrix(F, G))


@dataclass(frozen=True)
class Cofactors:
    """p_x F + q_x G = res * x^(2d-1) and p_y F + q_y G = res * y^(2d-1)."""

    res: int
    p_x: BinaryForm
    q_x: BinaryForm
    p_y: BinaryForm
    q_y: BinaryForm

    def x_norm(self) -> int:
        return self.p_x.l1_norm() + self.q_x.l1_norm()

    def y_norm(self) -> int:
        return self.p_y.l1_norm() + self.q_y.l1_norm()


def solve_sylvester_cofactors(F: BinaryForm, G: BinaryForm) -> Cofactors:
    d = _check_pair(F, G)
    size = 2 * d
    # Column j < d: coefficients of x^(d-1-j) y^j * F; column d + j: same for G.
    # That is the transpose of the Sylvester matrix, so det = Res(F, G).
    cols = sylvester_matrix(F, G)
    A = [[cols[j][k] for j in range(size)] for k in range(size)]
    res = bareiss_det(A)
    if res == 0:
        raise NotAMorphismError("resultant vanishes: forms share a common root")

    def solve(target: int) -> tuple[BinaryForm, BinaryForm]:
        rhs = [0] * size
        rhs[target] = res
        z = solve_exact(A, rhs)
        # Cramer: z_j = det(A_j) * res / det(A) = det(A_j), an integer
        if any(v.denominator != 1 for v in z):
            raise ArithmeticError("non-integral cofactor; Sylvester solve is inconsistent")
        ints = [int(v) for v in z]
        return BinaryForm(ints[:d]), BinaryForm(ints[d:])

    p_x, q_x = solve(0)
    p_y, q_y = solve(size - 1)
    out = Cofactors(res, p_x, q_x, p_y, q_y)
    x_rhs = BinaryForm.monomial(size - 1, 0, res)
    y_rhs = BinaryForm.monomial(size - 1, size - 1, res)
    if p_x * F + q_x * G != x_rhs or p_y * F + q_y * G != y_rhs:
        raise ArithmeticError("cofactor identity failed verification")
    return out


def rational_roots(p: UniPoly) -> set[Fraction]:
    """All distinct rational roots, via the rational root theorem."""
    if p.is_zero():
        raise ValueError("the zero polynomial has every rational number as a root")
    prim = p.primitive()
    coeffs = list(prim.coeffs)
    roots: set[Fraction] = set()
    if coeffs[0] == 0:
        roots.add(Fraction(0))
        while coeffs[0] == 0:
            coeffs.pop(0)
    q = UniPoly(coeffs)
    if q.degree < 1:
        return roots
    nums = divisors(q.coeffs[0])
    dens = divisors(q.coeffs[-1])
    for den in dens:
        for num in nums:
            if math.gcd(num, den) != 1:
                continue
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if q.vanishes_at(cand):
                    roots.add(cand)
    return roots
