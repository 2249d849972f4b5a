"""Descent certificates and canonical heights for maps of P^1.

For a morphism f = [F : G] of degree d with Res = Res(F, G) != 0 the Sylvester
cofactors give

    p_x F + q_x G = Res x^(2d-1),    p_y F + q_y G = Res y^(2d-1).

At a coprime integer point P = (a, b) put g = gcd(F(P), G(P)).  Evaluating
both identities and bounding each side gives

    |Res| H(P)^(2d-1) <= B H(P)^(d-1) g H(f(P)),   B = max(|p_x|+|q_x|, |p_y|+|q_y|)

with |.| the coefficient L1 norm.  Since g divides Res (it divides
Res a^(2d-1) and Res b^(2d-1)), H(f(P)) >= H(P)^d / B.  Consequently any P
with H(P)^(d-1) > B has H(f(P)) > H(P), and every periodic point has
H(P) <= M = floor(B^(1/(d-1))).
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

from .arith import Cofactors, iroot_floor, solve_sylvester_cofactors
from .errors import BudgetExceededError, DegreeHypothesisError, PreconditionError
from .projective import Morphism, ProjPoint, evaluate

CERTIFICATE_SCHEMA = "certificate.v1"
DEFAULT_MAX_BITS = 1 << 22


@dataclass(frozen=True)
class DescentCertificate:
    degree: int
    B: int
    M: int
    resultant: int
    form_norm: int
    cofactor_norms: dict = field(compare=False)
    cofactors: Cofactors = field(repr=False, compare=False)

    def holds_at(self, P: ProjPoint, image: ProjPoint) -> bool:
        """Exact check of B * H(f(P)) >= H(P)^d."""
        return self.B * image.height >= P.height ** self.degree

    @property
    def height_constant(self) -> float:
        """C with |log H(f(P)) - d log H(P)| <= C for every P."""
        return max(math.log(self.B), math.log(self.form_norm))

    def to_json(self) -> dict:
        return {
            "schema": CERTIFICATE_SCHEMA,
            "d": self.degree,
            "B": self.B,
            "M": self.M,
            "resultant": self.resultant,
            "form_norm": self.form_norm,
            "cofactor_norms": {k: list(v) for k, v in self.cofactor_norms.items()},
        }


def certify_descent(f: Morphism) -> DescentCertificate:
    if f.dimension != 1:
        raise PreconditionError("descent certificates are only available on P^1")
    d = f.degree
    if d < 2:
        raise DegreeHypothesisError(f"degree {d} < 2")
    F, G = f.binary_forms()
    cof = solve_sylvester_cofactors(F, G)
    B = max(cof.x_norm(), cof.y_norm())
    M = iroot_floor(B, d - 1)
    norms = {
        "x": (cof.p_x.l1_norm(), cof.q_x.l1_norm()),
        "y": (cof.p_y.l1_norm(), cof.q_y.l1_norm()),
    }
    return DescentCertificate(
        degree=d,
        B=B,
        M=M,
        resultant=cof.res,
        form_norm=f.form_norm,
        cofactor_norms=norms,
        cofactors=cof,
    )


@dataclass(frozen=True)
class CanonicalHeightValue:
    value: float
    radius: float
    iterations: int

    def contains(self, x: float) -> bool:
        return abs(self.value - x) <= self.radius


def truncation_bound(cert: DescentCertificate, n: int) -> float:
    """C / (d^n (d-1)): distance from log H(f^n P) / d^n to the canonical height."""
    d = cert.degree
    return cert.height_constant / (d ** n * (d - 1))


def iterations_for(cert: DescentCertificate, target_radius: float) -> int:
    """Smallest n whose truncation bound, doubled for rounding slack, fits the target."""
    n = 0
    while 2 * truncation_bound(cert, n) > target_radius:
        n += 1
    return n


def canonical_height(
    f: Morphism,
    P: ProjPoint,
    target_radius: float,
    cert: DescentCertificate | None = None,
    max_bits: int = DEFAULT_MAX_BITS,
) -> CanonicalHeightValue:
    """Tate limit log H(f^N P) / d^N with a rigorous enclosure radius."""
    if not target_radius > 0:
        raise ValueError("target radius must be positive")
    if cert is None:
        cert = certify_descent(f)
    d = cert.degree
    n = iterations_for(cert, target_radius)
    Q = P
    steps = 0
    while True:
        while steps < n:
            Q = evaluate(f, Q)
            steps += 1
            if Q.height.bit_length() > max_bits:
                raise BudgetExceededError(
                    f"coordinates exceed {max_bits} bits before reaching {n} iterations"
                )
        value = math.log(Q.height) / d ** n
        # float log/division error is a few ulps of the value
        rounding = 4 * sys.float_info.epsilon * abs(value)
        radius = 2 * truncation_bound(cert, n) + rounding
        if radius <= target_radius:
            return CanonicalHeightValue(value=value, radius=radius, iterations=n)
        if truncation_bound(cert, n) == 0:
            raise ValueError("target radius is below floating-point resolution")
        n += 1
