"""Independent brute-force oracles.

Nothing here imports the engine's enumeration, evaluation or group law; the
oracles work on plain tuples and coefficient lists.
"""
from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import sympy


# --- P^1 maps as coefficient lists ---------------------------------------------------


def horner_binary(coeffs, x, y):
    """Evaluate sum c_i x^(d-i) y^i."""
    d = len(coeffs) - 1
    return sum(c * x ** (d - i) * y**i for i, c in enumerate(coeffs))


def norm_pair(a, b):
    g = math.gcd(a, b)
    a, b = a // g, b // g
    if a < 0 or (a == 0 and b < 0):
        a, b = -a, -b
    return a, b


def apply_pair(F, G, p):
    return norm_pair(horner_binary(F, *p), horner_binary(G, *p))


def sylvester_rows(F, G):
    d = len(F) - 1
    n = 2 * d
    rows = []
    for coeffs in (F, G):
        for shift in range(d):
            row = [0] * n
            row[shift:shift + d + 1] = coeffs
            rows.append(row)
    return rows


def points_p1_naive(W):
    """Every point of P^1(Q) with height <= W, by a double loop."""
    out = set()
    for a in range(-W, W + 1):
        for b in range(-W, W + 1):
            if (a, b) != (0, 0) and math.gcd(a, b) == 1:
                out.add(norm_pair(a, b))
    return out


def points_pn_naive(n, W):
    out = set()
    for c in itertools.product(range(-W, W + 1), repeat=n + 1):
        if any(c) and math.gcd(*c) == 1:
            first = next(v for v in c if v)
            out.add(tuple(v if first > 0 else -v for v in c))
    return out


def periodic_oracle_p1(F, G, M, steps=500):
    """Brute force: every point with H <= max(M, 100) that returns to itself
    within ``steps`` iterations.

    An orbit that leaves the window can be dropped: a periodic point's whole
    cycle is periodic, hence inside H <= M.  This keeps the iteration finite
    in practice, since escaping heights grow doubly exponentially.
    """
    W = max(M, 100)
    out = set()
    for p in points_p1_naive(W):
        q = p
        seen = {p}
        for _ in range(steps):
            q = apply_pair(F, G, q)
            if q == p:
                out.add(p)
                break
            if max(abs(q[0]), abs(q[1])) > W or q in seen:
                break
            seen.add(q)
    return out


def random_maps(seed=2024, count=20, coeff=5):
    """Random degree-2/3 integer maps of P^1 with nonzero resultant."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        d = rng.choice((2, 3))
        F = [rng.randint(-coeff, coeff) for _ in range(d + 1)]
        G = [rng.randint(-coeff, coeff) for _ in range(d + 1)]
        if sympy.Matrix(sylvester_rows(F, G)).det() != 0:
            out.append((F, G))
    return out


NAMED_MAPS = {
    "z^2": ([1, 0, 0], [0, 0, 1]),
    "z^2-1": ([1, 0, -1], [0, 0, 1]),
    "z^3": ([1, 0, 0, 0], [0, 0, 0, 1]),
    "z^2-2": ([1, 0, -2], [0, 0, 1]),
}


# --- elliptic curves ---------------------------------------------------------------


def naive_add(a, P, Q):
    """Chord-and-tangent on y^2 = x^3 + a x + b; None is the identity."""
    if P is None:
        return Q
    if Q is None:
        return P
    (x1, y1), (x2, y2) = P, Q
    if x1 == x2 and y1 == -y2:
        return None
    if P == Q:
        lam = Fraction(3 * x1 * x1 + a, 2 * y1)
    else:
        lam = Fraction(y2 - y1, x2 - x1)
    x3 = lam * lam - x1 - x2
    return (x3, lam * (x1 - x3) - y1)


def naive_mul(a, k, P):
    R = None
    for _ in range(k):
        R = naive_add(a, R, P)
    return R


def small_torsion_oracle(a, b, box=50):
    """Integral points with |x| <= box whose order divides some n <= 12."""
    pts = [None]
    for x in range(-box, box + 1):
        r = x**3 + a * x + b
        if r < 0:
            continue
        y = math.isqrt(r)
        if y * y != r:
            continue
        for yy in {y, -y}:
            P = (Fraction(x), Fraction(yy))
            Q = P
            for _ in range(12):
                Q = naive_add(a, Q, P)
                if Q is None:
                    pts.append(P)
                    break
    return pts
