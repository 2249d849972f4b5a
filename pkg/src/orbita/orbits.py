"""Bounded-height enumeration, certified periodic points, backward orbits and
the chain lemma checker."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping, Sequence

from .arith import iroot_floor
from .certify import DescentCertificate, certify_descent
from .errors import (
    BaseLocusError,
    CandidateSetTooLarge,
    MalformedChainError,
    PreconditionError,
)
from .projective import Morphism, ProjPoint, evaluate, preimages_p1

DEFAULT_MAX_CANDIDATES = 10 ** 7
ESCAPE = -1

ON_CYCLE = "on-cycle"
PREPERIODIC = "preperiodic"
ESCAPING = "escaping"


# --- Northcott enumeration ---------------------------------------------------


def projected_count(n: int, M: int) -> int:
    """Upper bound for #{P in P^n(Q) : H(P) <= M} (nonzero tuples up to sign)."""
    return ((2 * M + 1) ** (n + 1) - 1) // 2


def _tuples_of_height(length: int, h: int):
    """Canonical coprime tuples with max |x_i| = h, in lexicographic order."""
    out = []

    def rec(prefix: list[int], started: bool, hit: bool, g: int):
        pos = len(prefix)
        if pos == length:
            if hit and g == 1:
                out.append(tuple(prefix))
            return
        last = pos == length - 1
        lo = -h if started else 0
        if last and not hit:
            values = (h,) if not started else (-h, h)
        else:
            values = range(lo, h + 1)
        for v in values:
            if last and not started and v == 0:
                continue
            prefix.append(v)
            rec(prefix, started or v != 0, hit or abs(v) == h, math.gcd(g, v))
            prefix.pop()

    rec([], False, False, 0)
    return out


def _p1_tuples_of_height(h: int):
    # fast path of _tuples_of_height(2, h)
    if h == 1:
        return [(0, 1), (1, -1), (1, 0), (1, 1)]
    out = []
    gcd = math.gcd
    for x in range(1, h):
        if gcd(x, h) == 1:
            out.append((x, -h))
            out.append((x, h))
    mid = [(h, y) for y in range(-h + 1, h) if gcd(h, y) == 1]
    # (x, +-h) with x < h sort before (h, y)
    return out + mid


@dataclass(frozen=True)
class CandidateSet:
    dimension: int
    bound: int
    points: tuple[ProjPoint, ...]

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def enumerate_coords(n: int, M: int, max_candidates: int = DEFAULT_MAX_CANDIDATES):
    """Coordinate tuples of all points of P^n(Q) with H <= M, ordered by (H, coords)."""
    if M < 1:
        raise ValueError("height bound must be >= 1")
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if projected_count(n, M) > max_candidates:
        raise CandidateSetTooLarge(
            f"P^{n} with H <= {M} may hold up to {projected_count(n, M)} points "
            f"(limit {max_candidates})"
        )
    out = []
    for h in range(1, M + 1):
        out.extend(_p1_tuples_of_height(h) if n == 1 else _tuples_of_height(n + 1, h))
    return out


def enumerate_bounded(n: int, M: int, max_candidates: int = DEFAULT_MAX_CANDIDATES) -> CandidateSet:
    coords = enumerate_coords(n, M, max_candidates)
    return CandidateSet(n, M, tuple(ProjPoint(c) for c in coords))


# --- periodic points -------------------------------------------------------


def _image_coords(f: Morphism, coords: tuple[int, ...]) -> tuple[int, ...]:
    img = tuple(F(coords) for F in f.forms)
    g = 0
    for v in img:
        g = math.gcd(g, v)
    if g == 0:
        raise BaseLocusError(f"[{':'.join(map(str, coords))}] lies in the base locus")
    for v in img:
        if v:
            if v < 0:
                g = -g
            break
    return tuple(v // g for v in img)


def _image_chunk(args):
    f, steps, chunk = args
    out = []
    for c in chunk:
        for _ in range(steps):
            c = _image_coords(f, c)
        out.append(c)
    return out


def _images(f: Morphism, steps: int, coords: list, threads: int) -> list:
    if threads <= 1 or len(coords) < 2000:
        return _image_chunk((f, steps, coords))
    size = -(-len(coords) // (threads * 4))
    chunks = [coords[i:i + size] for i in range(0, len(coords), size)]
    out = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(_image_chunk, [(f, steps, c) for c in chunks]):
            out.extend(part)
    return out


@dataclass
class PeriodicReport:
    """Cycle decomposition of the periodic points found in S = {H <= bound}.

    ``certified`` is True when ``bound`` comes from a descent certificate, in
    which case ``periodic_points()`` is the complete set of rational periodic
    points.  In search mode (P^n, n >= 2, user cap) it is only what lies in S.
    """

    dimension: int
    degree: int
    bound: int
    cycles: list[tuple[ProjPoint, ...]]
    certified: bool
    certificate: DescentCertificate | None
    candidates: int
    on_cycle: int
    preperiodic: int
    escaping: int
    classification: dict = field(default_factory=dict, repr=False)

    @property
    def periods(self) -> list[int]:
        return [len(c) for c in self.cycles]

    def periodic_points(self) -> set[ProjPoint]:
        return {P for c in self.cycles for P in c}

    @property
    def escape_count(self) -> int:
        """Points of S proven non-periodic."""
        return self.preperiodic + self.escaping


def _functional_graph_cycles(succ: Sequence[int]):
    """Colour a functional graph whose sink is ESCAPE.

    Returns (cycles as index lists, status per node).
    """
    n = len(succ)
    status: list[str | None] = [None] * n
    state = [0] * n  # 0 new, 1 on current path, 2 done
    cycles = []
    for start in range(n):
        if state[start]:
            continue
        path = []
        v = start
        while v != ESCAPE and state[v] == 0:
            state[v] = 1
            path.append(v)
            v = succ[v]
        if v == ESCAPE:
            tail = ESCAPING
        elif state[v] == 1:
            k = path.index(v)
            cyc = path[k:]
            cycles.append(cyc)
            for u in cyc:
                status[u] = ON_CYCLE
                state[u] = 2
            path = path[:k]
            tail = PREPERIODIC
        else:
            tail = ESCAPING if status[v] == ESCAPING else PREPERIODIC
        for u in path:
            status[u] = tail
            state[u] = 2
    return cycles, status


def _canonical_cycle(points: list[ProjPoint]) -> tuple[ProjPoint, ...]:
    k = min(range(len(points)), key=lambda i: points[i].sort_key())
    return tuple(points[k:] + points[:k])


def _classify(
    f: Morphism,
    bound: int,
    steps: int,
    threads: int,
    max_candidates: int,
):
    coords = enumerate_coords(f.dimension, bound, max_candidates)
    index = {c: i for i, c in enumerate(coords)}
    images = _images(f, steps, coords, threads)
    succ = [index.get(img, ESCAPE) for img in images]
    cycles, status = _functional_graph_cycles(succ)
    pts = [ProjPoint(c) for c in coords]
    cyc_pts = sorted(
        (_canonical_cycle([pts[i] for i in cyc]) for cyc in cycles),
        key=lambda c: c[0].sort_key(),
    )
    classification = {pts[i]: status[i] for i in range(len(pts))}
    return coords, cyc_pts, status, classification


def periodic_points(
    f: Morphism,
    cert: DescentCertificate | None = None,
    *,
    bound: int | None = None,
    threads: int = 1,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
    keep_classification: bool = False,
) -> PeriodicReport:
    """Rational periodic points of f.

    On P^1 the search cap is the certificate's M and the answer is complete.
    For n >= 2 a ``bound`` must be given and the report is flagged uncertified.
    A certificate for an iterate f = g^k may be passed explicitly together with
    f = g.power(k); images are then computed by iterating g.
    """
    certified = f.dimension == 1
    if certified:
        if cert is None:
            cert = certify_descent(f)
        M = cert.M
    else:
        if bound is None:
            raise PreconditionError(
                "no certified height bound exists for P^n with n >= 2; pass bound="
            )
        M = bound
    base, steps = f._power_of if f._power_of is not None else (f, 1)
    coords, cycles, status, classification = _classify(base, M, steps, threads, max_candidates)
    return PeriodicReport(
        dimension=f.dimension,
        degree=f.degree,
        bound=M,
        cycles=cycles,
        certified=certified,
        certificate=cert,
        candidates=len(coords),
        on_cycle=status.count(ON_CYCLE),
        preperiodic=status.count(PREPERIODIC),
        escaping=status.count(ESCAPING),
        classification=classification if keep_classification else {},
    )


def certify_power(cert: DescentCertificate, k: int) -> DescentCertificate:
    """Certificate for f^k built from one for f.

    Composing H(f(P)) >= H(P)^d / B k times gives
    H(f^k(P)) >= H(P)^(d^k) / B^((d^k - 1)/(d - 1)).
    """
    if k < 1:
        raise ValueError("power must be >= 1")
    if k == 1:
        return cert
    d = cert.degree
    e = (d ** k - 1) // (d - 1)
    B = cert.B ** e

    return DescentCertificate(
        degree=d ** k,
        B=B,
        M=iroot_floor(B, d ** k - 1),
        resultant=cert.resultant,
        form_norm=cert.form_norm ** e,
        cofactor_norms={"derived_from_power": (cert.B, k)},
        cofactors=cert.cofactors,
    )


@dataclass
class PowerEquivalence:
    k: int
    base: PeriodicReport
    power: PeriodicReport

    @property
    def equal(self) -> bool:
        return self.base.periodic_points() == self.power.periodic_points()


def power_equivalence_check(
    f: Morphism,
    k: int,
    *,
    max_bits: int = 4096,
    threads: int = 1,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
) -> PowerEquivalence:
    """Compare the periodic points of f and of f^k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    cert = certify_descent(f)
    base = periodic_points(f, cert, threads=threads, max_candidates=max_candidates)
    g = f.power(k, max_bits=max_bits)
    power = periodic_points(
        g, certify_power(cert, k), threads=threads, max_candidates=max_candidates
    )
    return PowerEquivalence(k, base, power)


# --- backward orbits ---------------------------------------------------------


@dataclass
class TreeNode:
    point: ProjPoint
    depth: int
    parent: int | None  # index into BackwardTree.nodes


@dataclass
class BackwardTree:
    """Rational backward orbits of ``root`` down to ``depth`` levels."""

    root: ProjPoint
    depth: int
    nodes: list[TreeNode]

    def level(self, k: int) -> list[ProjPoint]:
        return [n.point for n in self.nodes if n.depth == k]

    def children(self, i: int) -> list[int]:
        return [j for j, n in enumerate(self.nodes) if n.parent == i]

    def edges(self):
        """(child, parent) pairs, i.e. f(child) = parent."""
        for n in self.nodes:
            if n.parent is not None:
                yield n.point, self.nodes[n.parent].point


def backward_tree(f: Morphism, root: ProjPoint, depth: int) -> BackwardTree:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    nodes = [TreeNode(root, 0, None)]
    frontier = [0]
    for k in range(1, depth + 1):
        nxt = []
        for i in frontier:
            parent = nodes[i].point
            for P in sorted(preimages_p1(f, parent), key=ProjPoint.sort_key):
                if evaluate(f, P) != parent:
                    raise ArithmeticError(f"preimage {P} of {parent} failed forward check")
                nodes.append(TreeNode(P, k, i))
                nxt.append(len(nodes) - 1)
        frontier = nxt
    return BackwardTree(root, depth, nodes)


@dataclass(frozen=True)
class PeriodicChain:
    """The unique backward orbit through a periodic point: its cycle reversed."""

    x0: ProjPoint
    cycle: tuple[ProjPoint, ...]  # x0, f(x0), ..., f^(p-1)(x0)

    @property
    def period(self) -> int:
        return len(self.cycle)

    def term(self, n: int) -> ProjPoint:
        """x_n = f^(p - l)(x_0) where l = n mod p."""
        p = self.period
        return self.cycle[(p - n % p) % p]

    def prefix(self, length: int) -> list[ProjPoint]:
        return [self.term(n) for n in range(length)]


def inverse_limit_p1(f: Morphism, report: PeriodicReport | None = None) -> dict[ProjPoint, PeriodicChain]:
    """x_0 -> chain for every element of the (finite) inverse limit of f on P^1(Q)."""
    if report is None:
        report = periodic_points(f)
    out = {}
    for cyc in report.cycles:
        for i, P in enumerate(cyc):
            out[P] = PeriodicChain(P, cyc[i:] + cyc[:i])
    return dict(sorted(out.items(), key=lambda kv: kv[0].sort_key()))


# --- the chain lemma on abstract finite sets -----------------------------------


@dataclass
class AbstractChain:
    """A backward chain x_0, x_1, ... for a partial self-map of a finite set.

    ``table`` maps an element to its image (elements absent from the table have
    no image); ``generator(n)`` returns x_n.
    """

    ground_size: int
    table: Mapping[Hashable, Hashable]
    generator: Callable[[int], Hashable]

    def apply(self, x, times: int = 1):
        for _ in range(times):
            if x not in self.table:
                raise MalformedChainError(f"{x!r} has no image under the map")
            x = self.table[x]
        return x


@dataclass(frozen=True)
class ChainVerdict:
    periodic: bool
    period: int | None = None
    first_index: int | None = None
    second_index: int | None = None
    reconstructed: bool = False
    simulated: int = 0


def check_chain_lemma(chain: AbstractChain, S, horizon: int) -> ChainVerdict:
    """Detect the period of a backward chain that returns to the finite set S.

    The first repeated element of S within the horizon fixes p = n1 - n0; the
    verdict is only 'periodic' once x_{n+p} = x_n holds on the whole simulated
    prefix and every x_n equals f^(p - n mod p)(x_0).
    """
    S = set(S)
    if horizon < 2 * len(S) + 2:
        raise ValueError(f"horizon must be at least 2|S| + 2 = {2 * len(S) + 2}")
    xs = [chain.generator(0)]
    for n in range(horizon):
        xs.append(chain.generator(n + 1))
        if chain.apply(xs[n + 1]) != xs[n]:
            raise MalformedChainError(f"f(x_{n + 1}) != x_{n}")
    last_seen: dict = {}
    n0 = n1 = None
    for n, x in enumerate(xs):
        if x in S:
            if x in last_seen:
                n0, n1 = last_seen[x], n
                break
            last_seen[x] = n
    if n0 is None:
        return ChainVerdict(False, simulated=len(xs))
    p = n1 - n0
    if any(xs[n + p] != xs[n] for n in range(len(xs) - p)):
        return ChainVerdict(False, simulated=len(xs))
    x0 = xs[0]
    reconstructed = all(chain.apply(x0, p - n % p) == xs[n] for n in range(len(xs)))
    return ChainVerdict(
        reconstructed,
        period=p,
        first_index=n0,
        second_index=n1,
        reconstructed=reconstructed,
        simulated=len(xs),
    )


def orbit_until_repeat(f: Morphism, P: ProjPoint, max_steps: int) -> list[ProjPoint]:
    """Forward orbit, stopping at the first repeated point (inclusive)."""
    seen = {P}
    out = [P]
    for _ in range(max_steps):
        P = evaluate(f, P)
        out.append(P)
        if P in seen:
            break
        seen.add(P)
    return out


def is_periodic(f: Morphism, P: ProjPoint, cert: DescentCertificate | None = None) -> bool:
    """Exact periodicity test on P^1: the orbit either repeats inside H <= M or leaves it."""
    if cert is None:
        cert = certify_descent(f)
    if P.height > cert.M:
        return False
    seen = {P}
    Q = P
    while True:
        Q = evaluate(f, Q)
        if Q == P:
            return True
        if Q.height > cert.M or Q in seen:
            return False
        seen.add(Q)


def random_functional_graph(rng, n: int) -> dict[int, int]:
    return {i: rng.randrange(n) for i in range(n)}


def periodic_nodes(table: Mapping[int, int]) -> set[int]:
    succ = [table[i] for i in range(len(table))]
    cycles, _ = _functional_graph_cycles(succ)
    return {v for c in cycles for v in c}


def random_backward_chain(rng, n: int) -> tuple[AbstractChain, set[int]]:
    """A random infinite backward chain in a random functional graph on n nodes,
    together with a random subset S of the nodes.

    In a finite graph only cycle nodes have infinite backward chains, and each
    has exactly one preimage on its cycle, so the chain walks a cycle backwards.
    """
    table = random_functional_graph(rng, n)
    x0 = rng.choice(sorted(periodic_nodes(table)))
    cycle = [x0]
    while table[cycle[-1]] != x0:
        cycle.append(table[cycle[-1]])
    p = len(cycle)

    def generator(k: int) -> int:
        return cycle[(-k) % p]

    S = set(rng.sample(range(n), rng.randint(1, n)))
    return AbstractChain(n, table, generator), S
