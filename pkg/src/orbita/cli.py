"""``orbita`` command line interface.

Exit status: 0 on success, 1 on a domain error (not a morphism, torsion
translation, budget exceeded, ...), 2 on a usage error.
"""
from __future__ import annotations

import argparse
import random
import re
import sys
from fractions import Fraction

from . import emit
from .certify import canonical_height, certify_descent
from .dsl import DslError, format_form, parse
from .elliptic import (
    O,
    ECPoint,
    EllipticCurve,
    ProductSystem,
    build_d_plus_one_map,
    is_torsion,
    periodic_under_mult,
    product_evaluate,
    torsion_group,
    verify_backward_chain,
)
from .errors import OrbitaError
from .orbits import (
    DEFAULT_MAX_CANDIDATES,
    backward_tree,
    check_chain_lemma,
    inverse_limit_p1,
    is_periodic,
    periodic_points,
    power_equivalence_check,
    random_backward_chain,
)
from .projective import Morphism, ProjPoint, forward_orbit, normalize, preimages_p1

COMMANDS = (
    "certify",
    "periodic",
    "canheight",
    "orbit",
    "preimages",
    "backward",
    "torsion",
    "product-demo",
    "chain-verify",
    "lemma-check",
)


class UsageError(Exception):
    pass


# --- argument helpers ---------------------------------------------------------------


def load_document(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e
    return parse(text)


def load_map(args) -> tuple[str, Morphism, object]:
    if not args.map:
        raise UsageError("--map FILE is required")
    doc = load_document(args.map)
    maps = doc.maps
    if not maps:
        raise UsageError(f"{args.map} defines no map")
    name = args.name or next(iter(maps))
    if name not in maps:
        raise UsageError(f"{args.map} has no map named {name!r}")
    return name, maps[name], doc


def parse_proj_point(text: str, doc=None) -> ProjPoint:
    if doc is not None and text in doc.definitions and doc.definitions[text].kind == "point":
        return doc[text]
    body = text.strip()
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
    parts = [p.strip() for p in re.split(r"[:,]", body)]
    try:
        coords = [Fraction(p) for p in parts]
    except ValueError:
        raise UsageError(f"cannot parse projective point {text!r}; expected e.g. [4:1]") from None
    if len(coords) < 2 or not any(coords):
        raise UsageError(f"{text!r} is not a projective point")
    return normalize(coords)


def parse_curve(text: str) -> EllipticCurve:
    m = re.fullmatch(r"\s*\[?\s*(-?\d+)\s*,\s*(-?\d+)\s*\]?\s*", text or "")
    if not m:
        raise UsageError(f"cannot parse curve {text!r}; expected \"a,b\" for y^2 = x^3 + a x + b")
    try:
        return EllipticCurve(int(m.group(1)), int(m.group(2)))
    except ValueError as e:
        raise UsageError(str(e)) from None


def parse_ec_point(E: EllipticCurve, text: str) -> ECPoint:
    if text is None:
        raise UsageError("--point is required")
    if text.strip() == "O":
        return O
    parts = [p.strip() for p in text.strip().strip("()").split(",")]
    if len(parts) != 2:
        raise UsageError(f"cannot parse curve point {text!r}; expected \"x/den,y/den\" or \"O\"")
    try:
        P = ECPoint(Fraction(parts[0]), Fraction(parts[1]))
    except ValueError:
        raise UsageError(f"cannot parse curve point {text!r}") from None
    if not E.contains(P):
        raise UsageError(f"{P} is not on {E}")
    return P


def _require(args, attr: str, flag: str):
    if getattr(args, attr) is None:
        raise UsageError(f"{flag} is required for '{args.command}'")
    return getattr(args, attr)


# --- commands -------------------------------------------------------------------


def cmd_certify(args, out):
    name, f, _ = load_map(args)
    cert = certify_descent(f)
    if args.format == "json":
        out.write(emit.dumps(emit.certificate_json(cert)))
        return
    F, G = f.forms
    out.write(f"map {name}: [{format_form(F)} : {format_form(G)}]  degree {cert.degree}\n")
    out.write(f"resultant      {cert.resultant}\n")
    out.write(f"cofactor norms x: {cert.cofactor_norms['x']}  y: {cert.cofactor_norms['y']}\n")
    out.write(f"B              {cert.B}    (H(f(P)) >= H(P)^{cert.degree} / B)\n")
    out.write(f"M              {cert.M}    (every periodic point has H <= M)\n")


def cmd_periodic(args, out):
    name, f, _ = load_map(args)
    if f.dimension == 1:
        report = periodic_points(f, threads=args.threads, max_candidates=args.max_candidates)
    else:
        bound = _require(args, "bound", "--bound (search cap for P^n, n >= 2)")
        report = periodic_points(f, bound=bound, threads=args.threads, max_candidates=args.max_candidates)
    if args.format == "json":
        out.write(emit.dumps(emit.periodic_report_json(report, name)))
        return
    if args.format == "dot":
        out.write(emit.periodic_report_dot(report, name))
        return
    mode = "certified" if report.certified else "search only, not a certificate"
    out.write(f"map {name}: periodic points with H <= {report.bound} ({mode})\n")
    if report.certificate:
        out.write(f"B = {report.certificate.B}, M = {report.certificate.M}\n")
    for cyc in report.cycles:
        out.write(f"  period {len(cyc)}: " + " -> ".join(str(P) for P in cyc) + "\n")
    out.write(
        f"{len(report.periodic_points())} periodic points; {report.candidates} candidates: "
        f"{report.on_cycle} on cycles, {report.preperiodic} preperiodic, {report.escaping} escaping\n"
    )


def cmd_canheight(args, out):
    name, f, doc = load_map(args)
    P = parse_proj_point(_require(args, "point", "--point"), doc)
    val = canonical_height(f, P, args.radius, max_bits=args.max_bits)
    if args.format == "json":
        out.write(emit.dumps({"point": list(P.coords), "value": val.value, "radius": val.radius,
                              "iterations": val.iterations}))
        return
    out.write(f"canonical height of {P}: {val.value!r} +- {val.radius:.3g} ({val.iterations} iterations)\n")


def cmd_orbit(args, out):
    name, f, doc = load_map(args)
    P = parse_proj_point(_require(args, "point", "--point"), doc)
    orbit = forward_orbit(f, P, args.iters)
    if args.format == "json":
        out.write(emit.dumps({"map": name, "orbit": [list(Q.coords) for Q in orbit]}))
        return
    for k, Q in enumerate(orbit):
        out.write(f"{k:4d}  {Q}  H={Q.height}\n")


def _tree_output(args, out, name, f, tree):
    if args.format == "json":
        out.write(emit.dumps(emit.backward_tree_json(tree, name)))
        return
    if args.format == "dot":
        cert = certify_descent(f)
        periodic = {n.point for n in tree.nodes if is_periodic(f, n.point, cert)}
        out.write(emit.backward_tree_dot(tree, periodic, name))
        return

    def show(i, indent):
        node = tree.nodes[i]
        out.write("  " * indent + f"{node.point}\n")
        for j in tree.children(i):
            show(j, indent + 1)

    show(0, 0)
    for k in range(1, tree.depth + 1):
        out.write(f"level {k}: {len(tree.level(k))} points\n")


def cmd_preimages(args, out):
    name, f, doc = load_map(args)
    Q = parse_proj_point(_require(args, "point", "--point"), doc)
    depth = args.depth if args.depth is not None else 1
    if depth == 1 and args.format == "text":
        pre = sorted(preimages_p1(f, Q), key=ProjPoint.sort_key)
        out.write(f"preimages of {Q}: " + (", ".join(map(str, pre)) if pre else "none") + "\n")
        return
    _tree_output(args, out, name, f, backward_tree(f, Q, depth))


def cmd_backward(args, out):
    name, f, doc = load_map(args)
    Q = parse_proj_point(_require(args, "point", "--point"), doc)
    depth = args.depth if args.depth is not None else 3
    _tree_output(args, out, name, f, backward_tree(f, Q, depth))


def cmd_torsion(args, out):
    E = parse_curve(_require(args, "curve", "--curve"))
    T = torsion_group(E)
    if args.format == "json":
        out.write(emit.dumps(emit.torsion_json(T)))
        return
    out.write(f"{E}: torsion {T.structure}, {len(T)} points\n")
    for P in T.points:
        out.write(f"  {P}  order {T.orders[P]}\n")
    dyn = periodic_under_mult(E, 2, T)
    out.write(f"periodic under [2]: {', '.join(map(str, dyn.periodic))} ({dyn.inverse_limit_size} backward orbits)\n")


def cmd_product_demo(args, out):
    E = parse_curve(_require(args, "curve", "--curve"))
    G = parse_ec_point(E, args.point)
    if is_torsion(E, G):
        raise OrbitaError(f"{G} is torsion; choose a point of infinite order")
    k = args.iters
    doubling = ProductSystem(E, E, m1=1, translation=O, m2=2)
    fixed = []
    for j in range(1, k + 1):
        x = (E.mul(j, G), O)
        fixed.append((x, product_evaluate(doubling, x) == x))
    lifted = build_d_plus_one_map(E, E, 1)
    fixed2 = []
    for j in range(1, k + 1):
        x = (O, E.mul(j, G))
        fixed2.append((x, product_evaluate(lifted, x) == x))
    distinct = len({x for x, _ in fixed}) == k
    all_fixed = all(ok for _, ok in fixed) and all(ok for _, ok in fixed2)
    if args.format == "json":
        out.write(emit.dumps({
            "curve": [E.a, E.b],
            "generator": emit.ecpoint_json(G),
            "count": k,
            "fixed": all_fixed,
            "distinct": distinct,
        }))
    else:
        out.write(f"(P, Q) -> (P, [2]Q) on E x E, E: {E}\n")
        for (P, Q), ok in fixed:
            out.write(f"  ({P}, {Q}) {'fixed' if ok else 'NOT fixed'}\n")
        out.write("(P, Q) -> ([2]P, Q):\n")
        for (P, Q), ok in fixed2:
            out.write(f"  ({P}, {Q}) {'fixed' if ok else 'NOT fixed'}\n")
        out.write(f"{k} distinct periodic points: {'yes' if distinct and all_fixed else 'no'}\n")
    if not (all_fixed and distinct):
        raise OrbitaError("demonstration failed")


def cmd_chain_verify(args, out):
    E = parse_curve(_require(args, "curve", "--curve"))
    T = parse_ec_point(E, args.point)
    depth = args.depth if args.depth is not None else 10
    sys_ = ProductSystem(E, E, m1=1, translation=T, m2=2)
    report = verify_backward_chain(sys_, depth)
    if args.format == "json":
        out.write(emit.dumps({
            "curve": [E.a, E.b],
            "translation": emit.ecpoint_json(T),
            "depth": depth,
            "relation_holds": report.relation_holds,
            "distinct": report.distinct,
            "chain": [[emit.ecpoint_json(P), emit.ecpoint_json(Q)] for P, Q in report.points],
        }))
    else:
        for n, (P, Q) in enumerate(report.points):
            out.write(f"x_{n} = ({P}, {Q})\n")
        out.write(f"f(x_(n+1)) = x_n for n < {depth}: {report.relation_holds}; "
                  f"{len(report.points)} distinct points: {report.distinct}\n")
    if not report.verified:
        raise OrbitaError("backward chain verification failed")


def cmd_lemma_check(args, out):
    name, f, _ = load_map(args)
    max_k = args.depth if args.depth is not None else 3
    ok = True
    lines = []
    for k in range(1, max_k + 1):
        pe = power_equivalence_check(f, k, threads=args.threads, max_candidates=args.max_candidates)
        ok &= pe.equal
        lines.append(f"periodic points of f and f^{k} agree: {pe.equal} "
                     f"({len(pe.base.periodic_points())} points)")
    limit = inverse_limit_p1(f)
    recon = all(f(ch.term(n + 1)) == ch.term(n) for ch in limit.values() for n in range(3 * ch.period))
    ok &= recon
    lines.append(f"inverse limit has {len(limit)} elements, chains reconstructed from x_0: {recon}")
    rng = random.Random(args.seed)
    trials = args.iters
    failures = 0
    for _ in range(trials):
        chain, S = random_backward_chain(rng, rng.randint(1, 50))
        verdict = check_chain_lemma(chain, S, 2 * len(S) + 2 + 50)
        if verdict.periodic:
            far = [chain.generator(n) for n in range(verdict.simulated + 100)]
            if any(far[n + verdict.period] != far[n] for n in range(len(far) - verdict.period)):
                failures += 1
    ok &= failures == 0
    lines.append(f"chain lemma on {trials} random functional graphs: {failures} failures")
    if args.format == "json":
        out.write(emit.dumps({"map": name, "passed": bool(ok), "checks": lines}))
    else:
        out.write("\n".join(lines) + "\n")
    if not ok:
        raise OrbitaError("lemma check failed")


HANDLERS = {
    "certify": cmd_certify,
    "periodic": cmd_periodic,
    "canheight": cmd_canheight,
    "orbit": cmd_orbit,
    "preimages": cmd_preimages,
    "backward": cmd_backward,
    "torsion": cmd_torsion,
    "product-demo": cmd_product_demo,
    "chain-verify": cmd_chain_verify,
    "lemma-check": cmd_lemma_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbita",
        description="Certified rational periodic points and backward orbits of arithmetic dynamical systems.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--map", metavar="FILE", help="definition file containing the map")
    parser.add_argument("--name", help="which map of the file to use (default: the first)")
    parser.add_argument("--curve", help='short Weierstrass curve "a,b": y^2 = x^3 + a x + b')
    parser.add_argument("--point", help='"[x0:x1]" for P^n, "x/den,y/den" or "O" on a curve')
    parser.add_argument("--depth", type=int, help="backward depth / chain length / max power")
    parser.add_argument("--iters", type=int, default=10, help="iterations or trials (default 10)")
    parser.add_argument("--bound", type=int, help="height cap for the uncertified P^n search")
    parser.add_argument("--radius", type=float, default=1e-6, help="canonical height target radius")
    parser.add_argument("--max-bits", type=int, default=1 << 22, help="coordinate size budget")
    parser.add_argument("--format", choices=("text", "json", "dot"), default="text")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--max-candidates", type=int, default=DEFAULT_MAX_CANDIDATES)
    parser.add_argument("--seed", type=int, default=0, help="random seed for lemma-check")
    return parser


GRAPH_COMMANDS = {"periodic", "preimages", "backward"}
VALUE_FLAGS = ("--curve", "--point")


def _attach_signed_values(argv: list[str]) -> list[str]:
    """Let "--curve -1,0" through: argparse would read "-1,0" as an option."""
    out = []
    i = 0
    while i < len(argv):
        if argv[i] in VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(_attach_signed_values(list(sys.argv[1:] if argv is None else argv)))
    except SystemExit as e:
        return int(e.code or 0)
    if args.format == "dot" and args.command not in GRAPH_COMMANDS:
        parser.print_usage(sys.stderr)
        print(f"orbita: error: --format dot is only available for {sorted(GRAPH_COMMANDS)}", file=sys.stderr)
        return 2
    try:
        HANDLERS[args.command](args, out)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"orbita: error: {e}", file=sys.stderr)
        return 2
    except DslError as e:
        print(str(e), file=sys.stderr)
        return 1
    except (OrbitaError, ValueError) as e:
        print(f"orbita: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
