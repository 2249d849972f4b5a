"""Certified rational periodic points and backward orbits for self-maps of
P^1 (and, uncertified, P^n) over Q, plus elliptic-curve product systems."""

from .arith import (
    BinaryForm,
    UniPoly,
    gcd,
    iroot_floor,
    rational_roots,
    resultant,
    solve_sylvester_cofactors,
)
from .certify import CanonicalHeightValue, DescentCertificate, canonical_height, certify_descent
from .elliptic import (
    O,
    AffineECMap,
    ECPoint,
    EllipticCurve,
    ProductSystem,
    build_d_plus_one_map,
    ec_add,
    ec_mul,
    periodic_under_mult,
    product_evaluate,
    torsion_group,
    torsion_image_property,
    verify_backward_chain,
)
from .errors import OrbitaError
from .orbits import (
    AbstractChain,
    backward_tree,
    check_chain_lemma,
    enumerate_bounded,
    inverse_limit_p1,
    periodic_points,
    power_equivalence_check,
)
from .projective import HomogForm, Morphism, ProjPoint, evaluate, height, iterate, normalize, preimages_p1

__version__ = "0.1.0"
