"""Parser and printer for the ``.dyn`` definition language.

Grammar (whitespace-insensitive, ``#`` comments to end of line)::

    document  := defn* ;
    defn      := mapdef | curvedef | pointdef | productdef ;
    mapdef    := "map" IDENT ":" "P" NAT "->" "P" NAT "=" "[" poly ("," poly)* "]" ;
    poly      := ["-"] term (("+"|"-") term)* ;
    term      := [INT ["*"]] factor ("*" factor)* | INT ;
    factor    := VAR ["^" NAT] ;           VAR := "x" NAT ;
    curvedef  := "curve" IDENT "=" "[" INT "," INT "]" ;
    pointdef  := "point" IDENT ["on" IDENT] "=" ("[" RAT (":" RAT)+ "]" | "O") ;
    productdef:= "product" IDENT "on" IDENT "x" IDENT "="
                 "(" "[" INT "]" ["+" IDENT] "," "[" INT "]" ")" ;

A point with ``on CURVE`` is an affine point (or ``O``) of that curve; without
it, a point of projective space.  A product ``([m1] + T, [m2])`` is the map
(P, Q) -> ([m1] P + T, [m2] Q).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .elliptic import O, ECPoint, EllipticCurve, ProductSystem
from .errors import DegreeHypothesisError, NotAMorphismError, NotOnCurveError, OrbitaError
from .projective import HomogForm, Morphism, ProjPoint, normalize

KEYWORDS = {"map", "curve", "point", "product", "on"}


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    line: int
    column: int
    excerpt: str

    def __str__(self) -> str:
        caret = " " * (self.column - 1) + "^"
        return f"{self.line}:{self.column}: {self.severity}: {self.message}\n  {self.excerpt}\n  {caret}"


class DslError(OrbitaError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


@dataclass(frozen=True)
class Token:
    kind: str  # INT, IDENT, SYM, EOF
    text: str
    pos: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>#[^\n]*)|(?P<INT>\d+)|(?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<SYM>->|[\[\](),:=+\-*^/])"
)


@dataclass(frozen=True)
class Span:
    start: int
    end: int


@dataclass
class Definition:
    kind: str  # map, curve, point, ecpoint, product
    name: str
    value: object
    span: Span = field(compare=False)
    curve: str | None = None  # for ecpoint
    refs: tuple = ()  # for product: (curve1, curve2, translation or None)


@dataclass
class DslDocument:
    definitions: dict[str, Definition] = field(default_factory=dict)
    source: str = field(default="", compare=False, repr=False)

    def __getitem__(self, name: str):
        return self.definitions[name].value

    def of_kind(self, kind: str) -> dict:
        return {n: d.value for n, d in self.definitions.items() if d.kind == kind}

    @property
    def maps(self) -> dict[str, Morphism]:
        return self.of_kind("map")

    @property
    def curves(self) -> dict[str, EllipticCurve]:
        return self.of_kind("curve")

    def __eq__(self, other) -> bool:
        if not isinstance(other, DslDocument):
            return NotImplemented
        return list(self.definitions.items()) == list(other.definitions.items())


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = self._tokenize(source)
        self.i = 0
        self.errors: list[Diagnostic] = []

    # diagnostics

    def diag(self, pos: int, message: str, severity: str = "error") -> Diagnostic:
        line = self.source.count("\n", 0, pos) + 1
        start = self.source.rfind("\n", 0, pos) + 1
        end = self.source.find("\n", pos)
        if end == -1:
            end = len(self.source)
        return Diagnostic(severity, message, line, pos - start + 1, self.source[start:end])

    def fail(self, pos: int, message: str):
        raise DslError([self.diag(pos, message)])

    def _tokenize(self, source: str) -> list[Token]:
        out = []
        pos = 0
        while pos < len(source):
            m = _TOKEN_RE.match(source, pos)
            if not m:
                self.source = source
                self.fail(pos, f"unexpected character {source[pos]!r}")
            kind = m.lastgroup
            if kind not in ("ws", "comment"):
                out.append(Token(kind, m.group(), pos))
            pos = m.end()
        out.append(Token("EOF", "", len(source)))
        return out

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("SYM", "IDENT") and self.tok.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(self.tok.pos, f"expected {text!r}, found {self._describe(self.tok)}")
        return self.advance()

    def _describe(self, t: Token) -> str:
        return "end of input" if t.kind == "EOF" else repr(t.text)

    def nat(self) -> int:
        if self.tok.kind != "INT":
            self.fail(self.tok.pos, f"expected a natural number, found {self._describe(self.tok)}")
        return int(self.advance().text)

    def integer(self) -> int:
        sign = -1 if self.at("-") and self.advance() else 1
        return sign * self.nat()

    def rational(self) -> Fraction:
        sign = -1 if self.at("-") and self.advance() else 1
        num = self.nat()
        den = 1
        if self.at("/"):
            slash = self.advance()
            den = self.nat()
            if den == 0:
                self.fail(slash.pos, "zero denominator")
        return sign * Fraction(num, den)

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "IDENT" or t.text in KEYWORDS:
            self.fail(t.pos, f"expected a name, found {self._describe(t)}")
        return self.advance()

    # grammar

    def document(self) -> DslDocument:
        doc = DslDocument(source=self.source)
        while self.tok.kind != "EOF":
            start = self.tok.pos
            if self.at("map"):
                d = self.mapdef(doc)
            elif self.at("curve"):
                d = self.curvedef()
            elif self.at("point"):
                d = self.pointdef(doc)
            elif self.at("product"):
                d = self.productdef(doc)
            else:
                self.fail(start, f"expected 'map', 'curve', 'point' or 'product', found {self._describe(self.tok)}")
            if d is None:
                continue
            if d.name in doc.definitions:
                self.errors.append(self.diag(start, f"{d.name!r} is already defined"))
                continue
            doc.definitions[d.name] = d
        if self.errors:
            raise DslError(self.errors)
        return doc

    def _space(self, tok: Token) -> int:
        m = re.fullmatch(r"P(\d+)", tok.text) if tok.kind == "IDENT" else None
        if not m:
            self.fail(tok.pos, f"expected a projective space such as 'P1', found {self._describe(tok)}")
        return int(m.group(1))

    def mapdef(self, doc: DslDocument):
        start = self.advance().pos
        name = self.ident()
        self.expect(":")
        src = self._space(self.advance())
        self.expect("->")
        dst_tok = self.advance()
        dst = self._space(dst_tok)
        self.expect("=")
        self.expect("[")
        polys = [self.poly()]
        while self.at(","):
            self.advance()
            polys.append(self.poly())
        self.expect("]")
        span = Span(start, self.tokens[self.i - 1].pos + 1)

        errors_before = len(self.errors)
        if src != dst:
            self.errors.append(self.diag(dst_tok.pos, f"only self-maps are supported (P{src} -> P{dst})"))
        if src < 1:
            self.errors.append(self.diag(start, "projective space must have dimension >= 1"))
        if len(polys) != dst + 1:
            self.errors.append(self.diag(start, f"P{dst} needs {dst + 1} components, got {len(polys)}"))
        nvars = src + 1
        forms = []
        degrees = set()
        for pos, terms in polys:
            for (exp, _c, tpos) in terms:
                if len(exp) > nvars:
                    self.errors.append(self.diag(tpos, f"variable x{len(exp) - 1} does not exist in P{src}"))
            combined: dict[tuple, int] = {}
            first_pos = {}
            for exp, c, tpos in terms:
                key = tuple(exp) + (0,) * (nvars - len(exp))
                combined[key] = combined.get(key, 0) + c
                first_pos.setdefault(key, tpos)
            live = {e: c for e, c in combined.items() if c and len(e) == nvars}
            if not live:
                self.errors.append(self.diag(pos, "component is identically zero"))
                continue
            degs = {sum(e) for e in live}
            if len(degs) > 1:
                lead = sum(next(iter(live)))
                bad = min(first_pos[e] for e in live if sum(e) != lead)
                self.errors.append(self.diag(bad, "polynomial is not homogeneous"))
                continue
            degrees.add(degs.pop())
            forms.append((pos, live))
        if len(self.errors) > errors_before:
            return None
        if len(degrees) > 1:
            self.errors.append(self.diag(start, f"components have different degrees {sorted(degrees)}"))
            return None
        d = degrees.pop()
        try:
            f = Morphism([HomogForm(nvars, d, live) for _, live in forms], name=name.text)
        except NotAMorphismError as e:
            self.errors.append(self.diag(start, f"not a morphism: {e}"))
            return None
        except DegreeHypothesisError:
            self.errors.append(self.diag(start, f"degree {d} < 2: maps must have degree at least 2"))
            return None
        return Definition("map", name.text, f, span)

    def poly(self):
        """Returns (position, [(exponent list, coefficient, position)])."""
        start = self.tok.pos
        terms = []
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        elif self.at("+"):
            self.advance()
        terms.append(self.term(sign))
        while self.at("+") or self.at("-"):
            sign = 1 if self.advance().text == "+" else -1
            terms.append(self.term(sign))
        return start, terms

    def _is_var(self) -> bool:
        return self.tok.kind == "IDENT" and re.fullmatch(r"x\d+", self.tok.text) is not None

    def term(self, sign: int):
        pos = self.tok.pos
        coeff = 1
        exp: list[int] = []
        if self.tok.kind == "INT":
            coeff = int(self.advance().text)
            if self.at("*"):
                self.advance()
            elif not self._is_var():
                return exp, sign * coeff, pos
        self.factor(exp)
        while self.at("*"):
            self.advance()
            self.factor(exp)
        return exp, sign * coeff, pos

    def factor(self, exp: list[int]):
        if not self._is_var():
            self.fail(self.tok.pos, f"expected a variable x0, x1, ..., found {self._describe(self.tok)}")
        idx = int(self.advance().text[1:])
        power = 1
        if self.at("^"):
            self.advance()
            power = self.nat()
        while len(exp) <= idx:
            exp.append(0)
        exp[idx] += power

    def curvedef(self):
        start = self.advance().pos
        name = self.ident()
        self.expect("=")
        self.expect("[")
        a = self.integer()
        self.expect(",")
        b = self.integer()
        self.expect("]")
        span = Span(start, self.tokens[self.i - 1].pos + 1)
        if 4 * a ** 3 + 27 * b ** 2 == 0:
            self.errors.append(self.diag(start, "singular curve: 4a^3 + 27b^2 = 0"))
            return None
        return Definition("curve", name.text, EllipticCurve(a, b), span)

    def pointdef(self, doc: DslDocument):
        start = self.advance().pos
        name = self.ident()
        on_curve = False
        curve_name = None
        if self.at("on"):
            self.advance()
            on_curve = True
            ctok = self.ident()
            d = doc.definitions.get(ctok.text)
            if d is None or d.kind != "curve":
                self.errors.append(self.diag(ctok.pos, f"curve {ctok.text!r} is not defined"))
            else:
                curve_name = ctok.text
        self.expect("=")
        coords = None
        coord_pos = self.tok.pos
        if on_curve and self.at("O"):
            self.advance()
        else:
            self.expect("[")
            coords = [self.rational()]
            while self.at(":"):
                self.advance()
                coords.append(self.rational())
            if len(coords) < 2:
                self.fail(self.tok.pos, "a point needs at least two coordinates separated by ':'")
            self.expect("]")
        span = Span(start, self.tokens[self.i - 1].pos + 1)
        if on_curve:
            if curve_name is None:
                return None
            E = doc.definitions[curve_name].value
            if coords is None:
                return Definition("ecpoint", name.text, O, span, curve=curve_name)
            if len(coords) != 2:
                self.errors.append(self.diag(coord_pos, "a curve point is written [x : y]"))
                return None
            P = ECPoint(coords[0], coords[1])
            if not E.contains(P):
                self.errors.append(self.diag(coord_pos, f"{P} is not on {E}"))
                return None
            return Definition("ecpoint", name.text, P, span, curve=curve_name)
        if not any(coords):
            self.errors.append(self.diag(coord_pos, "all coordinates are zero"))
            return None
        return Definition("point", name.text, normalize(coords), span)

    def productdef(self, doc: DslDocument):
        start = self.advance().pos
        name = self.ident()
        self.expect("on")
        c1 = self.ident()
        self.expect("x")
        c2 = self.ident()
        self.expect("=")
        self.expect("(")
        self.expect("[")
        m1 = self.integer()
        self.expect("]")
        t_tok = None
        if self.at("+"):
            self.advance()
            t_tok = self.ident()
        self.expect(",")
        self.expect("[")
        m2 = self.integer()
        self.expect("]")
        self.expect(")")
        span = Span(start, self.tokens[self.i - 1].pos + 1)
        ok = True
        for ctok in (c1, c2):
            d = doc.definitions.get(ctok.text)
            if d is None or d.kind != "curve":
                self.errors.append(self.diag(ctok.pos, f"curve {ctok.text!r} is not defined"))
                ok = False
        T = O
        if t_tok is not None:
            d = doc.definitions.get(t_tok.text)
            if d is None or d.kind != "ecpoint":
                self.errors.append(self.diag(t_tok.pos, f"curve point {t_tok.text!r} is not defined"))
                ok = False
            elif d.curve != c1.text:
                self.errors.append(self.diag(t_tok.pos, f"{t_tok.text!r} is not a point of {c1.text!r}"))
                ok = False
            else:
                T = d.value
        if not ok:
            return None
        try:
            sys = ProductSystem(doc[c1.text], doc[c2.text], m1=m1, translation=T, m2=m2)
        except (ValueError, NotOnCurveError) as e:
            self.errors.append(self.diag(start, str(e)))
            return None
        refs = (c1.text, c2.text, t_tok.text if t_tok else None)
        return Definition("product", name.text, sys, span, refs=refs)


def parse(source: str) -> DslDocument:
    """Parse a document; raises :class:`DslError` carrying positioned diagnostics."""
    return _Parser(source).document()


# --- printing -----------------------------------------------------------------


def format_form(F: HomogForm) -> str:
    parts = []
    for exp, c in F.terms.items():
        mono = "*".join(f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(exp) if e)
        mag = abs(c)
        body = mono if mag == 1 and mono else (f"{mag}*{mono}" if mono else str(mag))
        if not parts:
            parts.append(body if c > 0 else "-" + body)
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts) if parts else "0"


def format_map(name: str, f: Morphism) -> str:
    n = f.dimension
    return f"map {name} : P{n} -> P{n} = [" + ", ".join(format_form(F) for F in f.forms) + "]"


def format_point(P: ProjPoint) -> str:
    return "[" + " : ".join(str(x) for x in P.coords) + "]"


def format_ecpoint(P: ECPoint) -> str:
    return "O" if P.is_identity else f"[{P.x} : {P.y}]"


def format_definition(d: Definition) -> str:
    v = d.value
    if d.kind == "map":
        return format_map(d.name, v)
    if d.kind == "curve":
        return f"curve {d.name} = [{v.a}, {v.b}]"
    if d.kind == "point":
        return f"point {d.name} = {format_point(v)}"
    if d.kind == "ecpoint":
        return f"point {d.name} on {d.curve} = {format_ecpoint(v)}"
    if d.kind == "product":
        c1, c2, t = d.refs
        shift = f" + {t}" if t else ""
        return f"product {d.name} on {c1} x {c2} = ([{v.m1}]{shift}, [{v.m2}])"
    raise ValueError(f"unknown definition kind {d.kind}")


def print_document(doc: DslDocument) -> str:
    return "".join(format_definition(d) + "\n" for d in doc.definitions.values())
