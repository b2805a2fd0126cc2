"""Weighted-graded polynomial rings, their quotients, and a module Groebner engine.

Polynomials are plain dicts ``{exponent tuple: coefficient}``.  Elements of a
free module ``P^r`` are dicts ``{(component, exponent tuple): coefficient}``.
Everything above this module speaks in those two shapes; :class:`RingElement`
is a thin user-facing wrapper.
"""

from __future__ import annotations

import heapq
from collections import defaultdict
from enum import Enum
from typing import Iterable, Sequence

from .scalars import GF, QQ, Field, FpElement, PrimeField


class InhomogeneousRelation(ValueError):
    """A relation mixes terms of different weighted degree."""


class NegativeWeight(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__("line %d, column %d: %s" % (line, column, message))
        self.line = line
        self.column = column
        self.message = message


class BaseClass(Enum):
    FIELD = "FIELD"
    UNIVARIATE_PID = "UNIVARIATE_PID"
    GENERAL = "GENERAL"


# ---------------------------------------------------------------------------
# polynomial and vector arithmetic on dicts


def padd(p: dict, q: dict) -> dict:
    out = dict(p)
    for e, c in q.items():
        v = out.get(e)
        if v is None:
            out[e] = c
        else:
            v = v + c
            if v:
                out[e] = v
            else:
                del out[e]
    return out


def pscale(p: dict, c) -> dict:
    if not c:
        return {}
    return {e: v * c for e, v in p.items()}


def psub(p: dict, q: dict) -> dict:
    return padd(p, pscale(q, -1))


def emul(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def pmul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = emul(e1, e2)
            v = out.get(e)
            v = c1 * c2 if v is None else v + c1 * c2
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def vadd(u: dict, v: dict) -> dict:
    return padd(u, v)


def vscale(v: dict, c) -> dict:
    return pscale(v, c)


def vmul(p: dict, v: dict) -> dict:
    """Multiply the module vector ``v`` by the polynomial ``p``."""
    out: dict = {}
    for e1, c1 in p.items():
        for (comp, e2), c2 in v.items():
            t = (comp, emul(e1, e2))
            val = out.get(t)
            val = c1 * c2 if val is None else val + c1 * c2
            if val:
                out[t] = val
            else:
                out.pop(t, None)
    return out


def vshift(v: dict, offset: int) -> dict:
    """Relabel components ``c -> c + offset``."""
    return {(c + offset, e): x for (c, e), x in v.items()}


def divides(a: tuple, b: tuple) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def elcm(a: tuple, b: tuple) -> tuple:
    return tuple(x if x > y else y for x, y in zip(a, b))


def ediv(a: tuple, b: tuple) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# polynomial text parsing


class _PolyParser:
    def __init__(self, text: str, names: Sequence[str], field: Field, line: int):
        self.text = text
        self.names = {n: i for i, n in enumerate(names)}
        self.n = len(names)
        self.field = field
        self.line = line
        self.pos = 0

    def error(self, msg: str):
        raise ParseError(msg, self.line, self.pos + 1)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> dict:
        p = self.expr()
        if self.peek():
            self.error("unexpected character %r" % self.peek())
        return p

    def expr(self) -> dict:
        sign = 1
        if self.peek() in "+-" and self.peek():
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        p = pscale(self.term(), self.field(sign))
        while self.peek() in ("+", "-") and self.peek():
            op = self.text[self.pos]
            self.pos += 1
            t = self.term()
            p = padd(p, t) if op == "+" else psub(p, t)
        return p

    def term(self) -> dict:
        p = self.power()
        while True:
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                p = pmul(p, self.power())
            elif ch and (ch.isalnum() or ch in "(_"):
                p = pmul(p, self.power())
            else:
                return p

    def power(self) -> dict:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            self.skip()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if start == self.pos:
                self.error("expected a nonnegative integer exponent")
            k = int(self.text[start:self.pos])
            out = {(0,) * self.n: self.field(1)}
            for _ in range(k):
                out = pmul(out, base)
            return out
        return base

    def atom(self) -> dict:
        ch = self.peek()
        if not ch:
            self.error("unexpected end of polynomial")
        if ch == "(":
            self.pos += 1
            p = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return p
        if ch.isdigit():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            c = self.field(int(self.text[start:self.pos]))
            return {(0,) * self.n: c} if c else {}
        if ch.isalpha() or ch == "_":
            start = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
                self.pos += 1
            name = self.text[start:self.pos]
            if name not in self.names:
                self.pos = start
                self.error("unknown variable %r" % name)
            e = [0] * self.n
            e[self.names[name]] = 1
            return {tuple(e): self.field(1)}
        self.error("unexpected character %r" % ch)


def parse_poly(text: str, names: Sequence[str], field: Field = QQ, line: int = 1) -> dict:
    return _PolyParser(text, names, field, line).parse()


def format_coeff(c) -> str:
    return str(c)


def format_poly(p: dict, names: Sequence[str], key=None) -> str:
    if not p:
        return "0"
    terms = sorted(p, key=key, reverse=True) if key else sorted(p, reverse=True)
    out = []
    for e in terms:
        c = p[e]
        mono = "*".join(
            (names[i] if k == 1 else "%s^%d" % (names[i], k)) for i, k in enumerate(e) if k
        )
        cs = format_coeff(c)
        neg = cs.startswith("-")
        if neg:
            cs = cs[1:]
        if not mono:
            body = cs
        elif cs == "1":
            body = mono
        else:
            body = "%s*%s" % (cs, mono)
        if not out:
            out.append("-" + body if neg else body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out)


# ---------------------------------------------------------------------------
# monomial and module orders


class ModuleOrder:
    """Term order on ``P^r``.

    Sort key (larger is bigger): block priority, weighted degree including the
    generator shift, standard degree, reverse lexicographic tie break with
    degree-0 variables last, then lower component index first.  Smaller block
    numbers dominate, which gives an elimination order across blocks.
    """

    def __init__(self, ring: "GradedRing", gdeg: Sequence[int], blocks: Sequence[int] | None = None):
        self.ring = ring
        self.gdeg = list(gdeg)
        self.blocks = list(blocks) if blocks is not None else [0] * len(self.gdeg)
        self._cache: dict = {}

    def negkey(self, term) -> tuple:
        """Key whose natural ascending order lists the largest term first."""
        k = self._cache.get(term)
        if k is None:
            comp, e = term
            r = self.ring
            k = (
                self.blocks[comp],
                -(r.wdeg(e) + self.gdeg[comp]),
                -sum(e),
            ) + tuple(e[i] for i in r._revlex) + (comp,)
            self._cache[term] = k
        return k

    def lead(self, v: dict):
        return min(v, key=self.negkey)

    def degree(self, term) -> tuple[int, int]:
        comp, e = term
        return (self.ring.wdeg(e) + self.gdeg[comp], sum(e))


class GroebnerEngine:
    """Incremental Buchberger algorithm for submodules of ``P^r``.

    Relations of the ring are added as ``h * e_c`` for every component listed
    in ``relation_components`` so the engine computes in ``A^r``.  Work is
    processed in increasing (weighted degree, standard degree) order; with a
    degree bound only that part is completed, which is exact for homogeneous
    input up to the bound.
    """

    def __init__(self, ring: "GradedRing", gdeg: Sequence[int], blocks: Sequence[int] | None = None,
                 relation_components: Iterable[int] | None = None, max_pairs: int | None = None):
        self.ring = ring
        self.field = ring.field
        self.order = ModuleOrder(ring, gdeg, blocks)
        self.rank = len(self.order.gdeg)
        self.basis: list[dict] = []
        self.leads: list[tuple] = []
        self.active: list[bool] = []
        self.reducers: dict[int, list[int]] = defaultdict(list)
        self.queue: list = []  # (deg, sdeg, seq, kind, payload)
        self.pending: set = set()
        self._seq = 0
        self.pairs_done = 0
        self.max_pairs = max_pairs
        self._relation_tag: list[int | None] = []
        comps = range(self.rank) if relation_components is None else relation_components
        for c in comps:
            for h in ring.gb:
                self._append({(c, e): x for e, x in h.items()}, tag=c)

    # -- bookkeeping

    def _push(self, deg, kind, payload):
        self._seq += 1
        heapq.heappush(self.queue, (deg[0], deg[1], self._seq, kind, payload))

    def _append(self, v: dict, tag=None) -> int:
        lt = self.order.lead(v)
        c = v[lt]
        if c != 1:
            inv = 1 / c
            v = {t: x * inv for t, x in v.items()}
        idx = len(self.basis)
        comp, e = lt
        for j in self.reducers[comp]:
            if tag is not None and self._relation_tag[j] == tag:
                continue  # relations of the ring already form a Groebner basis
            le = elcm(e, self.leads[j][1])
            self.pending.add((j, idx))
            self._push(self.order.degree((comp, le)), "pair", (j, idx))
        # an older element whose lead is divisible by the new lead is no longer needed
        for j in self.reducers[comp]:
            if divides(e, self.leads[j][1]):
                self.active[j] = False
        self.reducers[comp] = [j for j in self.reducers[comp] if self.active[j]]
        self.basis.append(v)
        self.leads.append(lt)
        self.active.append(True)
        self._relation_tag.append(tag)
        self.reducers[comp].append(idx)
        return idx

    def add(self, vectors: Iterable[dict]):
        for v in vectors:
            if v:
                lt = self.order.lead(v)
                self._push(self.order.degree(lt), "gen", v)

    # -- reduction

    def _find_reducer(self, term):
        comp, e = term
        for j in self.reducers.get(comp, ()):
            if divides(self.leads[j][1], e):
                return j
        return None

    def reduce(self, v: dict, full: bool = True) -> dict:
        """Normal form of ``v``; with ``full=False`` only the lead is made irreducible."""
        v = dict(v)
        nk = self.order.negkey
        heap = [(nk(t), t) for t in v]
        heapq.heapify(heap)
        out = {}
        while heap:
            _, t = heapq.heappop(heap)
            c = v.pop(t, None)
            if c is None:
                continue
            j = self._find_reducer(t)
            if j is None:
                out[t] = c
                if not full:
                    out.update(v)
                    return out
                continue
            g = self.basis[j]
            gl = self.leads[j]
            shift = ediv(t[1], gl[1])
            for (gc, ge), gx in g.items():
                if gc == gl[0] and ge == gl[1]:
                    continue
                nt = (gc, emul(ge, shift))
                old = v.get(nt)
                if old is None:
                    v[nt] = -c * gx
                    heapq.heappush(heap, (nk(nt), nt))
                else:
                    nv = old - c * gx
                    if nv:
                        v[nt] = nv
                    else:
                        del v[nt]
        return out

    def spoly(self, i: int, j: int) -> dict:
        (c, ei), (_, ej) = self.leads[i], self.leads[j]
        l = elcm(ei, ej)
        a = {(cc, emul(e, ediv(l, ei))): x for (cc, e), x in self.basis[i].items()}
        b = {(cc, emul(e, ediv(l, ej))): x for (cc, e), x in self.basis[j].items()}
        return vadd(a, vscale(b, -1))

    def _chain_skip(self, i: int, j: int) -> bool:
        comp = self.leads[i][0]
        l = elcm(self.leads[i][1], self.leads[j][1])
        for k in self.reducers[comp]:
            if k == i or k == j:
                continue
            if divides(self.leads[k][1], l):
                a = (min(i, k), max(i, k))
                b = (min(j, k), max(j, k))
                if a not in self.pending and b not in self.pending:
                    return True
        return False

    def complete(self, degree_bound: int | None = None):
        while self.queue:
            deg = self.queue[0][0]
            if degree_bound is not None and deg > degree_bound:
                break
            _, _, _, kind, payload = heapq.heappop(self.queue)
            if kind == "gen":
                h = self.reduce(payload)
            else:
                i, j = payload
                self.pending.discard((i, j))
                if self._chain_skip(i, j):
                    continue
                self.pairs_done += 1
                if self.max_pairs is not None and self.pairs_done > self.max_pairs:
                    raise ResourceCapExceeded("Groebner pair budget %d exhausted" % self.max_pairs)
                h = self.reduce(self.spoly(i, j))
            if h:
                self._append(h)
        return self

    # -- results

    def reduced_basis(self) -> list[dict]:
        """Reduced monic Groebner basis of everything added so far (completed part)."""
        idx = [i for i, a in enumerate(self.active) if a]
        out = []
        for i in idx:
            g = self.basis[i]
            lt = self.leads[i]
            tail = {t: x for t, x in g.items() if t != lt}
            # reduce the tail against the other active elements
            red = self.reduce(tail)
            red[lt] = self.field(1)
            out.append(red)
        out.sort(key=lambda v: self.order.negkey(self.order.lead(v)), reverse=True)
        return out

    def is_member(self, v: dict) -> bool:
        return not self.reduce(v, full=False)


class ResourceCapExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# the ring


class GradedRing:
    """Quotient ``P/I`` of a weighted polynomial ring by homogeneous relations."""

    def __init__(self, field: Field, names: Sequence[str], weights: Sequence[int],
                 relations: Sequence[dict] = ()):
        if len(names) != len(weights):
            raise ValueError("one weight per variable is required")
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        for n, w in zip(names, weights):
            if w < 0:
                raise NegativeWeight("variable %s has negative weight %d" % (n, w))
        self.field = field
        self.names = tuple(names)
        self.weights = tuple(int(w) for w in weights)
        self.nvars = len(names)
        self.zero_vars = tuple(i for i, w in enumerate(self.weights) if w == 0)
        self.pos_vars = tuple(i for i, w in enumerate(self.weights) if w > 0)
        # revlex: the last variable in this list is compared first, degree-0 ones last
        order_vars = list(self.pos_vars) + list(self.zero_vars)
        self._revlex = tuple(reversed(order_vars))
        self._wdeg_cache: dict = {}
        rels = []
        for r in relations:
            r = {e: field(c) for e, c in r.items() if c}
            if r:
                self._check_homogeneous(r)
                rels.append(r)
        self.relations = tuple(rels)
        self.gb: tuple = ()
        if rels:
            eng = GroebnerEngine(self, [0], relation_components=[])
            eng.add({(0, e): c for e, c in r.items()} for r in rels)
            eng.complete()
            self.gb = tuple({e: c for (_, e), c in v.items()} for v in eng.reduced_basis())
        self._nf_engine = GroebnerEngine(self, [0])
        self.bihomogeneous = all(len({sum(e) for e in r}) == 1 for r in self.relations)
        if not self.zero_vars:
            self.base_class = BaseClass.FIELD
        elif len(self.zero_vars) == 1 and all(self.poly_degree(r) != 0 for r in self.relations):
            self.base_class = BaseClass.UNIVARIATE_PID
        else:
            self.base_class = BaseClass.GENERAL

    # -- basics

    def wdeg(self, e: tuple) -> int:
        d = self._wdeg_cache.get(e)
        if d is None:
            d = sum(w * k for w, k in zip(self.weights, e))
            self._wdeg_cache[e] = d
        return d

    def _check_homogeneous(self, p: dict):
        terms = sorted(p)
        first = terms[0]
        d0 = self.wdeg(first)
        for e in terms[1:]:
            if self.wdeg(e) != d0:
                raise InhomogeneousRelation(
                    "terms %s (degree %d) and %s (degree %d) differ in weighted degree"
                    % (self.format({first: 1}), d0, self.format({e: 1}), self.wdeg(e))
                )

    def poly_degree(self, p: dict) -> int | None:
        if not p:
            return None
        degs = {self.wdeg(e) for e in p}
        if len(degs) != 1:
            raise InhomogeneousRelation("polynomial %s is not homogeneous" % self.format(p))
        return degs.pop()

    def is_homogeneous(self, p: dict) -> bool:
        return len({self.wdeg(e) for e in p}) <= 1

    @property
    def zero_exp(self) -> tuple:
        return (0,) * self.nvars

    def one(self) -> dict:
        return {self.zero_exp: self.field(1)}

    def const(self, c) -> dict:
        c = self.field(c)
        return {self.zero_exp: c} if c else {}

    def var(self, name: str) -> dict:
        e = [0] * self.nvars
        e[self.names.index(name)] = 1
        return {tuple(e): self.field(1)}

    def parse(self, text: str, line: int = 1) -> dict:
        return self.nf(parse_poly(text, self.names, self.field, line))

    def format(self, p: dict) -> str:
        o = ModuleOrder(self, [0])
        return format_poly(p, self.names, key=lambda e: tuple(-x for x in o.negkey((0, e))))

    def nf(self, p: dict) -> dict:
        if not self.gb or not p:
            return dict(p)
        red = self._nf_engine.reduce({(0, e): c for e, c in p.items()})
        return {e: c for (_, e), c in red.items()}

    def vnf(self, v: dict) -> dict:
        """Normal form of a module vector modulo ``I`` componentwise."""
        if not self.gb or not v:
            return dict(v)
        comps = defaultdict(dict)
        for (c, e), x in v.items():
            comps[c][e] = x
        out = {}
        for c in sorted(comps):
            for e, x in self.nf(comps[c]).items():
                out[(c, e)] = x
        return out

    def mul(self, p: dict, q: dict) -> dict:
        return self.nf(pmul(p, q))

    def element(self, p) -> "RingElement":
        if isinstance(p, str):
            p = self.parse(p)
        return RingElement(self, self.nf(p))

    def to_text(self) -> str:
        lines = ["field %s" % self.field.to_text(),
                 "vars " + " ".join("%s:%d" % (n, w) for n, w in zip(self.names, self.weights))]
        for r in self.relations:
            lines.append("rel " + self.format(r))
        return "\n".join(lines) + "\n"

    def signature(self) -> tuple:
        return (self.field, self.names, self.weights,
                tuple(tuple(sorted(r.items())) for r in self.relations))

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedRing) and self.signature() == other.signature()

    def __hash__(self) -> int:
        return hash((self.names, self.weights))

    def __repr__(self) -> str:
        vs = ", ".join("%s:%d" % (n, w) for n, w in zip(self.names, self.weights))
        rs = "".join(", " + self.format(r) for r in self.relations)
        return "GradedRing(%s; %s%s)" % (self.field, vs, rs)

    # -- related rings

    def polynomial_ring(self) -> "GradedRing":
        return GradedRing(self.field, self.names, self.weights)

    def degree_zero_ring(self) -> "GradedRing":
        """``P_0`` = polynomial ring in the weight-0 variables (weights kept at 0)."""
        names = [self.names[i] for i in self.zero_vars]
        return GradedRing(self.field, names, [0] * len(names))

    def degree_zero_relations(self) -> list[dict]:
        """Relations of ``A_0`` inside ``P_0`` (generated by degree-0 relations)."""
        out = []
        for r in self.relations:
            if self.poly_degree(r) == 0:
                out.append({tuple(e[i] for i in self.zero_vars): c for e, c in r.items()})
        return out

    def positive_monomials(self, d: int) -> list[tuple]:
        """Monomials in the positive-weight variables of weighted degree ``d``."""
        if d < 0:
            return []
        key = ("pm", d)
        cache = self.__dict__.setdefault("_pm_cache", {})
        if key in cache:
            return cache[key]
        pv = self.pos_vars
        res = []

        def rec(k, remaining, cur):
            if k == len(pv):
                if remaining == 0:
                    e = [0] * self.nvars
                    for i, x in zip(pv, cur):
                        e[i] = x
                    res.append(tuple(e))
                return
            w = self.weights[pv[k]]
            for x in range(remaining // w + 1):
                rec(k + 1, remaining - x * w, cur + [x])

        rec(0, d, [])
        res.sort()
        cache[key] = res
        return res


class RingElement:
    """An element of ``A`` stored as its normal form."""

    __slots__ = ("ring", "poly")

    def __init__(self, ring: GradedRing, poly: dict):
        self.ring = ring
        self.poly = poly

    def _lift(self, other) -> dict:
        if isinstance(other, RingElement):
            return other.poly
        return self.ring.const(other)

    def __add__(self, other):
        return RingElement(self.ring, self.ring.nf(padd(self.poly, self._lift(other))))

    __radd__ = __add__

    def __sub__(self, other):
        return RingElement(self.ring, self.ring.nf(psub(self.poly, self._lift(other))))

    def __rsub__(self, other):
        return RingElement(self.ring, self.ring.nf(psub(self._lift(other), self.poly)))

    def __neg__(self):
        return RingElement(self.ring, pscale(self.poly, -1))

    def __mul__(self, other):
        return RingElement(self.ring, self.ring.mul(self.poly, self._lift(other)))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = RingElement(self.ring, self.ring.one())
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, RingElement):
            return self.ring == other.ring and self.poly == other.poly
        return self.poly == self.ring.const(other)

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.poly.items(), key=lambda t: t[0])))

    def is_zero(self) -> bool:
        return not self.poly

    @property
    def degree(self) -> int | None:
        return self.ring.poly_degree(self.poly)

    def __repr__(self) -> str:
        return self.ring.format(self.poly)


def field_from_text(text: str) -> Field:
    """``"Q"`` or ``"F p"`` (also ``"GF(p)"``)."""
    t = text.strip()
    if t in ("Q", "QQ"):
        return QQ
    for prefix in ("F ", "GF(", "F"):
        if t.startswith(prefix):
            num = t[len(prefix):].rstrip(")").strip()
            if num.isdigit():
                return GF(int(num))
    raise ValueError("unknown field %r" % text)


def make_ring(field: Field, variables, relations: Sequence = (), order: str = "wdegrevlex") -> GradedRing:
    """Build a graded ring.

    ``variables`` is a sequence of ``(name, weight)`` pairs or a dict.  Relations
    may be strings or polynomial dicts.  Only the weighted degree-reverse-lex
    order is supported.
    """
    if order != "wdegrevlex":
        raise ValueError("unsupported monomial order %r" % order)
    if isinstance(field, str):
        field = field_from_text(field)
    if isinstance(variables, dict):
        variables = list(variables.items())
    names = [n for n, _ in variables]
    weights = [w for _, w in variables]
    for n, w in variables:
        if w < 0:
            raise NegativeWeight("variable %s has negative weight %d" % (n, w))
    rels = [parse_poly(r, names, field) if isinstance(r, str) else r for r in relations]
    return GradedRing(field, names, weights, rels)


# ---------------------------------------------------------------------------
# Groebner bases, syzygies and lifting for submodules of A^r


def groebner(ring: GradedRing, generators: Sequence[dict], gdeg: Sequence[int] | None = None) -> list[dict]:
    """Reduced Groebner basis of the submodule of ``A^r`` spanned by ``generators``.

    The ring relations are included (as ``h * e_c``); for ideals pass
    ``gdeg=[0]`` and vectors on component 0 or plain polynomials.
    """
    gens = [_as_vector(g) for g in generators]
    if gdeg is None:
        r = 1 + max((c for g in gens for (c, _) in g), default=0)
        gdeg = [0] * r
    eng = GroebnerEngine(ring, gdeg)
    eng.add(gens)
    eng.complete()
    return eng.reduced_basis()


def _as_vector(g: dict) -> dict:
    if not g:
        return {}
    k = next(iter(g))
    if isinstance(k, tuple) and len(k) == 2 and isinstance(k[1], tuple):
        return dict(g)
    return {(0, e): c for e, c in g.items()}


def normal_form(ring: GradedRing, v: dict, gb: Sequence[dict], gdeg: Sequence[int] | None = None) -> dict:
    """Normal form of ``v`` with respect to a Groebner basis ``gb``."""
    vec = _as_vector(v)
    basis = [_as_vector(g) for g in gb]
    if gdeg is None:
        r = 1 + max((c for g in basis + [vec] for (c, _) in g), default=0)
        gdeg = [0] * r
    eng = GroebnerEngine(ring, gdeg, relation_components=[])
    for g in basis:
        eng._append(g)
    eng.queue.clear()
    eng.pending.clear()
    out = eng.reduce(vec)
    if v and not (isinstance(next(iter(v)), tuple) and len(next(iter(v))) == 2 and isinstance(next(iter(v))[1], tuple)):
        return {e: c for (_, e), c in out.items()}
    return out


def buchberger_certificate(ring: GradedRing, gb: Sequence[dict], gdeg: Sequence[int] | None = None) -> bool:
    """Re-check that every S-pair of ``gb`` reduces to zero (ring relations included)."""
    basis = [_as_vector(g) for g in gb]
    if gdeg is None:
        r = 1 + max((c for g in basis for (c, _) in g), default=0)
        gdeg = [0] * r
    eng = GroebnerEngine(ring, gdeg, relation_components=[])
    for c in range(len(gdeg)):
        for h in ring.gb:
            eng._append({(c, e): x for e, x in h.items()})
    for g in basis:
        eng._append(g)
    n = len(eng.basis)
    for i in range(n):
        for j in range(i + 1, n):
            if eng.leads[i][0] != eng.leads[j][0]:
                continue
            if eng.reduce(eng.spoly(i, j)):
                return False
    return True


class ImageData:
    """Groebner data for the map ``f: A^s -> A^r`` given by columns.

    Computes a basis of the augmented module ``{(f u + i, u)}`` in an
    elimination order; kernel generators and preimages are read off it.
    """

    def __init__(self, ring: GradedRing, columns: Sequence[dict], tgt_degs: Sequence[int],
                 src_degs: Sequence[int], max_pairs: int | None = None):
        self.ring = ring
        self.r = len(tgt_degs)
        self.s = len(src_degs)
        self.tgt_degs = list(tgt_degs)
        self.src_degs = list(src_degs)
        gdeg = list(tgt_degs) + list(src_degs)
        blocks = [0] * self.r + [1] * self.s
        self.engine = GroebnerEngine(ring, gdeg, blocks, relation_components=range(self.r), max_pairs=max_pairs)
        gens = []
        for i, col in enumerate(columns):
            v = dict(col)
            v[(self.r + i, ring.zero_exp)] = ring.field(1)
            gens.append(v)
        self.engine.add(gens)
        self.engine.complete()
        self._kernel = None

    def kernel(self) -> list[dict]:
        if self._kernel is None:
            out = []
            for v in self.engine.reduced_basis():
                if all(c >= self.r for (c, _) in v):
                    u = self.ring.vnf(vshift(v, -self.r))
                    if u:
                        out.append(u)
            self._kernel = out
        return self._kernel

    def lift(self, target: dict):
        """Preimage of ``target`` or ``None`` when it is not in the image."""
        red = self.engine.reduce(target)
        if any(c < self.r for (c, _) in red):
            return None
        return self.ring.vnf(vscale(vshift(red, -self.r), -1))


def syzygies(f):
    """Kernel of a :class:`~orlovkit.grmod.GradedMap` as a map into its source."""
    from .grmod import GradedMap, GradedFreeModule

    data = ImageData(f.ring, f.columns, f.target.degrees, f.source.degrees)
    ker = data.kernel()
    degs = [vector_degree(f.ring, v, f.source.degrees) for v in ker]
    order = sorted(range(len(ker)), key=lambda i: degs[i])
    return GradedMap(GradedFreeModule(f.ring, [degs[i] for i in order]), f.source, [ker[i] for i in order])


class NotInImage(Exception):
    pass


def lift(target, through):
    """Solve ``through * u = target``.

    ``target`` is a vector in the target of ``through`` or a
    :class:`~orlovkit.grmod.GradedMap` with the same target; raises
    :class:`NotInImage` when no preimage exists.
    """
    from .grmod import GradedMap

    data = ImageData(through.ring, through.columns, through.target.degrees, through.source.degrees)
    if isinstance(target, GradedMap):
        cols = []
        for col in target.columns:
            u = data.lift(col)
            if u is None:
                raise NotInImage("column not in the image")
            cols.append(u)
        return GradedMap(target.source, through.source, cols)
    u = data.lift(target)
    if u is None:
        raise NotInImage("element not in the image")
    return u


def vector_degree(ring: GradedRing, v: dict, gdeg: Sequence[int]) -> int | None:
    """Weighted degree of a homogeneous module vector (``None`` for zero)."""
    degs = {ring.wdeg(e) + gdeg[c] for (c, e) in v}
    if not degs:
        return None
    if len(degs) != 1:
        raise InhomogeneousRelation("module element is not homogeneous")
    return degs.pop()
