"""Graded free modules, homogeneous maps and finitely presented graded modules.

Convention: a generator of degree ``g`` spans the summand ``A(-g)``; so
``A(e)`` is the rank-one free module with generator degree ``-e`` and
``M(e)_i = M_{e+i}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .basemod import BaseModule, base_ring_of, is_field
from .grring import (
    GradedRing,
    GroebnerEngine,
    ImageData,
    ResourceCapExceeded,
    divides,
    vadd,
    vector_degree,
    vmul,
    vscale,
    vshift,
)


class DegreeMismatch(ValueError):
    pass


class UnboundedSlice(ValueError):
    pass


class SaturationCapExceeded(ResourceCapExceeded):
    pass


# ---------------------------------------------------------------------------
# free modules and maps


@dataclass(frozen=True)
class GradedFreeModule:
    ring: GradedRing
    degrees: tuple

    def __init__(self, ring: GradedRing, degrees: Sequence[int]):
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "degrees", tuple(int(d) for d in degrees))

    @property
    def rank(self) -> int:
        return len(self.degrees)

    def twist(self, e: int) -> "GradedFreeModule":
        return GradedFreeModule(self.ring, [g - e for g in self.degrees])

    def __add__(self, other: "GradedFreeModule") -> "GradedFreeModule":
        return GradedFreeModule(self.ring, self.degrees + other.degrees)

    def basis_vector(self, i: int) -> dict:
        return {(i, self.ring.zero_exp): self.ring.field(1)}

    def slice_terms(self, t: int) -> list[tuple]:
        """All terms ``(c, exponent)`` of weighted degree ``t`` in positive-weight variables."""
        out = []
        for c, g in enumerate(self.degrees):
            for mu in self.ring.positive_monomials(t - g):
                out.append((c, mu))
        return out

    def __repr__(self) -> str:
        if not self.degrees:
            return "0"
        return " + ".join("A(%d)" % (-g) for g in self.degrees)


def free(ring: GradedRing, degrees: Sequence[int]) -> GradedFreeModule:
    return GradedFreeModule(ring, degrees)


class GradedMap:
    """Homogeneous degree-0 map between graded free modules.

    Stored by columns: ``columns[s]`` is the image of generator ``s`` as a
    module vector in the target.  Entry (t, s) has degree
    ``source.degrees[s] - target.degrees[t]``.
    """

    def __init__(self, source: GradedFreeModule, target: GradedFreeModule, columns: Sequence[dict],
                 check: bool = True):
        if len(columns) != source.rank:
            raise ValueError("expected %d columns, got %d" % (source.rank, len(columns)))
        self.source = source
        self.target = target
        self.ring = source.ring
        self.columns = [self.ring.vnf(dict(c)) if self.ring.gb else dict(c) for c in columns]
        if check:
            for s, col in enumerate(self.columns):
                for (t, e) in col:
                    if t >= target.rank:
                        raise ValueError("column %d refers to target generator %d" % (s, t))
                    if self.ring.wdeg(e) + target.degrees[t] != source.degrees[s]:
                        err = DegreeMismatch(
                            "entry (%d, %d) has degree %d, expected %d"
                            % (t, s, self.ring.wdeg(e), source.degrees[s] - target.degrees[t])
                        )
                        err.row = t
                        raise err

    @classmethod
    def from_matrix(cls, source: GradedFreeModule, target: GradedFreeModule, rows) -> "GradedMap":
        """Build from a row-major matrix of polynomials (dicts or strings)."""
        ring = source.ring
        cols = [dict() for _ in range(source.rank)]
        for t, row in enumerate(rows):
            if len(row) != source.rank:
                raise ValueError("row %d has %d entries, expected %d" % (t, len(row), source.rank))
            for s, p in enumerate(row):
                if isinstance(p, str):
                    p = ring.parse(p)
                elif not isinstance(p, dict):
                    p = ring.const(p)
                for e, c in p.items():
                    cols[s][(t, e)] = c
        return cls(source, target, cols)

    @classmethod
    def zero(cls, source: GradedFreeModule, target: GradedFreeModule) -> "GradedMap":
        return cls(source, target, [{} for _ in range(source.rank)], check=False)

    @classmethod
    def identity(cls, F: GradedFreeModule) -> "GradedMap":
        return cls(F, F, [F.basis_vector(i) for i in range(F.rank)], check=False)

    def entry(self, t: int, s: int) -> dict:
        return {e: c for (tt, e), c in self.columns[s].items() if tt == t}

    def rows(self) -> list[list[dict]]:
        return [[self.entry(t, s) for s in range(self.source.rank)] for t in range(self.target.rank)]

    def apply(self, v: dict) -> dict:
        """Image of a module vector in the source."""
        by = {}
        for (c, e), x in v.items():
            by.setdefault(c, {})[e] = x
        out: dict = {}
        for c in sorted(by):
            out = vadd(out, vmul(by[c], self.columns[c]))
        return self.ring.vnf(out)

    def compose(self, other: "GradedMap") -> "GradedMap":
        """``self o other``."""
        return GradedMap(other.source, self.target, [self.apply(c) for c in other.columns], check=False)

    def __matmul__(self, other: "GradedMap") -> "GradedMap":
        return self.compose(other)

    def __add__(self, other: "GradedMap") -> "GradedMap":
        return GradedMap(self.source, self.target,
                         [vadd(a, b) for a, b in zip(self.columns, other.columns)], check=False)

    def scale(self, c) -> "GradedMap":
        c = self.ring.field(c)
        return GradedMap(self.source, self.target, [vscale(a, c) for a in self.columns], check=False)

    def __neg__(self) -> "GradedMap":
        return self.scale(-1)

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        return self + (-other)

    def is_zero(self) -> bool:
        return all(not c for c in self.columns)

    def __eq__(self, other) -> bool:
        return (isinstance(other, GradedMap) and self.source == other.source
                and self.target == other.target and self.columns == other.columns)

    def transpose(self) -> "GradedMap":
        """``Hom(-, A)`` of the map: target* -> source*, degrees negated."""
        src = GradedFreeModule(self.ring, [-g for g in self.target.degrees])
        tgt = GradedFreeModule(self.ring, [-g for g in self.source.degrees])
        cols = [dict() for _ in range(src.rank)]
        for s, col in enumerate(self.columns):
            for (t, e), c in col.items():
                cols[t][(s, e)] = c
        return GradedMap(src, tgt, cols, check=False)

    def twist(self, e: int) -> "GradedMap":
        return GradedMap(self.source.twist(e), self.target.twist(e), self.columns, check=False)

    def restrict(self, src_idx: Sequence[int], tgt_idx: Sequence[int]) -> "GradedMap":
        """Block of the matrix on the chosen source and target generators."""
        pos = {t: i for i, t in enumerate(tgt_idx)}
        cols = []
        for s in src_idx:
            cols.append({(pos[t], e): c for (t, e), c in self.columns[s].items() if t in pos})
        return GradedMap(GradedFreeModule(self.ring, [self.source.degrees[s] for s in src_idx]),
                         GradedFreeModule(self.ring, [self.target.degrees[t] for t in tgt_idx]),
                         cols, check=False)

    def format_rows(self) -> list[list[str]]:
        return [[self.ring.format(p) for p in row] for row in self.rows()]

    def __repr__(self) -> str:
        return "GradedMap(%r -> %r, %s)" % (self.source, self.target, self.format_rows())


def hstack(maps: Sequence[GradedMap]) -> GradedMap:
    """``[f1 | f2 | ...]`` with a common target."""
    tgt = maps[0].target
    degs = []
    cols = []
    for f in maps:
        degs += list(f.source.degrees)
        cols += f.columns
    return GradedMap(GradedFreeModule(tgt.ring, degs), tgt, cols, check=False)


def block_map(ring: GradedRing, sources: Sequence[GradedFreeModule], targets: Sequence[GradedFreeModule],
              blocks: dict) -> GradedMap:
    """Assemble a block matrix; ``blocks[(t, s)]`` maps ``sources[s] -> targets[t]``."""
    src_off = [0]
    for F in sources:
        src_off.append(src_off[-1] + F.rank)
    tgt_off = [0]
    for F in targets:
        tgt_off.append(tgt_off[-1] + F.rank)
    cols = [dict() for _ in range(src_off[-1])]
    for (t, s), f in blocks.items():
        for j, col in enumerate(f.columns):
            cols[src_off[s] + j] = vadd(cols[src_off[s] + j], vshift(col, tgt_off[t]))
    src = GradedFreeModule(ring, [g for F in sources for g in F.degrees])
    tgt = GradedFreeModule(ring, [g for F in targets for g in F.degrees])
    return GradedMap(src, tgt, cols, check=False)


# ---------------------------------------------------------------------------
# presented modules


class PresentedModule:
    """``coker(rel: F1 -> F0)``."""

    def __init__(self, rel: GradedMap):
        self.rel = rel
        self.ring = rel.ring
        self._gb = None
        self._slices: dict = {}

    @classmethod
    def free(cls, F: GradedFreeModule) -> "PresentedModule":
        return cls(GradedMap.zero(GradedFreeModule(F.ring, []), F))

    @classmethod
    def from_rows(cls, ring: GradedRing, gens: Sequence[int], rows: Sequence[Sequence]) -> "PresentedModule":
        """Relations given as rows (one relation per row, one polynomial per generator)."""
        F0 = GradedFreeModule(ring, gens)
        cols = []
        degs = []
        for row in rows:
            v = {}
            for c, p in enumerate(row):
                if isinstance(p, str):
                    p = ring.parse(p)
                elif not isinstance(p, dict):
                    p = ring.const(p)
                for e, x in p.items():
                    v[(c, e)] = x
            v = ring.vnf(v)
            if not v:
                continue
            cols.append(v)
            degs.append(vector_degree(ring, v, gens))
        return cls(GradedMap(GradedFreeModule(ring, degs), F0, cols))

    @classmethod
    def quotient_ring(cls, ring: GradedRing, ideal: Sequence, shift: int = 0) -> "PresentedModule":
        """``(A / ideal)(-shift)``."""
        return cls.from_rows(ring, [shift], [[p] for p in ideal])

    @property
    def F0(self) -> GradedFreeModule:
        return self.rel.target

    @property
    def F1(self) -> GradedFreeModule:
        return self.rel.source

    @property
    def gens(self) -> tuple:
        return self.F0.degrees

    def engine(self) -> GroebnerEngine:
        """Completed Groebner data for ``im(rel) + I F0``."""
        if self._gb is None:
            eng = GroebnerEngine(self.ring, self.F0.degrees)
            eng.add(self.rel.columns)
            eng.complete()
            self._gb = eng
        return self._gb

    def reduce(self, v: dict) -> dict:
        return self.engine().reduce(v)

    def is_zero_element(self, v: dict) -> bool:
        return not self.engine().reduce(v, full=False)

    def twist(self, e: int) -> "PresentedModule":
        return PresentedModule(self.rel.twist(e))

    def is_zero(self) -> bool:
        return all(self.is_zero_element(self.F0.basis_vector(i)) for i in range(self.F0.rank))

    # -- slices

    def slice(self, t: int) -> "Slice":
        s = self._slices.get(t)
        if s is None:
            s = Slice(self, t)
            self._slices[t] = s
        return s

    def dim(self, t: int):
        return self.slice(t).base_module().dim()

    def __repr__(self) -> str:
        return "PresentedModule(gens=%s, %d relations)" % (list(self.gens), self.F1.rank)


class Slice:
    """Degree-``t`` part of a presented module as an ``A_0``-module.

    Over a field base the generators are the standard monomials of degree
    ``t`` and there are no relations.  Otherwise generators are the terms
    ``mu * e_c`` with ``mu`` a monomial in the positive-weight variables, and
    relations are the degree-``t`` multiples of the presentation relations and
    ring relations, expanded over ``A_0``.
    """

    def __init__(self, module: PresentedModule, t: int):
        self.module = module
        self.degree = t
        ring = module.ring
        self.ring = ring
        self.base = base_ring_of(ring)
        self.field_base = is_field(self.base)
        F0 = module.F0
        if self.field_base:
            eng = module.engine()
            terms = []
            for c, mu in F0.slice_terms(t):
                if eng._find_reducer((c, mu)) is None:
                    terms.append((c, mu))
            self.terms = terms
            self.index = {term: i for i, term in enumerate(terms)}
            self.relations = []
        else:
            self.terms = F0.slice_terms(t)
            self.index = {term: i for i, term in enumerate(self.terms)}
            rels = []
            gens = list(module.rel.columns)
            gdeg = [vector_degree(ring, v, F0.degrees) for v in gens]
            for c in range(F0.rank):
                for h in ring.gb:
                    gens.append({(c, e): x for e, x in h.items()})
                    gdeg.append(ring.poly_degree(h) + F0.degrees[c])
            for g, d in zip(gens, gdeg):
                if d is None:
                    continue
                for nu in ring.positive_monomials(t - d):
                    v = self.coords({(c, _emul(e, nu)): x for (c, e), x in g.items()}, reduce=False)
                    if v:
                        rels.append(v)
            self.relations = rels

    @property
    def ngens(self) -> int:
        return len(self.terms)

    def coords(self, v: dict, reduce: bool = True) -> dict:
        """Base-ring coordinates of a degree-``t`` vector of ``F0``."""
        if not v:
            return {}
        ring = self.ring
        if self.field_base:
            if reduce:
                v = self.module.reduce(v)
            out = {}
            for term, x in v.items():
                out[(self.index[term], ())] = x
            return out
        zv = ring.zero_vars
        out = {}
        for (c, e), x in v.items():
            mu = list(e)
            alpha = tuple(e[i] for i in zv)
            for i in zv:
                mu[i] = 0
            key = (self.index[(c, tuple(mu))], alpha)
            old = out.get(key)
            nv = x if old is None else old + x
            if nv:
                out[key] = nv
            else:
                out.pop(key, None)
        return self.base.vnf(out)

    def element(self, i: int) -> dict:
        """The ``A``-vector of slice generator ``i``."""
        c, mu = self.terms[i]
        return {(c, mu): self.ring.field(1)}

    def base_to_vector(self, v: dict) -> dict:
        """Inverse of :meth:`coords` on generators: base vector -> ``F0`` vector."""
        ring = self.ring
        out = {}
        for (i, alpha), x in v.items():
            c, mu = self.terms[i]
            e = list(mu)
            for k, a in zip(ring.zero_vars, alpha):
                e[k] += a
            out[(c, tuple(e))] = x
        return out

    def base_module(self) -> BaseModule:
        return BaseModule(self.base, self.ngens, list(self.relations))


def _emul(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def slice_map(src: Slice, tgt: Slice, fn) -> list[dict]:
    """Matrix (by columns) of an ``A_0``-linear map between slices.

    ``fn`` sends an ``F0``-vector of the source module to an ``F0``-vector of
    the target module.
    """
    return [tgt.coords(fn(src.element(i))) for i in range(src.ngens)]


def twist(M: PresentedModule, e: int) -> PresentedModule:
    return M.twist(e)


def slice(M: PresentedModule, j: int) -> Slice:
    return M.slice(j)


# ---------------------------------------------------------------------------
# submodules, truncation, torsion


def submodule_presentation(M: PresentedModule, gens: Sequence[dict]) -> tuple[PresentedModule, GradedMap]:
    """Presentation of the submodule of ``M`` generated by ``gens`` plus the inclusion on generators."""
    ring = M.ring
    gens = [ring.vnf(g) for g in gens]
    gens = [g for g in gens if g]
    degs = [vector_degree(ring, g, M.gens) for g in gens]
    G = GradedFreeModule(ring, degs)
    incl = GradedMap(G, M.F0, gens, check=False)
    k = len(gens)
    if k == 0:
        return PresentedModule.free(G), incl
    data = ImageData(ring, gens + list(M.rel.columns), M.gens, degs + list(M.F1.degrees))
    rels = []
    for v in data.kernel():
        u = {(c, e): x for (c, e), x in v.items() if c < k}
        if u:
            rels.append(u)
    rdeg = [vector_degree(ring, u, degs) for u in rels]
    return PresentedModule(GradedMap(GradedFreeModule(ring, rdeg), G, rels, check=False)), incl


def ideal_generators_geq(ring: GradedRing, d: int) -> list[tuple]:
    """Monomials generating ``(A_{>=d})`` as an ideal, in positive-weight variables."""
    if d <= 0:
        return [ring.zero_exp]
    pv = ring.pos_vars
    out = []
    maxw = max(ring.weights[i] for i in pv) if pv else 0
    for deg in range(d, d + maxw):
        for mu in ring.positive_monomials(deg):
            # minimal: removing any variable drops below d
            if all(ring.wdeg(mu) - ring.weights[i] < d for i in pv if mu[i] > 0):
                out.append(mu)
    return out


@dataclass
class Truncation:
    sub: PresentedModule
    inclusion: GradedMap
    quotient: PresentedModule


def truncate_geq(M: PresentedModule, i: int) -> Truncation:
    """``M_{>=i}``, its inclusion into ``F0`` and the quotient ``M / M_{>=i}``."""
    ring = M.ring
    gens = []
    for c, g in enumerate(M.gens):
        for mu in ideal_generators_geq(ring, i - g):
            gens.append({(c, mu): ring.field(1)})
    gens = [v for v in gens if not M.is_zero_element(v)]
    sub, incl = submodule_presentation(M, gens)
    qcols = list(M.rel.columns) + list(incl.columns)
    qdeg = list(M.F1.degrees) + list(incl.source.degrees)
    quotient = PresentedModule(GradedMap(GradedFreeModule(ring, qdeg), M.F0, qcols, check=False))
    return Truncation(sub, incl, quotient)


def colon_by_positive(M: PresentedModule, U: Sequence[dict], udeg: Sequence[int]) -> list[dict]:
    """Generators of ``{v in F0 : x v in U for every positive-weight variable x}``.

    ``U`` must contain the relations of ``M``.
    """
    ring = M.ring
    F0 = M.F0
    pv = ring.pos_vars
    q = len(pv)
    r = F0.rank
    # target: F0^q, with generator (l, c) at index l*r + c
    tgt_deg = []
    for l in pv:
        tgt_deg += [g + ring.weights[l] for g in F0.degrees]
    cols = []
    src_deg = []
    for c in range(r):
        v = {}
        for li, l in enumerate(pv):
            e = [0] * ring.nvars
            e[l] = 1
            v[(li * r + c, tuple(e))] = ring.field(1)
        cols.append(v)
        src_deg.append(F0.degrees[c])
    for li, l in enumerate(pv):
        for u, d in zip(U, udeg):
            cols.append({(li * r + c, e): x for (c, e), x in u.items()})
            src_deg.append(d + ring.weights[l])
    data = ImageData(ring, cols, [tgt_deg[k] for k in range(len(tgt_deg))], src_deg)
    out = []
    for v in data.kernel():
        u = {(c, e): x for (c, e), x in v.items() if c < r}
        if u:
            out.append(u)
    return out


@dataclass
class TorsionResult:
    module: PresentedModule
    inclusion: GradedMap
    exponent: int


def torsion_submodule(M: PresentedModule, cap: int = 64) -> TorsionResult:
    """Torsion submodule by saturation ``(0 :_M (A_{>=1})^p)`` until it stabilizes."""
    ring = M.ring
    U = list(M.rel.columns)
    udeg = list(M.F1.degrees)
    if not ring.pos_vars:
        # A = A_0: nothing is torsion
        sub, incl = submodule_presentation(M, [])
        return TorsionResult(sub, incl, 0)
    p = 0
    while True:
        if p >= cap:
            raise SaturationCapExceeded("torsion saturation did not stabilize by exponent %d" % cap)
        new = colon_by_positive(M, U, udeg)
        eng = GroebnerEngine(ring, M.gens)
        eng.add(U)
        eng.complete()
        extra = [v for v in new if eng.reduce(v, full=False)]
        if not extra:
            break
        p += 1
        U = U + extra
        udeg = udeg + [vector_degree(ring, v, M.gens) for v in extra]
    tors = [v for v in U[len(M.rel.columns):]]
    sub, incl = submodule_presentation(M, tors)
    return TorsionResult(sub, incl, p)


def hom_graded(M: PresentedModule, N: PresentedModule, e: int) -> BaseModule:
    """Degree-``e`` homomorphisms ``M -> N`` as an ``A_0``-module."""
    from .complexes import FreeComplex, ModuleComplex, hom_cohomology

    X = FreeComplex.presentation(M)
    Y = ModuleComplex.single(N)
    return hom_cohomology(X, Y, 0, e)
