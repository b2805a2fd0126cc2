"""Cochain complexes of graded free modules and of presented modules.

A :class:`FreeComplex` represents a window ``[lo, hi]`` of a possibly
unbounded complex.  ``open_below`` / ``open_above`` record that terms exist
outside the window; an optional ``extender`` produces a deeper window of the
same object and a :class:`Band` carries what is certified about the omitted
part.  Consumers that need a term outside the window either extend or raise
:class:`WindowExceeded`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

from .basemod import BaseModule, base_ring_of, homology
from .grmod import (
    GradedFreeModule,
    GradedMap,
    PresentedModule,
    block_map,
    submodule_presentation,
)
from .grring import GradedRing, ImageData, vector_degree


class WindowExceeded(RuntimeError):
    pass


class NotChainMap(ValueError):
    pass


class NotAComplex(ValueError):
    pass


class MissingBandCertificate(ValueError):
    pass


@dataclass(frozen=True)
class Band:
    """What is known about the omitted part below the window.

    ``acyclic_below``: cohomology vanishes at every index below this one.
    ``min_degree``: every omitted term has all generator degrees >= this bound
    (``None`` when nothing is certified).
    """

    acyclic_below: Optional[int] = None
    min_degree: Optional[int] = None


class FreeComplex:
    def __init__(self, ring: GradedRing, terms: dict, diffs: dict, lo: int, hi: int,
                 open_below: bool = False, open_above: bool = False, band: Band | None = None,
                 extender: Callable[[int, int], "FreeComplex"] | None = None, check: bool = True):
        self.ring = ring
        self.lo = lo
        self.hi = hi
        self.terms = {j: terms.get(j, GradedFreeModule(ring, [])) for j in range(lo, hi + 1)}
        self.diffs = {}
        for j in range(lo, hi):
            d = diffs.get(j)
            if d is None:
                d = GradedMap.zero(self.terms[j], self.terms[j + 1])
            self.diffs[j] = d
        self.open_below = open_below
        self.open_above = open_above
        self.band = band or Band()
        self.extender = extender
        if check:
            self.check()

    def check(self):
        for j in range(self.lo, self.hi - 1):
            comp = self.diffs[j + 1].compose(self.diffs[j])
            if not comp.is_zero():
                raise NotAComplex("d^%d o d^%d != 0" % (j + 1, j))
        for j, d in self.diffs.items():
            if d.source.degrees != self.terms[j].degrees or d.target.degrees != self.terms[j + 1].degrees:
                raise NotAComplex("differential %d does not match its terms" % j)

    # -- constructors

    @classmethod
    def single(cls, F: GradedFreeModule, index: int = 0) -> "FreeComplex":
        return cls(F.ring, {index: F}, {}, index, index)

    @classmethod
    def presentation(cls, M: PresentedModule) -> "FreeComplex":
        """``F1 -> F0`` in indices ``[-1, 0]``, a free complex with ``H^0 = M``.

        Only ``H^0`` is meaningful; it is used for ``Hom(M, -)`` in cohomological degree 0.
        """
        return cls(M.ring, {-1: M.F1, 0: M.F0}, {-1: M.rel}, -1, 0, open_below=True)

    # -- access

    def term(self, j: int) -> GradedFreeModule:
        if self.lo <= j <= self.hi:
            return self.terms[j]
        if (j < self.lo and self.open_below) or (j > self.hi and self.open_above):
            raise WindowExceeded("term %d outside the window [%d, %d]" % (j, self.lo, self.hi))
        return GradedFreeModule(self.ring, [])

    def diff(self, j: int) -> GradedMap:
        if self.lo <= j < self.hi:
            return self.diffs[j]
        src, tgt = self.term(j), self.term(j + 1)
        if src.rank and tgt.rank:
            raise WindowExceeded("differential %d outside the window" % j)
        return GradedMap.zero(src, tgt)

    def covers(self, lo: int, hi: int) -> bool:
        if lo < self.lo and self.open_below:
            return False
        if hi > self.hi and self.open_above:
            return False
        return True

    def extended(self, lo: int, hi: int | None = None) -> "FreeComplex":
        """A window of the same object covering ``[lo, hi]`` (self when already covered)."""
        hi = self.hi if hi is None else hi
        if self.covers(lo, hi):
            return self
        if self.extender is None:
            raise WindowExceeded("window [%d, %d] cannot be extended to [%d, %d]" % (self.lo, self.hi, lo, hi))
        X = self.extender(min(lo, self.lo), max(hi, self.hi))
        if not X.covers(lo, hi):
            raise WindowExceeded("extension did not reach [%d, %d]" % (lo, hi))
        return X

    def min_generator_degree(self, j: int) -> Optional[int]:
        F = self.term(j)
        return min(F.degrees) if F.degrees else None

    def to_module_complex(self) -> "ModuleComplex":
        if self.open_below or self.open_above:
            raise WindowExceeded("cannot view an open window as a bounded complex")
        return ModuleComplex(self.ring, {j: PresentedModule.free(F) for j, F in self.terms.items()},
                             dict(self.diffs), self.lo, self.hi, check=False)

    def __repr__(self) -> str:
        parts = ["%d:%r" % (j, self.terms[j]) for j in range(self.lo, self.hi + 1)]
        pre = "... " if self.open_below else ""
        post = " ..." if self.open_above else ""
        return "FreeComplex(" + pre + ", ".join(parts) + post + ")"


class ModuleComplex:
    """Bounded complex of presented modules; ``diffs[j]`` lifts ``d^j`` to ``F0`` level."""

    def __init__(self, ring: GradedRing, terms: dict, diffs: dict, lo: int, hi: int, check: bool = True):
        self.ring = ring
        self.lo = lo
        self.hi = hi
        self.terms = {}
        for j in range(lo, hi + 1):
            M = terms.get(j)
            if M is None:
                M = PresentedModule.free(GradedFreeModule(ring, []))
            self.terms[j] = M
        self.diffs = {}
        for j in range(lo, hi):
            d = diffs.get(j)
            if d is None:
                d = GradedMap.zero(self.terms[j].F0, self.terms[j + 1].F0)
            self.diffs[j] = d
        # set by soft_truncate_above: kernel generators -> F0 of the original top term
        self.top_inclusion: Optional[GradedMap] = None
        if check:
            self.check()

    def check(self):
        for j, d in self.diffs.items():
            tgt = self.terms[j + 1]
            for col in d.compose(self.terms[j].rel).columns:
                if not tgt.is_zero_element(col):
                    raise NotAComplex("d^%d does not respect the relations" % j)
            if j + 1 in self.diffs:
                for col in self.diffs[j + 1].compose(d).columns:
                    if not self.terms[j + 2].is_zero_element(col):
                        raise NotAComplex("d^%d o d^%d != 0" % (j + 1, j))

    @classmethod
    def single(cls, M: PresentedModule, index: int = 0) -> "ModuleComplex":
        return cls(M.ring, {index: M}, {}, index, index, check=False)

    def term(self, j: int) -> PresentedModule:
        if self.lo <= j <= self.hi:
            return self.terms[j]
        return PresentedModule.free(GradedFreeModule(self.ring, []))

    def diff(self, j: int) -> GradedMap:
        if self.lo <= j < self.hi:
            return self.diffs[j]
        return GradedMap.zero(self.term(j).F0, self.term(j + 1).F0)

    def trimmed(self) -> "ModuleComplex":
        """Drop zero modules at both ends."""
        lo, hi = self.lo, self.hi
        while lo < hi and self.terms[lo].is_zero():
            lo += 1
        while hi > lo and self.terms[hi].is_zero():
            hi -= 1
        return ModuleComplex(self.ring, {j: self.terms[j] for j in range(lo, hi + 1)},
                             {j: self.diffs[j] for j in range(lo, hi)}, lo, hi, check=False)

    def __repr__(self) -> str:
        return "ModuleComplex(" + ", ".join("%d:%r" % (j, self.terms[j]) for j in range(self.lo, self.hi + 1)) + ")"


def as_module_complex(X) -> ModuleComplex:
    if isinstance(X, ModuleComplex):
        return X
    if isinstance(X, PresentedModule):
        return ModuleComplex.single(X)
    return X.to_module_complex()


# ---------------------------------------------------------------------------
# shift and cone


def shift(X, n: int):
    """``shift(X, n)^j = X^{j+n}`` with differentials multiplied by ``(-1)^n``."""
    sign = -1 if n % 2 else 1
    if isinstance(X, ModuleComplex):
        return ModuleComplex(X.ring, {j - n: M for j, M in X.terms.items()},
                             {j - n: d.scale(sign) for j, d in X.diffs.items()}, X.lo - n, X.hi - n, check=False)
    ext = None
    if X.extender is not None:
        ext = lambda lo, hi, X=X: shift(X.extended(lo + n, hi + n), n)
    band = X.band
    if band.acyclic_below is not None:
        band = replace(band, acyclic_below=band.acyclic_below - n)
    return FreeComplex(X.ring, {j - n: F for j, F in X.terms.items()},
                       {j - n: d.scale(sign) for j, d in X.diffs.items()}, X.lo - n, X.hi - n,
                       X.open_below, X.open_above, band, ext, check=False)


def twist_complex(X: FreeComplex, e: int) -> FreeComplex:
    ext = None
    if X.extender is not None:
        ext = lambda lo, hi, X=X: twist_complex(X.extended(lo, hi), e)
    band = X.band
    if band.min_degree is not None:
        band = replace(band, min_degree=band.min_degree - e)
    return FreeComplex(X.ring, {j: F.twist(e) for j, F in X.terms.items()},
                       {j: d.twist(e) for j, d in X.diffs.items()}, X.lo, X.hi,
                       X.open_below, X.open_above, band, ext, check=False)


class ChainMap:
    """Degreewise maps ``f^j: X^j -> Y^j`` (on ``F0`` level for module complexes)."""

    def __init__(self, source, target, maps: dict, check: bool = True):
        self.source = source
        self.target = target
        self.maps = dict(maps)
        if check:
            self.check()

    def at(self, j: int) -> GradedMap:
        f = self.maps.get(j)
        if f is None:
            src = _f0(self.source, j)
            tgt = _f0(self.target, j)
            return GradedMap.zero(src, tgt)
        return f

    def check(self):
        X, Y = self.source, self.target
        lo = min(X.lo, Y.lo)
        hi = max(X.hi, Y.hi)
        for j in range(lo, hi + 1):
            try:
                lhs = self.at(j + 1).compose(X.diff(j))
                rhs = Y.diff(j).compose(self.at(j))
            except WindowExceeded:
                continue
            diff = lhs - rhs
            if isinstance(Y, ModuleComplex):
                bad = any(not Y.term(j + 1).is_zero_element(c) for c in diff.columns)
            else:
                bad = not diff.is_zero()
            if bad:
                raise NotChainMap("square at index %d does not commute" % j)
            if isinstance(X, ModuleComplex) and isinstance(Y, ModuleComplex):
                for col in self.at(j).compose(X.term(j).rel).columns:
                    if not Y.term(j).is_zero_element(col):
                        raise NotChainMap("map at index %d does not respect relations" % j)


def _f0(X, j: int) -> GradedFreeModule:
    if isinstance(X, ModuleComplex):
        return X.term(j).F0
    return X.term(j)


def cone(f: ChainMap):
    """``cone^j = X^{j+1} + Y^j`` with ``d(x, y) = (-d x, f x + d y)``."""
    X, Y = f.source, f.target
    ring = X.ring
    if isinstance(X, FreeComplex) and isinstance(Y, FreeComplex):
        lo = min(X.lo - 1, Y.lo)
        hi = max(X.hi - 1, Y.hi)
        terms = {}
        diffs = {}
        for j in range(lo, hi + 1):
            terms[j] = X.term(j + 1) + Y.term(j)
        for j in range(lo, hi):
            blocks = {
                (0, 0): -X.diff(j + 1),
                (1, 0): f.at(j + 1),
                (1, 1): Y.diff(j),
            }
            diffs[j] = block_map(ring, [X.term(j + 1), Y.term(j)], [X.term(j + 2), Y.term(j + 1)], blocks)
        ext = None
        if X.extender is not None or Y.extender is not None:
            def ext(lo2, hi2, f=f):
                X2 = X.extended(lo2 + 1, hi2 + 1) if X.extender else X
                Y2 = Y.extended(lo2, hi2) if Y.extender else Y
                return cone(ChainMap(X2, Y2, _extend_map(f, X2, Y2), check=False))
        band = Band()
        if not Y.open_below and X.band.min_degree is not None:
            band = Band(None if X.band.acyclic_below is None else X.band.acyclic_below - 1, X.band.min_degree)
        return FreeComplex(ring, terms, diffs, lo, hi, X.open_below or Y.open_below,
                           X.open_above or Y.open_above, band, ext, check=False)
    Xm, Ym = as_module_complex(X), as_module_complex(Y)
    lo = min(Xm.lo - 1, Ym.lo)
    hi = max(Xm.hi - 1, Ym.hi)
    terms = {}
    diffs = {}
    for j in range(lo, hi + 1):
        A1, B1 = Xm.term(j + 1), Ym.term(j)
        rel = block_map(ring, [A1.F1, B1.F1], [A1.F0, B1.F0], {(0, 0): A1.rel, (1, 1): B1.rel})
        terms[j] = PresentedModule(rel)
    for j in range(lo, hi):
        blocks = {(0, 0): -Xm.diff(j + 1), (1, 0): f.at(j + 1), (1, 1): Ym.diff(j)}
        diffs[j] = block_map(ring, [Xm.term(j + 1).F0, Ym.term(j).F0],
                             [Xm.term(j + 2).F0, Ym.term(j + 1).F0], blocks)
    return ModuleComplex(ring, terms, diffs, lo, hi, check=False)


def _extend_map(f: ChainMap, X2, Y2) -> dict:
    maps = dict(f.maps)
    if hasattr(f, "extend_maps") and f.extend_maps is not None:
        maps.update(f.extend_maps(X2, Y2))
    return maps


def fiber(f: ChainMap):
    """``cone(f)[-1]``."""
    return shift(cone(f), -1)


# ---------------------------------------------------------------------------
# cohomology


def _kernel_of_induced(ring, d: GradedMap, src: PresentedModule, tgt: PresentedModule) -> list[dict]:
    """Generators (in ``src.F0``) of the kernel of the induced map ``src -> tgt``."""
    n = src.F0.rank
    if n == 0:
        return []
    cols = list(d.columns) + list(tgt.rel.columns)
    if tgt.F0.rank == 0:
        return [src.F0.basis_vector(i) for i in range(n)]
    data = ImageData(ring, cols, tgt.F0.degrees, list(src.F0.degrees) + list(tgt.F1.degrees))
    out = []
    for v in data.kernel():
        u = {(c, e): x for (c, e), x in v.items() if c < n}
        if u:
            out.append(u)
    return out


def cohomology(X, j: int) -> PresentedModule:
    """``H^j(X)`` as a presented module."""
    ring = X.ring
    if isinstance(X, FreeComplex):
        if j < X.lo and X.open_below and X.band.acyclic_below is not None and j < X.band.acyclic_below:
            return PresentedModule.free(GradedFreeModule(ring, []))
        X = X.extended(j - 1, j + 1)
        Xm = X
        mod = lambda k: PresentedModule.free(X.term(k))
    else:
        Xm = X
        mod = X.term
    src = mod(j)
    kgens = _kernel_of_induced(ring, Xm.diff(j), src, mod(j + 1))
    kgens = [g for g in kgens if not src.is_zero_element(g)] if src.F1.rank else kgens
    sub = PresentedModule(GradedMap(GradedFreeModule(ring, list(src.F1.degrees) + list(mod(j - 1).F0.degrees)),
                                    src.F0, list(src.rel.columns) + list(Xm.diff(j - 1).columns), check=False))
    H, _ = submodule_presentation(sub, kgens)
    return H


# ---------------------------------------------------------------------------
# the Hom engine


def _hom_blocks(X: FreeComplex, Y: ModuleComplex, p: int, e: int):
    """Components of ``Hom^p(X, Y)_e``: list of (j, s, slice, offset)."""
    blocks = []
    off = 0
    for j in range(Y.lo - p, Y.hi - p + 1):
        F = X.term(j)
        N = Y.term(j + p)
        if N.F0.rank == 0:
            continue
        for s, g in enumerate(F.degrees):
            sl = N.slice(g + e)
            blocks.append((j, s, sl, off))
            off += sl.ngens
    return blocks, off


def _block_relations(blocks) -> list[dict]:
    rels = []
    for (_, _, sl, off) in blocks:
        for r in sl.relations:
            rels.append({(i + off, a): x for (i, a), x in r.items()})
    return rels


def _hom_differential(X: FreeComplex, Y: ModuleComplex, p: int, src_blocks, tgt_blocks) -> list[dict]:
    """Columns of ``D^p: Hom^p -> Hom^{p+1}``, ``Df = d_Y f - (-1)^p f d_X``."""
    tindex = {(j, s): (sl, off) for (j, s, sl, off) in tgt_blocks}
    sign = -1 if p % 2 else 1
    cols = []
    # incoming d_X entries: for generator s of X^j, which generators s' of X^{j-1} hit it
    incoming = {}
    for (j, s, sl, off) in src_blocks:
        if (j, s) in incoming:
            continue
        if j - 1 < X.lo and not X.open_below:
            incoming[(j, s)] = []
            continue
        try:
            dprev = X.diff(j - 1)
        except WindowExceeded:
            incoming[(j, s)] = []
            continue
        lst = []
        for sp, col in enumerate(dprev.columns):
            a = {e_: c for (t, e_), c in col.items() if t == s}
            if a:
                lst.append((sp, a))
        incoming[(j, s)] = lst
    for (j, s, sl, off) in src_blocks:
        dY = Y.diff(j + p)
        N_next = Y.term(j + p + 1)
        for i in range(sl.ngens):
            v = sl.element(i)
            col = {}
            tgt = tindex.get((j, s))
            if tgt is not None and N_next.F0.rank:
                tsl, toff = tgt
                w = dY.apply(v)
                for (k, a), x in tsl.coords(w).items():
                    col[(k + toff, a)] = x
            for sp, a in incoming[(j, s)]:
                tgt = tindex.get((j - 1, sp))
                if tgt is None:
                    continue
                tsl, toff = tgt
                w = _poly_times_vector(X.ring, a, v)
                for (k, al), x in tsl.coords(w).items():
                    key = (k + toff, al)
                    nv = col.get(key, 0) - sign * x
                    if nv:
                        col[key] = nv
                    else:
                        col.pop(key, None)
            cols.append(col)
    return cols


def _poly_times_vector(ring, a: dict, v: dict) -> dict:
    from .grring import vmul

    return ring.vnf(vmul(a, v))


def hom_cohomology(X: FreeComplex, Y, m: int, e: int) -> BaseModule:
    """``H^m(Hom^*(X, Y))_e`` as an ``A_0``-module.

    ``X`` is a (bounded-above) free complex and ``Y`` a bounded complex; this is
    ``Hom_{D}(X, Y[m])`` in internal degree ``e`` when ``X`` is a resolution.
    """
    Y = as_module_complex(Y)
    X = X.extended(Y.lo - m - 1, Y.hi - m + 1)
    base = base_ring_of(X.ring)
    b_prev, n_prev = _hom_blocks(X, Y, m - 1, e)
    b_cur, n_cur = _hom_blocks(X, Y, m, e)
    b_next, n_next = _hom_blocks(X, Y, m + 1, e)
    d_in = _hom_differential(X, Y, m - 1, b_prev, b_cur) if n_prev and n_cur else []
    d_out = _hom_differential(X, Y, m, b_cur, b_next) if n_cur and n_next else [{} for _ in range(n_cur)]
    return homology(base, n_cur, _block_relations(b_cur), d_in, d_out, n_next, _block_relations(b_next))


def cohomology_slice(X, j: int, e: int) -> BaseModule:
    """``H^j(X)_e`` as an ``A_0``-module."""
    ring = X.ring
    A = FreeComplex.single(GradedFreeModule(ring, [0]))
    if isinstance(X, FreeComplex):
        X = bounded_window(X, j - 1, j + 1)
    return hom_cohomology(A, X, j, e)


def bounded_window(X: FreeComplex, lo: int, hi: int) -> ModuleComplex:
    """Brutal restriction of a free complex to ``[lo, hi]`` (cohomology correct strictly inside)."""
    X = X.extended(lo, hi)
    lo2, hi2 = max(lo, X.lo), min(hi, X.hi)
    if lo2 > hi2:
        return ModuleComplex(X.ring, {}, {}, lo, lo, check=False)
    return ModuleComplex(X.ring, {k: PresentedModule.free(X.term(k)) for k in range(lo2, hi2 + 1)},
                         {k: X.diff(k) for k in range(lo2, hi2)}, lo2, hi2, check=False)


# ---------------------------------------------------------------------------
# duality, splitting, truncation


def dualize(P: FreeComplex) -> FreeComplex:
    """``D(P)^j = Hom(P^{-j}, A)``; generator degrees negated, ``d_D^j = (d_P^{-j-1})^T``."""
    ring = P.ring
    terms = {}
    diffs = {}
    for j in range(-P.hi, -P.lo + 1):
        terms[j] = GradedFreeModule(ring, [-g for g in P.term(-j).degrees])
    for j in range(-P.hi, -P.lo):
        diffs[j] = P.diff(-j - 1).transpose()
    ext = None
    if P.extender is not None:
        ext = lambda lo, hi, P=P: dualize(P.extended(-hi, -lo))
    return FreeComplex(ring, terms, diffs, -P.hi, -P.lo, P.open_above, P.open_below, Band(), ext, check=False)


@dataclass
class Splitting:
    lower: FreeComplex  # generators of degree < i, a subcomplex
    upper: FreeComplex  # generators of degree >= i, the quotient complex
    connecting: dict  # j -> block from upper^j to lower^{j+1}
    lower_index: dict
    upper_index: dict


def split_projectives(P: FreeComplex, i: int) -> Splitting:
    """``P_{<i}`` (a subcomplex) and ``P_{>=i}`` (the quotient), degreewise split."""
    ring = P.ring
    if P.open_below and (P.band.min_degree is None or P.band.min_degree < i):
        raise MissingBandCertificate(
            "omitted terms are not certified to have generator degrees >= %d" % i)
    if P.open_above:
        raise MissingBandCertificate("the window is open above")
    lo_idx, up_idx = {}, {}
    lo_terms, up_terms = {}, {}
    for j in range(P.lo, P.hi + 1):
        degs = P.term(j).degrees
        lo_idx[j] = [k for k, g in enumerate(degs) if g < i]
        up_idx[j] = [k for k, g in enumerate(degs) if g >= i]
        lo_terms[j] = GradedFreeModule(ring, [degs[k] for k in lo_idx[j]])
        up_terms[j] = GradedFreeModule(ring, [degs[k] for k in up_idx[j]])
    lo_d, up_d, conn = {}, {}, {}
    for j in range(P.lo, P.hi):
        d = P.diff(j)
        mixed = d.restrict(lo_idx[j], up_idx[j + 1])
        if not mixed.is_zero():
            raise NotAComplex("block from degrees < %d to degrees >= %d is nonzero at index %d" % (i, i, j))
        lo_d[j] = d.restrict(lo_idx[j], lo_idx[j + 1])
        up_d[j] = d.restrict(up_idx[j], up_idx[j + 1])
        conn[j] = d.restrict(up_idx[j], lo_idx[j + 1])
    lower = FreeComplex(ring, lo_terms, lo_d, P.lo, P.hi, False, False, Band(), None, check=False)
    ext = None
    if P.extender is not None:
        ext = lambda lo, hi, P=P: split_projectives(P.extended(lo, hi), i).upper
    upper = FreeComplex(ring, up_terms, up_d, P.lo, P.hi, P.open_below, False, P.band, ext, check=False)
    return Splitting(lower, upper, conn, lo_idx, up_idx)


def split_check_zero_mixed(P: FreeComplex, i: int) -> bool:
    """True when every entry from degrees < i to degrees >= i vanishes."""
    for j in range(P.lo, P.hi):
        degs_s = P.term(j).degrees
        degs_t = P.term(j + 1).degrees
        src = [k for k, g in enumerate(degs_s) if g < i]
        tgt = [k for k, g in enumerate(degs_t) if g >= i]
        if not P.diff(j).restrict(src, tgt).is_zero():
            return False
    return True


def soft_truncate(X, K: int) -> ModuleComplex:
    """``tau^{>=-K}``: the term at ``-K`` becomes ``coker d^{-K-1}``, lower terms are dropped."""
    ring = X.ring
    if isinstance(X, FreeComplex):
        if not X.open_below and X.lo >= -K:
            return X.extended(X.lo, X.hi).to_module_complex() if not X.open_above else _raise_open()
        X = X.extended(-K - 1, X.hi)
        if X.open_above:
            _raise_open()
        Xm = ModuleComplex(ring, {j: PresentedModule.free(F) for j, F in X.terms.items()},
                           dict(X.diffs), X.lo, X.hi, check=False)
    else:
        Xm = X
        if Xm.lo >= -K:
            return Xm
    hi = Xm.hi
    if -K > hi:
        return ModuleComplex(ring, {}, {}, hi, hi, check=False)
    edge = Xm.term(-K)
    dprev = Xm.diff(-K - 1)
    rel = GradedMap(GradedFreeModule(ring, list(edge.F1.degrees) + list(Xm.term(-K - 1).F0.degrees)),
                    edge.F0, list(edge.rel.columns) + list(dprev.columns), check=False)
    terms = {j: Xm.term(j) for j in range(-K + 1, hi + 1)}
    terms[-K] = PresentedModule(rel)
    diffs = {j: Xm.diff(j) for j in range(-K, hi)}
    return ModuleComplex(ring, terms, diffs, -K, hi, check=False)


def _raise_open():
    raise WindowExceeded("complex is open above; truncate from above first")


def soft_truncate_above(X, t: int) -> ModuleComplex:
    """``tau^{<=t}``: the term at ``t`` becomes ``ker d^t``, higher terms are dropped."""
    ring = X.ring
    if isinstance(X, FreeComplex):
        if X.open_below:
            raise WindowExceeded("complex is open below")
        X = X.extended(X.lo, t + 1)
        mod = lambda k: PresentedModule.free(X.term(k))
        lo = X.lo
    else:
        mod = X.term
        lo = X.lo
    if t < lo:
        return ModuleComplex(ring, {}, {}, lo, lo, check=False)
    top = mod(t)
    kgens = _kernel_of_induced(ring, X.diff(t), top, mod(t + 1))
    K, incl = submodule_presentation(top, kgens)
    terms = {j: mod(j) for j in range(lo, t)}
    terms[t] = K
    diffs = {j: X.diff(j) for j in range(lo, t - 1)}
    if t - 1 >= lo:
        # express d^{t-1} through the kernel generators
        d = X.diff(t - 1)
        cols_all = list(incl.columns) + list(top.rel.columns)
        data = ImageData(ring, cols_all, top.F0.degrees, list(incl.source.degrees) + list(top.F1.degrees))
        cols = []
        k = incl.source.rank
        for col in d.columns:
            u = data.lift(col) if col else {}
            if u is None:
                raise NotAComplex("image of d^%d is not inside ker d^%d" % (t - 1, t))
            cols.append({(c, e): x for (c, e), x in u.items() if c < k})
        diffs[t - 1] = GradedMap(mod(t - 1).F0, K.F0, cols, check=False)
    out = ModuleComplex(ring, terms, diffs, lo, t, check=False)
    out.top_inclusion = incl
    return out
