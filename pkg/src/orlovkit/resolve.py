"""Banded free resolutions of modules and bounded complexes, and graded Ext.

The resolver builds ``Q -> C`` from the top index down.  At index ``j`` it
computes the cycles of the mapping cone at ``j``,

    Z^j = {(q, c) in Q^{j+1} + F_j : d q = 0, eps q + d_C c in im rho_{j+1}},

picks generators modulo ``0 + im rho_j`` in increasing degree and adds one
new free generator ``e_s`` per chosen ``(q_s, c_s)`` with ``d e_s = -q_s`` and
``eps e_s = c_s``.  A module is the complex with a single term.

Below the bottom of ``C`` the new generators cover a kernel inside a free
module.  Over ``A_0 = k[z]`` the lowest-degree slice of that kernel is a
submodule of a free ``k[z]``-module, so a basis is extracted with the Smith
form; the slice is then mapped isomorphically and the minimal generator
degree rises at every step.  Over a field this is automatic from minimality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

from .basemod import BaseModule, base_ring_of, is_field
from .complexes import Band, FreeComplex, ModuleComplex, WindowExceeded, as_module_complex, hom_cohomology
from .errors import CertificateViolation, UnsupportedBase
from .grmod import GradedFreeModule, GradedMap, PresentedModule
from .grring import BaseClass, GradedRing, GroebnerEngine, ImageData, vector_degree
from .scalars import UPoly, smith_normal_form


@dataclass
class DegreeEscape:
    """``table[i]`` is the largest index ``j`` such that every term at index ``<= j``
    has all generator degrees ``>= i``."""

    table: dict = dc_field(default_factory=dict)

    def k(self, i: int) -> Optional[int]:
        """Steps ``k_i`` measured from index 0 (``P^{-k}`` for ``k >= k_i``)."""
        j = self.table.get(i)
        return None if j is None else -j


class _Resolver:
    def __init__(self, C: ModuleComplex, allow_general: bool):
        ring = C.ring
        self.ring = ring
        self.C = C
        if ring.base_class == BaseClass.GENERAL and not allow_general:
            raise UnsupportedBase(
                "degree-0 ring %s is not a field or k[z]; resolutions carry no degree-escape guarantee"
                % (", ".join(ring.names[i] for i in ring.zero_vars) or "k"))
        self.base = base_ring_of(ring)
        self.certified = ring.base_class != BaseClass.GENERAL
        self.terms: dict = {}
        self.diffs: dict = {}
        self.eps: dict = {}
        self.hi = C.hi
        self.lo = C.hi + 1  # lowest index built so far
        self.finished = False  # a zero term below C was reached
        self.terms[self.hi + 1] = GradedFreeModule(ring, [])

    def _F(self, j: int) -> PresentedModule:
        return self.C.term(j)

    def step(self):
        ring = self.ring
        j = self.lo - 1
        Qn = self.terms[j + 1]
        Qnn = self.terms.get(j + 2, GradedFreeModule(ring, []))
        Fj = self._F(j).F0
        Cn = self._F(j + 1)
        dQ = self.diffs.get(j + 1)
        epsn = self.eps.get(j + 1)
        nq, nc = Qn.rank, Fj.rank
        # columns of [[dQ, 0, 0], [eps, dC, rho]] : Q^{j+1} + F_j + G_{j+1} -> Q^{j+2} + F_{j+1}
        off = Qnn.rank
        cols = []
        src_deg = []
        for s in range(nq):
            v = dict(dQ.columns[s]) if dQ is not None else {}
            if epsn is not None:
                for (c, e), x in epsn.columns[s].items():
                    v[(c + off, e)] = x
            cols.append(v)
            src_deg.append(Qn.degrees[s])
        dC = self.C.diff(j)
        for s in range(nc):
            cols.append({(c + off, e): x for (c, e), x in dC.columns[s].items()})
            src_deg.append(Fj.degrees[s])
        for s, col in enumerate(Cn.rel.columns):
            cols.append({(c + off, e): x for (c, e), x in col.items()})
            src_deg.append(Cn.F1.degrees[s])
        tgt_deg = list(Qnn.degrees) + list(Cn.F0.degrees)
        amb_deg = list(Qn.degrees) + list(Fj.degrees)
        if not tgt_deg:
            kgens = [{(s, ring.zero_exp): ring.field(1)} for s in range(nq + nc)]
        else:
            data = ImageData(ring, cols, tgt_deg, src_deg)
            kgens = []
            for v in data.kernel():
                u = {(c, e): x for (c, e), x in v.items() if c < nq + nc}
                if u:
                    kgens.append(u)
        # relations of C^j inside the ambient Q^{j+1} + F_j
        rho = [{(c + nq, e): x for (c, e), x in col.items()} for col in self._F(j).rel.columns]
        chosen = self._choose(kgens, rho, amb_deg, free_ambient=(nc == 0))
        degs = [vector_degree(ring, v, amb_deg) for v in chosen]
        order = sorted(range(len(chosen)), key=lambda k: degs[k])
        chosen = [chosen[k] for k in order]
        degs = [degs[k] for k in order]
        Qj = GradedFreeModule(ring, degs)
        dcols = [{(c, e): -x for (c, e), x in v.items() if c < nq} for v in chosen]
        ecols = [{(c - nq, e): x for (c, e), x in v.items() if c >= nq} for v in chosen]
        self.terms[j] = Qj
        self.diffs[j] = GradedMap(Qj, Qn, dcols, check=False)
        self.eps[j] = GradedMap(Qj, Fj, ecols, check=False)
        self.lo = j
        if Qj.rank == 0 and j < self.C.lo:
            self.finished = True

    def _choose(self, kgens, rho, amb_deg, free_ambient: bool):
        ring = self.ring
        kd = [vector_degree(ring, v, amb_deg) for v in kgens]
        items = sorted(zip(kd, range(len(kgens))), key=lambda t: (t[0], t[1]))
        eng = GroebnerEngine(ring, amb_deg)
        eng.add(rho)
        chosen = []
        if not items:
            return chosen
        start = 0
        if free_ambient and ring.base_class == BaseClass.UNIVARIATE_PID:
            m = items[0][0]
            low = [kgens[i] for d, i in items if d == m]
            basis = self._slice_basis(low, amb_deg, m)
            for b in basis:
                chosen.append(b)
            eng.add(basis)
            start = sum(1 for d, _ in items if d == m)
        for d, i in items[start:]:
            v = kgens[i]
            eng.complete(d)
            if eng.reduce(v, full=False):
                chosen.append(v)
                eng.add([v])
        return chosen

    def _slice_basis(self, gens, amb_deg, m):
        """A ``k[z]``-basis of the span of ``gens`` inside the degree-``m`` slice."""
        ring = self.ring
        F = PresentedModule.free(GradedFreeModule(ring, amb_deg))
        sl = F.slice(m)
        if sl.relations:
            # the ambient slice is not free; fall back to the generators themselves
            return list(gens)
        field = ring.field
        coords = [sl.coords(g, reduce=False) for g in gens]
        N = sl.ngens
        mat = [[UPoly([], field) for _ in gens] for _ in range(N)]
        for k, v in enumerate(coords):
            acc = {}
            for (i, a), x in v.items():
                acc.setdefault(i, {})[a[0]] = x
            for i, d in acc.items():
                mat[i][k] = UPoly([d.get(t, 0) for t in range(max(d) + 1)], field)
        U, D, V, Ui, Vi = smith_normal_form(mat, field, with_inverses=True)
        r = sum(1 for t in range(min(N, len(gens))) if not D[t][t].is_zero())
        # columns of G V are U^{-1} D; the first r are a basis of the span
        basis = []
        for t in range(r):
            vec = {}
            for i in range(N):
                p = Ui[i][t] * D[t][t]
                for a, x in enumerate(p.coeffs):
                    if x:
                        vec[(i, (a,))] = x
            basis.append(sl.base_to_vector(vec))
        # the syzygies of the generators form a saturated submodule, so the
        # nonzero Smith entries of the relation matrix must be units
        return basis

    def build_to(self, lo: int):
        while self.lo > lo and not self.finished:
            self.step()

    def complex(self) -> FreeComplex:
        terms = {j: self.terms[j] for j in range(self.lo, self.hi + 1)}
        diffs = {j: self.diffs[j] for j in range(self.lo, self.hi)}
        open_below = not self.finished
        band = Band(acyclic_below=self.C.lo, min_degree=self._omitted_lower_bound())
        ext = lambda lo, hi, r=self: (r.build_to(lo), r.complex())[1]
        return FreeComplex(self.ring, terms, diffs, self.lo, self.hi, open_below, False, band,
                           ext if open_below else None, check=False)

    def _omitted_lower_bound(self):
        if self.finished:
            return math.inf
        if self.lo >= self.C.lo:
            return None
        F = self.terms[self.lo]
        return min(F.degrees) if F.degrees else math.inf


@dataclass
class BandedResolution:
    complex: FreeComplex
    augmentation: dict  # j -> GradedMap Q^j -> F0 of C^j
    target: ModuleComplex
    escape: DegreeEscape
    resolver: _Resolver

    @property
    def lo(self) -> int:
        return self.complex.lo

    def extended(self, lo: int) -> "BandedResolution":
        self.resolver.build_to(lo)
        return _package(self.resolver)

    def generator_degrees(self) -> dict:
        return {j: list(self.complex.term(j).degrees) for j in range(self.complex.lo, self.complex.hi + 1)}


def _escape_table(r: _Resolver, targets) -> DegreeEscape:
    table = {}
    bottom = r.C.lo
    for i in targets:
        # deepest index from which monotonicity below the bottom of C is available
        best = None
        j = min(bottom, r.hi)
        while j >= r.lo:
            F = r.terms[j]
            if not F.degrees or min(F.degrees) >= i:
                best = j
                break
            j -= 1
        if r.finished and best is None:
            best = r.lo
        if best is not None:
            table[i] = best
    return DegreeEscape(table)


def _package(r: _Resolver, targets=()) -> BandedResolution:
    X = r.complex()
    eps = {j: r.eps[j] for j in range(r.lo, r.hi + 1)}
    return BandedResolution(X, eps, r.C, _escape_table(r, targets), r)


def _check_escape_progress(r: _Resolver):
    """Minimal generator degree must rise within every ``gldim(A_0) + 1`` steps below ``C``."""
    if r.ring.base_class == BaseClass.GENERAL:
        return
    step = 1 if r.ring.base_class == BaseClass.FIELD else 2
    idx = [j for j in range(r.lo, min(r.C.lo - 1, r.hi) + 1)]
    for j in idx:
        if j - step < r.lo:
            continue
        a, b = r.terms[j], r.terms[j - step]
        if not a.degrees or not b.degrees:
            continue
        if min(b.degrees) <= min(a.degrees):
            raise CertificateViolation(
                "minimal generator degree did not increase between indices %d and %d" % (j, j - step))


def resolve(M, escape_target: Optional[int] = None, window: Optional[int] = None,
            allow_general: bool = False) -> BandedResolution:
    """Banded resolution of a module or bounded complex.

    The window ``[-K, top]`` defaults to ``K = 2 * escape_target + 10``; it is
    extended until the escape index of ``escape_target`` is realized.
    """
    C = as_module_complex(M)
    cache = C.__dict__.setdefault("_resolvers", {})
    r = cache.get(allow_general)
    if r is None:
        r = _Resolver(C, allow_general)
        cache[allow_general] = r
    target = 0 if escape_target is None else escape_target
    K = window if window is not None else 2 * max(target, 0) + 10
    r.build_to(C.lo - K)
    targets = [] if escape_target is None else [escape_target]
    if escape_target is not None:
        while True:
            res = _package(r, targets)
            if escape_target in res.escape.table or r.finished:
                break
            K = 2 * K
            if K > 4096:
                raise WindowExceeded("escape target %d not reached" % escape_target)
            r.build_to(C.lo - K)
    if r.certified:
        _check_escape_progress(r)
    return _package(r, targets)


def minimal_resolution(M, window: int = 10) -> BandedResolution:
    C = as_module_complex(M)
    if C.ring.base_class != BaseClass.FIELD:
        raise UnsupportedBase("minimal resolutions need a field in degree 0")
    return resolve(C, None, window)


def escape_table(res: BandedResolution, targets) -> DegreeEscape:
    return _escape_table(res.resolver, targets)


def verify_escape(res: BandedResolution) -> bool:
    """Re-check the escape table against raw generator degrees."""
    X = res.complex
    for i, j in res.escape.table.items():
        for k in range(X.lo, j + 1):
            F = X.term(k)
            if F.degrees and min(F.degrees) < i:
                return False
    return True


def ext_module(M, N, m: int, e: int, allow_general: bool = True) -> BaseModule:
    """``Ext^m(M, N)_e`` as an ``A_0``-module."""
    res = resolve(M, None, max(m + 2, 2), allow_general=allow_general)
    return hom_cohomology(res.complex, N, m, e)


def ext_graded(M, N, m: int, e: int):
    """``Ext^m(M, N)_e``: the dimension over a field base, else the ``A_0``-module."""
    mod = ext_module(M, N, m, e)
    if is_field(mod.base):
        return mod.dim()
    return mod
