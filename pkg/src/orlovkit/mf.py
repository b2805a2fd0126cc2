"""Graded matrix factorizations, their homotopy Hom spaces, and the functor Psi.

A factorization of ``W`` (degree ``d``) over ``S`` is a pair of maps
``e1: E1 -> E0`` and ``e0: E0 -> E1(d)`` with ``e0 e1 = W`` and ``e1(d) e0 = W``.
Morphisms are pairs ``(h1, h0)`` commuting with both maps; null-homotopies are
pairs ``s0: E0 -> F1``, ``s1: E1(d) -> F0`` with

    h1 = f0 s1 + s0 e1,    h0 = f1 s0 + s1 e0.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from .basemod import BaseModule, base_ring_of, homology, is_field
from .complexes import ModuleComplex, as_module_complex
from .errors import CertificateViolation
from .grmod import GradedFreeModule, GradedMap, PresentedModule
from .grring import GradedRing, ImageData, padd, pmul, vmul, vscale
from .resolve import resolve


class MFIdentityViolation(ValueError):
    """A factorization identity fails; the message names the first bad entry."""


class PeriodicityNotDetected(RuntimeError):
    """No square periodic presentation was found within the syzygy window."""

    def __init__(self, message: str, degrees=None):
        super().__init__(message)
        self.degrees = degrees or {}


@dataclass
class HypersurfaceData:
    S: GradedRing
    W: dict

    def __post_init__(self):
        if self.S.relations:
            raise ValueError("the ambient ring must be a polynomial ring")
        if not self.W:
            raise ValueError("W must be nonzero")
        self.d = self.S.poly_degree(self.W)
        if self.d is None or self.d < 1:
            raise ValueError("W must be homogeneous of positive degree")
        self.A = GradedRing(self.S.field, self.S.names, self.S.weights, [self.W])

    def to_A(self, F: GradedFreeModule) -> GradedFreeModule:
        return GradedFreeModule(self.A, F.degrees)

    def map_to_A(self, f: GradedMap) -> GradedMap:
        return GradedMap(self.to_A(f.source), self.to_A(f.target), [self.A.vnf(c) for c in f.columns],
                         check=False)

    def to_S(self, F: GradedFreeModule) -> GradedFreeModule:
        return GradedFreeModule(self.S, F.degrees)

    def map_to_S(self, f: GradedMap) -> GradedMap:
        """Lift a map over ``A`` to ``S`` using the normal-form representatives."""
        return GradedMap(self.to_S(f.source), self.to_S(f.target), [dict(c) for c in f.columns], check=False)


def hypersurface(S: GradedRing, W) -> HypersurfaceData:
    if isinstance(W, str):
        W = S.parse(W)
    return HypersurfaceData(S, W)


@dataclass
class MatrixFactorization:
    hd: HypersurfaceData
    E1: GradedFreeModule
    E0: GradedFreeModule
    e1: GradedMap
    e0: GradedMap
    witness: dict = dc_field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.E0.rank

    def twist(self, e: int) -> "MatrixFactorization":
        w = dict(self.witness)
        w["twist"] = w.get("twist", 0) + e
        return MatrixFactorization(self.hd, self.E1.twist(e), self.E0.twist(e), self.e1.twist(e),
                                   self.e0.twist(e), w)

    def shift(self) -> "MatrixFactorization":
        """``E[1] = (E0, E1(d); -e0, -e1(d))``."""
        d = self.hd.d
        w = dict(self.witness)
        w["shift"] = w.get("shift", 0) + 1
        return MatrixFactorization(self.hd, self.E0, self.E1.twist(d), -self.e0, -self.e1.twist(d), w)

    def to_json(self) -> dict:
        S = self.hd.S
        return {
            "d": self.hd.d,
            "W": S.format(self.hd.W),
            "E1": list(self.E1.degrees),
            "E0": list(self.E0.degrees),
            "e1": self.e1.format_rows(),
            "e0": self.e0.format_rows(),
            "witness": {k: self.witness[k] for k in sorted(self.witness)},
        }


def _scalar_map(F: GradedFreeModule, G: GradedFreeModule, p: dict) -> GradedMap:
    return GradedMap(F, G, [{(i, e): c for e, c in p.items()} for i in range(F.rank)], check=False)


def _first_difference(lhs: GradedMap, W: dict):
    for s, col in enumerate(lhs.columns):
        for t in range(lhs.target.rank):
            entry = {e: c for (tt, e), c in col.items() if tt == t}
            want = W if t == s else {}
            if entry != want:
                return t, s
    return None


def make_mf(hd: HypersurfaceData, E1: GradedFreeModule, E0: GradedFreeModule, e1, e0) -> MatrixFactorization:
    """Validate and build a factorization; ``e1``/``e0`` may be GradedMaps or row lists."""
    S, d = hd.S, hd.d
    if E1.rank != E0.rank:
        raise MFIdentityViolation("E1 has rank %d but E0 has rank %d" % (E1.rank, E0.rank))
    if not isinstance(e1, GradedMap):
        e1 = GradedMap.from_matrix(E1, E0, e1)
    if not isinstance(e0, GradedMap):
        e0 = GradedMap.from_matrix(E0, E1.twist(d), e0)
    E1d = E1.twist(d)
    e0e1 = GradedMap(E1, E1d, [e0.apply(c) for c in e1.columns], check=False)
    bad = _first_difference(e0e1, hd.W)
    if bad is not None:
        raise MFIdentityViolation("e0*e1 differs from W at entry (%d, %d)" % bad)
    e1e0 = GradedMap(E0, E0.twist(d), [e1.apply(c) for c in e0.columns], check=False)
    bad = _first_difference(e1e0, hd.W)
    if bad is not None:
        raise MFIdentityViolation("e1(d)*e0 differs from W at entry (%d, %d)" % bad)
    return MatrixFactorization(hd, E1, E0, e1, e0)


def trivial_mf(hd: HypersurfaceData, degrees: Sequence[int] = (0,)) -> MatrixFactorization:
    """``(1, W)`` on ``S(-g)`` for each ``g``: a contractible factorization."""
    S = hd.S
    F = GradedFreeModule(S, list(degrees))
    one = GradedMap.identity(F)
    W = _scalar_map(F, F.twist(hd.d), hd.W)
    return make_mf(hd, F, F, one, W)


# ---------------------------------------------------------------------------
# Hom spaces


class _Blocks:
    """Direct sum of free-module slices, one block per column of a matrix."""

    def __init__(self, parts):
        # parts: list of (name, column index, free module F, degree)
        self.items = []
        off = 0
        for name, s, F, deg in parts:
            sl = PresentedModule.free(F).slice(deg)
            self.items.append((name, s, sl, off))
            off += sl.ngens
        self.size = off
        self.index = {(name, s): (sl, off) for name, s, sl, off in self.items}

    def add(self, col: dict, name: str, s: int, v: dict):
        if not v:
            return
        sl, off = self.index[(name, s)]
        for (k, a), x in sl.coords(v).items():
            key = (k + off, a)
            nv = col.get(key, 0) + x
            if nv:
                col[key] = nv
            else:
                col.pop(key, None)


def _times(ring: GradedRing, p: dict, v: dict) -> dict:
    return ring.vnf(vmul(p, v))


def _hom_spaces(E: MatrixFactorization, F: MatrixFactorization):
    d = E.hd.d
    S = E.hd.S
    # C0: (h1 columns in F1 at deg E1_s, h0 columns in F0 at deg E0_s)
    C0 = _Blocks([("h1", s, F.E1, g) for s, g in enumerate(E.E1.degrees)]
                 + [("h0", s, F.E0, g) for s, g in enumerate(E.E0.degrees)])
    # C1: f1 h1 - h0 e1 (in F0 at deg E1_s) and f0 h0 - h1(d) e0 (in F1(d) at deg E0_s)
    C1 = _Blocks([("a", s, F.E0, g) for s, g in enumerate(E.E1.degrees)]
                 + [("b", s, F.E1.twist(d), g) for s, g in enumerate(E.E0.degrees)])
    # Cm: s0 columns in F1 at deg E0_s, s1 columns in F0 at deg E1(d)_s
    Cm = _Blocks([("s0", s, F.E1, g) for s, g in enumerate(E.E0.degrees)]
                 + [("s1", s, F.E0, g) for s, g in enumerate(E.E1.twist(d).degrees)])

    def entries(m: GradedMap, r: int):
        """Pairs (column s, polynomial) of row ``r`` of ``m``."""
        out = []
        for s, col in enumerate(m.columns):
            p = {e: c for (t, e), c in col.items() if t == r}
            if p:
                out.append((s, p))
        return out

    d_out = []
    for name, s, sl, off in C0.items:
        for k in range(sl.ngens):
            v = sl.element(k)
            col = {}
            if name == "h1":
                C1.add(col, "a", s, F.e1.apply(v))
                for s2, p in entries(E.e0, s):
                    C1.add(col, "b", s2, vscale(_times(S, p, v), -1))
            else:
                C1.add(col, "b", s, F.e0.apply(v))
                for s2, p in entries(E.e1, s):
                    C1.add(col, "a", s2, vscale(_times(S, p, v), -1))
            d_out.append(col)
    d_in = []
    for name, s, sl, off in Cm.items:
        for k in range(sl.ngens):
            v = sl.element(k)
            col = {}
            if name == "s0":
                # s0 e1 feeds h1, f1 s0 feeds h0
                for s2, p in entries(E.e1, s):
                    C0.add(col, "h1", s2, _times(S, p, v))
                C0.add(col, "h0", s, F.e1.apply(v))
            else:
                C0.add(col, "h1", s, F.e0.apply(v))
                for s2, p in entries(E.e0, s):
                    C0.add(col, "h0", s2, _times(S, p, v))
            d_in.append(col)
    return C0, C1, Cm, d_in, d_out


def mf_hom_module(E: MatrixFactorization, F: MatrixFactorization) -> BaseModule:
    """Homotopy classes of degree-0 morphisms ``E -> F`` as an ``S_0``-module."""
    if E.hd.S is not F.hd.S and E.hd.S.signature() != F.hd.S.signature():
        raise ValueError("factorizations live over different rings")
    base = base_ring_of(E.hd.S)
    C0, C1, Cm, d_in, d_out = _hom_spaces(E, F)
    if C0.size == 0:
        return BaseModule(base, 0, [])
    H = homology(base, C0.size, [], d_in if Cm.size else [], d_out if C1.size else [{} for _ in range(C0.size)],
                 C1.size, [])
    if H.ngens < 0:
        raise CertificateViolation("Hom complex of factorizations is not a complex (d^2 != 0)")
    return H


def mf_hom(E: MatrixFactorization, F: MatrixFactorization):
    """Dimension over the field of the homotopy classes (``math.inf`` if infinite)."""
    return mf_hom_module(E, F).dim()


def mf_coker(E: MatrixFactorization) -> PresentedModule:
    """``coker(e1)`` over ``A = S/(W)``."""
    return PresentedModule(E.hd.map_to_A(E.e1))


# ---------------------------------------------------------------------------
# stabilization


def _square_lift(hd: HypersurfaceData, phi: GradedMap) -> Optional[GradedMap]:
    """``psi`` with ``phi psi = W`` when ``phi`` is square and ``W`` times the target lifts."""
    if phi.source.rank != phi.target.rank or phi.source.rank == 0:
        return None
    S = hd.S
    data = ImageData(S, phi.columns, phi.target.degrees, phi.source.degrees)
    cols = []
    for t in range(phi.target.rank):
        target = {(t, e): c for e, c in hd.W.items()}
        u = data.lift(target)
        if u is None:
            return None
        cols.append(u)
    return GradedMap(phi.target, phi.source.twist(hd.d), cols, check=False)


def stabilize(M, hd: HypersurfaceData, window: Optional[int] = None) -> MatrixFactorization:
    """A factorization whose cokernel is isomorphic to ``M`` in ``D_sg``.

    ``M`` is a module or bounded complex over ``A = S/(W)``.  With ``P -> M`` a
    free resolution, ``coker(P^{-k-1} -> P^{-k})[k]`` is isomorphic to ``M`` in
    the singularity category once ``-k`` is below the cohomology of ``M``.  For
    even ``k = 2r`` this is ``coker(...)(r d)``; the factorization comes from
    the Eisenbud criterion (``W`` times the target lifts through the lifted
    presentation) and is twisted by ``r d``.  The witness records ``k``.
    """
    C = as_module_complex(M)
    A = hd.A
    if C.ring.signature() != A.signature():
        raise ValueError("module is not over S/(W)")
    if window is None:
        window = 2 * A.nvars + 4
    k0 = max(0, -C.lo)
    if k0 % 2:
        k0 += 1
    res = resolve(C, None, window + k0 + 2 + (C.hi - C.lo))
    P = res.complex
    degrees = {}
    for k in range(k0, k0 + window + 1, 2):
        if -k - 1 < P.lo and P.open_below:
            P = P.extended(-k - 1, P.hi)
        if -k - 1 < P.lo:
            # resolution stopped: the object is perfect
            return _contractible(hd, k)
        phi = hd.map_to_S(P.diff(-k - 1))
        degrees[k] = (list(phi.source.degrees), list(phi.target.degrees))
        psi = _square_lift(hd, phi)
        if psi is None:
            continue
        E = make_mf(hd, phi.source, phi.target, phi, psi)
        r = k // 2
        out = E.twist(r * hd.d)
        out.witness = {"syzygy_steps": k, "twist": r * hd.d, "shift": 0}
        return out
    raise PeriodicityNotDetected("no square periodic presentation within %d syzygy steps" % window, degrees)


def _contractible(hd: HypersurfaceData, k: int) -> MatrixFactorization:
    E = trivial_mf(hd)
    E.witness = {"syzygy_steps": k, "twist": 0, "shift": 0, "perfect": True}
    return E


# ---------------------------------------------------------------------------
# complete intersections and Psi


@dataclass
class CompleteIntersectionData:
    Q: GradedRing
    f: list  # polynomials over Q

    def __post_init__(self):
        if any(w != 0 for w in self.Q.weights):
            raise ValueError("the base ring must be concentrated in degree 0")
        if self.Q.relations:
            raise ValueError("the base ring must be a polynomial ring")
        self.c = len(self.f)
        tnames = ["T%d" % (k + 1) for k in range(self.c)] if self.c > 1 else ["T"]
        names = list(self.Q.names) + tnames
        weights = list(self.Q.weights) + [1] * self.c
        self.S = GradedRing(self.Q.field, names, weights, [])
        nq = self.Q.nvars
        W = {}
        for k, fk in enumerate(self.f):
            for e, c in fk.items():
                ex = list(e) + [0] * self.c
                ex[nq + k] = 1
                W = padd(W, {tuple(ex): c})
        self.hd = HypersurfaceData(self.S, W)
        self.R = GradedRing(self.Q.field, self.Q.names, self.Q.weights, list(self.f))

    @property
    def A(self) -> GradedRing:
        return self.hd.A

    def extend_poly(self, p: dict) -> dict:
        return {tuple(list(e) + [0] * self.c): c for e, c in p.items()}


def complete_intersection(Q: GradedRing, f: Sequence) -> CompleteIntersectionData:
    polys = [Q.parse(x) if isinstance(x, str) else x for x in f]
    return CompleteIntersectionData(Q, polys)


def pullback_to_A(ci: CompleteIntersectionData, M: PresentedModule) -> PresentedModule:
    """``M tensor_Q S`` with the relations ``f_i`` imposed, as an ``A``-module in degree 0."""
    A = ci.A
    ngens = M.F0.rank
    cols = []
    for col in M.rel.columns:
        cols.append({(c, tuple(list(e) + [0] * ci.c)): x for (c, e), x in col.items()})
    for fk in ci.f:
        for c in range(ngens):
            cols.append({(c, e): x for e, x in ci.extend_poly(fk).items()})
    F0 = GradedFreeModule(A, [0] * ngens)
    F1 = GradedFreeModule(A, [0] * len(cols))
    return PresentedModule(GradedMap(F1, F0, cols, check=False))


def psi(ci: CompleteIntersectionData, M: PresentedModule) -> MatrixFactorization:
    """``Psi(M)``: pull back to ``A``, take ``RGamma_{>=0}``, stabilize."""
    from .orlov import gamma_geq

    N = pullback_to_A(ci, M)
    G = gamma_geq(N, 0).complex
    E = stabilize(G, ci.hd)
    E.witness = dict(E.witness, pipeline="pullback,gamma_geq(0),stabilize")
    return E


def hom_over_R(ci: CompleteIntersectionData, M: PresentedModule, N: PresentedModule) -> int:
    """``dim_k Hom_R(M, N)`` with ``R`` concentrated in degree 0."""
    from .resolve import ext_module

    return ext_module(M, N, 0, 0, allow_general=True).dim()
