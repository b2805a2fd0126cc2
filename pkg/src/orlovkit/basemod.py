"""Finitely presented modules over the degree-0 ring ``A_0``.

Every graded slice ``M_j`` of an ``A``-module is a module over ``A_0``.  When
all weights are positive ``A_0`` is the field and slices are vector spaces;
otherwise ``A_0 = P_0 / I_0`` with ``P_0`` the polynomial ring in the weight-0
variables and the same Groebner engine is reused there.

Vectors over the base ring use the module-vector shape of :mod:`grring`:
``{(generator index, exponent tuple in the base variables): coefficient}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .grring import GradedRing, GroebnerEngine, ImageData, divides
from .scalars import UPoly, rank_of_columns, smith_normal_form


def base_ring_of(ring: GradedRing) -> GradedRing:
    cache = ring.__dict__.get("_base_ring")
    if cache is None:
        names = [ring.names[i] for i in ring.zero_vars]
        rels = ring.degree_zero_relations()
        cache = GradedRing(ring.field, names, [0] * len(names), rels)
        ring.__dict__["_base_ring"] = cache
    return cache


def is_field(base: GradedRing) -> bool:
    return base.nvars == 0


def _to_sparse(v: dict) -> dict:
    """Base vector over a field: drop the empty exponent."""
    return {i: c for (i, _), c in v.items()}


def kernel(base: GradedRing, columns: Sequence[dict], n_target: int, n_source: int) -> list[dict]:
    """Generators of the kernel of ``B^s -> B^r`` (``B`` the base ring, relations included)."""
    if n_source == 0:
        return []
    if is_field(base):
        from .scalars import nullspace, ExactMatrix

        rows = [dict() for _ in range(n_target)]
        for j, col in enumerate(columns):
            for (i, _), c in col.items():
                rows[i][j] = c
        mat = ExactMatrix(base.field, n_target, n_source, rows)
        out = []
        for vec in nullspace(mat):
            out.append({(j, ()): c for j, c in enumerate(vec) if c})
        return out
    data = ImageData(base, columns, [0] * n_target, [0] * n_source)
    return data.kernel()


@dataclass
class BaseModule:
    """``coker`` of relations on ``ngens`` generators over the base ring."""

    base: GradedRing
    ngens: int
    relations: list = dc_field(default_factory=list)

    def _engine(self) -> GroebnerEngine:
        eng = self.__dict__.get("_eng")
        if eng is None:
            eng = GroebnerEngine(self.base, [0] * self.ngens)
            eng.add(self.relations)
            eng.complete()
            self.__dict__["_eng"] = eng
        return eng

    def dim(self):
        """Dimension over the field, ``math.inf`` if infinite."""
        if self.ngens == 0:
            return 0
        if is_field(self.base):
            cols = [_to_sparse(r) for r in self.relations]
            return self.ngens - rank_of_columns(cols)
        gb = self._engine().reduced_basis()
        leads = {}
        for g in gb:
            c, e = self._engine().order.lead(g)
            leads.setdefault(c, []).append(e)
        nv = self.base.nvars
        total = 0
        for c in range(self.ngens):
            ls = leads.get(c, [])
            bounds = []
            for k in range(nv):
                pure = [e[k] for e in ls if all(e[t] == 0 for t in range(nv) if t != k)]
                if not pure:
                    return math.inf
                bounds.append(min(pure))
            total += _count_standard(ls, bounds)
        return total

    def is_zero(self) -> bool:
        if self.ngens == 0:
            return True
        if is_field(self.base):
            return self.dim() == 0
        eng = self._engine()
        return all(eng.is_member({(c, self.base.zero_exp): self.base.field(1)}) for c in range(self.ngens))

    def pruned(self) -> "BaseModule":
        """Drop generators eliminated by relations with a unit coefficient."""
        gens = list(range(self.ngens))
        rels = [dict(r) for r in self.relations]
        zero = self.base.zero_exp
        changed = True
        while changed:
            changed = False
            for ri, r in enumerate(rels):
                unit = None
                for (c, e), x in sorted(r.items()):
                    if e == zero and _is_unit_term(self.base, r, c):
                        unit = c
                        break
                if unit is None:
                    continue
                # e_unit = -(1/x) * (rest of r); substitute everywhere else
                x = r[(unit, zero)]
                rest = {t: -v / x for t, v in r.items() if t[0] != unit}
                newrels = []
                for rj, s in enumerate(rels):
                    if rj == ri:
                        continue
                    coeff = {e: v for (c, e), v in s.items() if c == unit}
                    s2 = {t: v for t, v in s.items() if t[0] != unit}
                    if coeff:
                        from .grring import vmul, vadd

                        s2 = vadd(s2, vmul(coeff, rest))
                        s2 = self.base.vnf(s2)
                    if s2:
                        newrels.append(s2)
                gens.remove(unit)
                rels = newrels
                changed = True
                break
        remap = {g: i for i, g in enumerate(gens)}
        rels = [{(remap[c], e): v for (c, e), v in r.items()} for r in rels]
        return BaseModule(self.base, len(gens), rels)

    def invariants(self):
        """Over ``k[z]``: (free rank, monic torsion invariants); over ``k``: (dim, [])."""
        if is_field(self.base):
            return self.dim(), []
        if self.base.nvars != 1 or self.base.relations:
            raise ValueError("invariant factors need a univariate polynomial base")
        f = self.base.field
        mat = [[UPoly([], f) for _ in range(len(self.relations))] for _ in range(self.ngens)]
        for j, r in enumerate(self.relations):
            acc = {}
            for (c, e), x in r.items():
                acc.setdefault(c, {})[e[0]] = x
            for c, d in acc.items():
                mat[c][j] = UPoly([d.get(k, 0) for k in range(max(d) + 1)], f)
        if not self.relations:
            return self.ngens, []
        _, D, _ = smith_normal_form(mat, f)
        diag = [D[i][i] for i in range(min(self.ngens, len(self.relations))) if not D[i][i].is_zero()]
        torsion = [d for d in diag if not d.is_unit()]
        return self.ngens - len(diag), torsion

    def is_free_rank_one(self) -> bool:
        if is_field(self.base):
            return self.dim() == 1
        p = self.pruned()
        if p.ngens == 1 and all(not r for r in p.relations):
            return True
        if self.base.nvars == 1 and not self.base.relations:
            rk, tors = self.invariants()
            return rk == 1 and not tors
        return False

    def describe(self):
        if is_field(self.base):
            return {"dim": self.dim()}
        d = self.dim()
        out = {"dim": None if d == math.inf else d}
        if self.base.nvars == 1 and not self.base.relations:
            rk, tors = self.invariants()
            out["rank"] = rk
            out["torsion"] = [repr(t) for t in tors]
        return out


def _is_unit_term(base: GradedRing, r: dict, c: int) -> bool:
    # a coefficient is a unit only when it is a nonzero constant
    return all(e == base.zero_exp for (cc, e) in r if cc == c)


def _count_standard(leads: list, bounds: list) -> int:
    count = 0

    def rec(k, cur):
        nonlocal count
        if k == len(bounds):
            e = tuple(cur)
            if not any(divides(l, e) for l in leads):
                count += 1
            return
        for x in range(bounds[k]):
            rec(k + 1, cur + [x])

    rec(0, [])
    return count


def homology(base: GradedRing, n: int, rels: Sequence[dict], d_in: Sequence[dict], d_out: Sequence[dict],
             n_next: int, rels_next: Sequence[dict]) -> BaseModule:
    """Homology at ``N = B^n / rels`` of ``N_prev -> N -> N_next``.

    ``d_in`` lists images in ``B^n`` of the previous generators; ``d_out`` lists
    images in ``B^{n_next}`` of the ``n`` generators of ``N``.
    """
    if n == 0:
        return BaseModule(base, 0, [])
    if is_field(base):
        r_next = rank_of_columns([_to_sparse(v) for v in rels_next])
        r_both = rank_of_columns([_to_sparse(v) for v in list(d_out) + list(rels_next)])
        ker_dim = n - (r_both - r_next)
        im_dim = rank_of_columns([_to_sparse(v) for v in list(d_in) + list(rels)])
        return BaseModule(base, ker_dim - im_dim, [])
    cols = list(d_out) + list(rels_next)
    if n_next == 0 or not any(d_out):
        kgens = [{(i, base.zero_exp): base.field(1)} for i in range(n)]
    else:
        ker = kernel(base, cols, n_next, len(cols))
        kgens = []
        for v in ker:
            u = {(c, e): x for (c, e), x in v.items() if c < n}
            if u:
                kgens.append(u)
    k = len(kgens)
    if k == 0:
        return BaseModule(base, 0, [])
    sub = list(kgens) + list(rels) + list(d_in)
    syz = kernel(base, sub, n, len(sub))
    hrels = []
    for v in syz:
        u = {(c, e): x for (c, e), x in v.items() if c < k}
        if u:
            hrels.append(u)
    return BaseModule(base, k, hrels).pruned()
