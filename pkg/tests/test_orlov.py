import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ring_node, ring_p1, ring_u2
from oracles import random_presentation

from orlovkit import NotGorensteinInWindow, UnsupportedBase, make_ring
from orlovkit.complexes import cohomology_slice
from orlovkit.grmod import PresentedModule, torsion_submodule, truncate_geq
from orlovkit.orlov import (
    CechUnstable,
    LCMethod,
    Probe,
    b_functor,
    cech_row,
    free_module,
    gamma_geq,
    gorenstein_parameters,
    local_cohomology,
    residue_module,
    sheaf_hom,
    stable_hom,
    verify_sod,
)
from orlovkit.resolve import ext_graded


def gp(ring):
    g = gorenstein_parameters(ring)
    return g.n, g.a


def test_gorenstein_examples(kx, u2):
    assert gp(kx) == (1, 1)
    assert gp(u2) == (0, -1)
    ci = make_ring("Q", [("x", 0), ("y", 0), ("T1", 1), ("T2", 1)], ["x*T1 + y*T2"])
    assert gp(ci)[1] == 1


def test_not_gorenstein():
    # k[x,y]/(x^2, xy): Ext^0(k, A) already has the two-dimensional socle-like piece
    R = make_ring("Q", [("x", 1), ("y", 1)], ["x^2", "x*y"])
    with pytest.raises(NotGorensteinInWindow):
        gorenstein_parameters(R)


def test_gorenstein_twist_stable(node):
    n, a = gp(node)
    k = residue_module(node)
    for e in (-2, 1):
        ke = k.twist(e)
        rows = [ext_graded(ke, free_module(node, 0), n, t) for t in range(-6, 6)]
        assert rows.count(1) == 1
        assert rows.index(1) - 6 == -a + e


def test_local_cohomology_kx(kx):
    tab = local_cohomology(free_module(kx, 0), 1, (-6, 6))
    assert [tab.dim(0, e) for e in range(-6, 7)] == [0] * 13
    assert [tab.dim(1, e) for e in range(-6, 7)] == [1] * 6 + [0] * 7
    assert tab.methods[1] == LCMethod.LOCAL_DUALITY


def test_local_cohomology_duality_agrees_with_cech(node):
    M = PresentedModule.from_rows(node, [0], [["x"]])
    a = local_cohomology(M, 1, (-4, 4))
    b = local_cohomology(M, 1, (-4, 4), method=LCMethod.CECH_HEURISTIC)
    for key in a.entries:
        assert a.entries[key].dim() == b.entries[key].dim()


def test_local_cohomology_x2t(x2t):
    tab = local_cohomology(free_module(x2t, 0), 1, (-4, 4))
    assert tab.methods[1] == LCMethod.CECH_HEURISTIC
    for e in range(-4, 5):
        rk, tors = tab.entries[(1, e)].invariants()
        if e <= -1:
            assert rk == 0 and [t.degree for t in tors] == [2]
        else:
            assert (rk, tors) == (0, [])
    h0 = tab.entries[(0, 0)].invariants()
    assert h0 == (1, [])


def test_local_cohomology_of_torsion_module(u2):
    M = PresentedModule.from_rows(u2, [0, 1], [])
    tab = local_cohomology(M, 1, (-2, 3))
    for e in range(-2, 4):
        assert tab.dim(0, e) == M.dim(e)
        assert tab.dim(1, e) == 0


def test_h0_row_matches_torsion_submodule(p1):
    M = PresentedModule.from_rows(p1, [0, 0], [["x0", "0"], ["x1", "0"]])
    tab = local_cohomology(M, 0, (-2, 3))
    tors = torsion_submodule(M).module
    assert [tab.dim(0, e) for e in range(-2, 4)] == [tors.dim(e) for e in range(-2, 4)]


def test_gamma_examples(kx, x2t, u2):
    G = gamma_geq(free_module(kx, 0), 0)
    for j in range(G.complex.lo, G.complex.hi + 1):
        for e in range(0, 5):
            assert cohomology_slice(G.complex, j, e).dim() == (1 if j == 0 else 0)
    assert G.cohomological_dimension == 1
    M = PresentedModule.from_rows(x2t, [0], [["x"]])
    Gx = gamma_geq(M, 0)
    for e in range(0, 4):
        assert cohomology_slice(Gx.complex, 0, e).dim() == 1
        assert cohomology_slice(Gx.complex, 1, e).dim() == 0
    Gu = gamma_geq(residue_module(u2), 0)
    for j in range(Gu.complex.lo, Gu.complex.hi + 1):
        assert all(cohomology_slice(Gu.complex, j, e).dim() == 0 for e in range(-2, 4))


def test_gamma_requires_generated_geq(kx):
    with pytest.raises(ValueError):
        gamma_geq(free_module(kx, 1), 0)


def test_sheaf_cohomology_on_p1(p1):
    # H^q(P^1, O(s)) via Hom(A, RGamma(A(s))[q])
    for s, want in [(0, (1, 0)), (-1, (0, 0)), (-2, (0, 1)), (-3, (0, 2)), (1, (2, 0))]:
        G = truncate_geq(free_module(p1, s), 0).sub
        got = tuple(sheaf_hom(free_module(p1, 0), G, q) for q in (0, 1))
        assert got == want


def test_b_functor_examples(u2):
    k = residue_module(u2)
    b = b_functor(k, 0)
    C = b.module_complex
    nz = [(j, e) for j in range(C.lo, C.hi + 1) for e in range(-3, 4) if cohomology_slice(C, j, e).dim()]
    assert nz == [(0, 0)]
    b1 = b_functor(k.twist(1), 0).module_complex
    nz1 = [(j, e) for j in range(b1.lo, b1.hi + 1) for e in range(-3, 4) if cohomology_slice(b1, j, e).dim()]
    assert [j for j, _ in nz1] == [-1]
    bp = b_functor(free_module(u2, -2), 0).module_complex
    assert all(cohomology_slice(bp, j, e).dim() == 0 for j in range(bp.lo, bp.hi + 1) for e in range(-3, 5))


def test_b_functor_rejects_general_base():
    R = make_ring("Q", [("x", 0), ("y", 0), ("T1", 1), ("T2", 1)], ["x*T1 + y*T2"])
    with pytest.raises(UnsupportedBase):
        b_functor(residue_module(R), 0)


def test_stable_hom_examples(u2, node):
    k = residue_module(u2)
    assert stable_hom(k, k, 0) == 1
    assert all(stable_hom(free_module(u2, 0), k, m) == 0 for m in range(3))
    cx = PresentedModule.from_rows(node, [0], [["x"]])
    cy = PresentedModule.from_rows(node, [0], [["y"]])
    assert stable_hom(cx, cy, 0) == 0
    assert stable_hom(cx, cx, 0) == 1


@pytest.mark.parametrize("m", range(0, 3))
def test_stable_hom_independent_of_i(u2, m):
    k = residue_module(u2)
    for M, N in [(k, k), (k.twist(1), k), (k, k.twist(-1))]:
        vals = {stable_hom(M, N, m, i) for i in (-1, 0, 1)}
        assert len(vals) == 1


def test_b_functor_image_orthogonal(u2):
    probes = [residue_module(u2).twist(e) for e in (-1, 0, 1)]
    for M in probes:
        b = b_functor(M, 0)
        for e in range(-3, 1):
            for m in range(0, 5):
                assert ext_graded(b.module_complex, free_module(u2, e), m, 0) == 0


def test_sod_report_json_shape(p1):
    rep = verify_sod(p1, 0, "TRUNCATION", e_window=2)
    body = rep.to_json()
    assert list(body) == ["case", "i", "parameters", "blocks", "checks", "triangles", "pass"]
    assert body["pass"] is True
    json.dumps(body)


@pytest.mark.parametrize("case", ["TRUNCATION", "PERFECT", "TORSION"])
def test_sod_cases_pass_on_node(node, case):
    rep = verify_sod(node, 0, case, e_window=2, m_max=2)
    assert rep.passed, rep.failures()[:3]


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6))
def test_localization_triangle_random_probes(seed):
    ring = ring_p1()
    gens, rows = random_presentation(ring, seed, deg_range=(0, 1))
    M = PresentedModule.from_rows(ring, gens, rows)
    rep = verify_sod(ring, 0, "TORSION", probes=[Probe("M", M)],
                     e_window=2, m_max=1)
    assert rep.passed, rep.failures()[:3]


def test_cech_row_reports_exponent(kx):
    row, N = cech_row(free_module(kx, 0), 1, range(-3, 2))
    assert N >= 2
    assert [row[e].dim() for e in range(-3, 2)] == [1, 1, 1, 0, 0]


def test_cech_unstable_is_loud(kx):
    with pytest.raises(CechUnstable):
        cech_row(free_module(kx, 0), 1, range(-6, 1), cap=3)
