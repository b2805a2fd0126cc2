import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ring_kx, ring_node, ring_p1, ring_u2
from oracles import random_presentation, slice_dim

from orlovkit import make_ring
from orlovkit.grmod import (
    DegreeMismatch,
    GradedFreeModule,
    GradedMap,
    PresentedModule,
    hom_graded,
    torsion_submodule,
    truncate_geq,
    twist,
)
from orlovkit.orlov import free_module, residue_module

FIELD_RINGS = [ring_kx, ring_p1, ring_u2, ring_node]


def dims(M, window):
    return [M.dim(j) for j in window]


def oracle_dims(M, window):
    ring = M.ring
    rows = [[{e: c for (cc, e), c in col.items() if cc == k} for k in range(M.F0.rank)]
            for col in M.rel.columns]
    return [slice_dim(ring.weights, ring.relations, list(M.gens), rows, j) for j in window]


@pytest.mark.parametrize("e", range(-3, 4))
def test_convention_lock_free_module_support(kx, e):
    # A(e) has its generator in degree -e
    M = free_module(kx, e)
    assert M.gens == (-e,)
    assert [M.dim(j) for j in range(-4, 5)] == [1 if j >= -e else 0 for j in range(-4, 5)]


def test_twist_examples(kx):
    A = free_module(kx, 0)
    assert twist(A, 0).gens == A.gens
    assert twist(free_module(kx, -1), 1).gens == (0,)
    k1 = twist(residue_module(kx), 1)
    assert [k1.dim(j) for j in range(-3, 3)] == [0, 0, 1, 0, 0, 0]


def test_map_degree_check(kx):
    with pytest.raises(DegreeMismatch):
        GradedMap.from_matrix(GradedFreeModule(kx, [2]), GradedFreeModule(kx, [0]), [["x"]])


def test_truncate_kx(kx):
    tr = truncate_geq(free_module(kx, 0), 1)
    assert tr.sub.gens == (1,)
    assert [tr.sub.dim(j) for j in range(4)] == [0, 1, 1, 1]
    assert [tr.quotient.dim(j) for j in range(4)] == [1, 0, 0, 0]


def test_truncate_already_generated_high(p1):
    M = PresentedModule.from_rows(p1, [1], [["x0"]])
    tr = truncate_geq(M, 0)
    assert tr.quotient.is_zero()
    assert dims(tr.sub, range(6)) == dims(M, range(6))


def test_truncate_kills_k1_over_u2(u2):
    tr = truncate_geq(residue_module(u2).twist(1), 0)
    assert tr.sub.is_zero()


def test_slices(kx, x2t):
    assert free_module(kx, 0).dim(2) == 1
    sl = free_module(x2t, 0).slice(1).base_module()
    rk, tors = sl.invariants()
    assert rk == 0 and [t.degree for t in tors] == [2]
    k = residue_module(kx)
    assert [k.dim(j) for j in (-2, -1, 1, 2)] == [0, 0, 0, 0]


def test_hom_graded(u2):
    A = free_module(u2, 0)
    k = residue_module(u2)
    N = PresentedModule.from_rows(u2, [0, 1], [["u", "-1"]])
    for e in range(-2, 4):
        assert hom_graded(A, N, e).dim() == N.dim(e)
    assert [hom_graded(k, A, e).dim() for e in range(-2, 4)] == [0, 0, 0, 1, 0, 0]
    assert hom_graded(k, k, 0).dim() >= 1


def test_torsion_examples(kx, x2t, u2):
    assert torsion_submodule(free_module(kx, 0)).module.is_zero()
    t = torsion_submodule(free_module(x2t, 0))
    # tau(A) = (x^2): its degree-0 slice is x^2 k[x], free of rank 1, and it vanishes above
    sl0 = t.module.slice(0).base_module()
    assert sl0.invariants() == (1, [])
    assert t.module.slice(1).base_module().dim() == 0
    M = PresentedModule.from_rows(u2, [0, 1], [])
    tm = torsion_submodule(M).module
    assert dims(tm, range(-1, 4)) == dims(M, range(-1, 4))


def test_torsion_is_idempotent_and_quotient_torsion_free(p1):
    M = PresentedModule.from_rows(p1, [0, 0], [["x0", "0"], ["x1", "0"], ["0", "x0*x1"]])
    t = torsion_submodule(M)
    assert dims(t.module, range(-1, 4)) == [0, 1, 0, 0, 0]
    again = torsion_submodule(t.module).module
    assert dims(again, range(-1, 4)) == dims(t.module, range(-1, 4))
    quot = PresentedModule(GradedMap(GradedFreeModule(p1, list(M.F1.degrees) + list(t.inclusion.source.degrees)),
                                     M.F0, list(M.rel.columns) + list(t.inclusion.columns), check=False))
    assert torsion_submodule(quot).module.is_zero()


@pytest.mark.parametrize("make", FIELD_RINGS)
@pytest.mark.parametrize("seed", range(6))
def test_slices_match_brute_force(make, seed):
    ring = make()
    gens, rows = random_presentation(ring, seed)
    M = PresentedModule.from_rows(ring, gens, rows)
    window = range(-2, 5)
    assert dims(M, window) == oracle_dims(M, window)


@given(st.integers(0, 10 ** 6), st.integers(-2, 2), st.integers(-2, 2))
def test_twist_functoriality(seed, e, i):
    ring = ring_node()
    gens, rows = random_presentation(ring, seed)
    M = PresentedModule.from_rows(ring, gens, rows)
    assert twist(M, e).dim(i) == M.dim(e + i)


@given(st.integers(0, 10 ** 6), st.integers(-1, 2))
def test_truncation_is_slice_exact(seed, i):
    ring = ring_p1()
    gens, rows = random_presentation(ring, seed)
    M = PresentedModule.from_rows(ring, gens, rows)
    tr = truncate_geq(M, i)
    for j in range(-2, 5):
        assert tr.sub.dim(j) + tr.quotient.dim(j) == M.dim(j)
        assert (tr.sub.dim(j) if j < i else tr.quotient.dim(j)) == 0


@given(st.integers(0, 10 ** 6))
def test_truncation_adjunction(seed):
    ring = ring_p1()
    gens, rows = random_presentation(ring, seed)
    M = PresentedModule.from_rows(ring, gens, rows)
    N = PresentedModule.from_rows(ring, [1], [])
    tr = truncate_geq(M, 1)
    assert hom_graded(N, tr.sub, 0).dim() == hom_graded(N, M, 0).dim()
