import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ring_node, ring_p1, ring_u2
from oracles import complex_cohomology_dim, random_presentation

from orlovkit.complexes import (
    ChainMap,
    FreeComplex,
    MissingBandCertificate,
    NotAComplex,
    NotChainMap,
    cohomology,
    cohomology_slice,
    cone,
    dualize,
    shift,
    soft_truncate,
    split_check_zero_mixed,
    split_projectives,
)
from orlovkit import make_ring
from orlovkit.grmod import GradedFreeModule, GradedMap, PresentedModule
from orlovkit.orlov import residue_module
from orlovkit.resolve import resolve


def F(ring, *degs):
    return GradedFreeModule(ring, list(degs))


def mult(ring, src, tgt, rows):
    return GradedMap.from_matrix(F(ring, *src), F(ring, *tgt), rows)


def cdims(X, j, window):
    return [cohomology_slice(X, j, e).dim() for e in window]


def x_complex(kx):
    return FreeComplex(kx, {-1: F(kx, 1), 0: F(kx, 0)}, {-1: mult(kx, [1], [0], [["x"]])}, -1, 0)


def koszul(R=None):
    R = R or make_ring("Q", [("x", 1), ("y", 1)])
    d1 = mult(R, [2], [1, 1], [["y"], ["-x"]])
    d0 = mult(R, [1, 1], [0], [["x", "y"]])
    return FreeComplex(R, {-2: F(R, 2), -1: F(R, 1, 1), 0: F(R, 0)}, {-2: d1, -1: d0}, -2, 0)


def test_d_squared_enforced(kx):
    d = mult(kx, [1], [0], [["x"]])
    e = mult(kx, [0], [-1], [["x"]])
    with pytest.raises(NotAComplex):
        FreeComplex(kx, {-1: F(kx, 1), 0: F(kx, 0), 1: F(kx, -1)}, {-1: d, 0: e}, -1, 1)


def test_cone_of_x(kx):
    X = FreeComplex.single(F(kx, 1))
    Y = FreeComplex.single(F(kx, 0))
    C = cone(ChainMap(X, Y, {0: mult(kx, [1], [0], [["x"]])}))
    assert cdims(C, 0, range(-1, 4)) == [0, 1, 0, 0, 0]
    assert cdims(C, -1, range(-1, 4)) == [0] * 5


def test_cone_of_identity_is_acyclic(p1):
    X = koszul()
    idm = {j: GradedMap.identity(X.term(j)) for j in range(-2, 1)}
    C = cone(ChainMap(X, X, idm))
    for j in range(C.lo, C.hi + 1):
        assert cdims(C, j, range(0, 4)) == [0] * 4


def test_cone_from_zero_is_shifted_identity(p1):
    X = koszul()
    Z = FreeComplex(X.ring, {}, {}, -2, 0)
    C = cone(ChainMap(Z, X, {}))
    for j in range(-2, 1):
        assert cdims(C, j, range(0, 3)) == cdims(X, j, range(0, 3))


def test_not_chain_map(kx):
    X = x_complex(kx)
    with pytest.raises(NotChainMap):
        ChainMap(X, X, {0: GradedMap.identity(F(kx, 0))})


def test_koszul_cohomology(p1):
    K = koszul()
    assert cdims(K, 0, range(-1, 4)) == [0, 1, 0, 0, 0]
    for j in (-1, -2):
        assert cdims(K, j, range(-1, 4)) == [0] * 5
    H0 = cohomology(K, 0)
    assert [H0.dim(e) for e in range(3)] == [1, 0, 0]


def test_shift_convention(p1):
    K = koszul()
    S = shift(K, 1)
    assert S.lo == -3 and S.hi == -1
    assert S.diff(-2) == K.diff(-1).scale(-1)
    assert cdims(S, -1, range(3)) == cdims(K, 0, range(3))


def test_dualize_examples(kx, u2):
    D = dualize(FreeComplex.single(F(kx, 2)))
    assert D.term(0).degrees == (-2,)
    Dx = dualize(x_complex(kx))
    assert (Dx.lo, Dx.hi) == (0, 1)
    assert Dx.term(1).degrees == (-1,)
    # H^1 = k(1): one dimension in internal degree -1
    assert cdims(Dx, 1, range(-3, 3)) == [0, 0, 1, 0, 0, 0]


def test_dualize_residue_over_u2(u2):
    res = resolve(residue_module(u2), None, 4)
    P = res.complex
    Pb = FreeComplex(u2, {j: P.term(j) for j in range(-3, 1)}, {j: P.diff(j) for j in range(-3, 0)}, -3, 0)
    D = dualize(Pb)
    assert cdims(D, 0, range(-2, 4)) == [0, 0, 0, 1, 0, 0]


def test_dualize_involution(p1):
    K = koszul()
    DD = dualize(dualize(K))
    assert (DD.lo, DD.hi) == (K.lo, K.hi)
    for j in range(K.lo, K.hi):
        assert DD.diff(j) == K.diff(j)
        assert DD.term(j).degrees == K.term(j).degrees


def test_split_examples(kx, u2):
    P = FreeComplex.single(F(kx, 0, 2))
    s = split_projectives(P, 1)
    assert s.lower.term(0).degrees == (0,) and s.upper.term(0).degrees == (2,)
    s2 = split_projectives(FreeComplex.single(F(kx, 3)), 1)
    assert s2.lower.term(0).rank == 0 and s2.upper.term(0).degrees == (3,)
    res = resolve(residue_module(u2), None, 5)
    s3 = split_projectives(res.complex, 1)
    assert s3.lower.term(0).degrees == (0,)
    assert all(s3.lower.term(j).rank == 0 for j in range(res.complex.lo, 0))
    assert [s3.upper.term(-k).degrees for k in (1, 2)] == [(1,), (2,)]
    assert s3.upper.open_below and s3.upper.band.min_degree >= 1


def test_split_requires_band(u2):
    res = resolve(residue_module(u2), None, 3)
    with pytest.raises(MissingBandCertificate):
        split_projectives(res.complex, 50)


def test_soft_truncate_residue_over_u2(u2):
    res = resolve(residue_module(u2), None, 5)
    T = soft_truncate(res.complex, 2)
    assert T.lo == -2
    assert [T.term(-2).dim(e) for e in range(0, 4)] == [0, 0, 1, 0]
    assert [cohomology_slice(T, 0, e).dim() for e in range(3)] == [1, 0, 0]
    for j in (-1, -2):
        assert [cohomology_slice(T, j, e).dim() for e in range(4)] == [0] * 4


def test_soft_truncate_noop(p1):
    K = koszul()
    T = soft_truncate(K, 5)
    assert (T.lo, T.hi) == (K.lo, K.hi)


def test_soft_truncate_exact(p1):
    X = koszul()
    idm = {j: GradedMap.identity(X.term(j)) for j in range(-2, 1)}
    C = cone(ChainMap(X, X, idm))
    T = soft_truncate(C, 1)
    for j in range(T.lo, T.hi + 1):
        assert [cohomology_slice(T, j, e).dim() for e in range(4)] == [0] * 4


def test_cohomology_matches_oracle_on_koszul():
    K = koszul()
    for j in range(-2, 1):
        for e in range(-1, 4):
            assert cohomology_slice(K, j, e).dim() == complex_cohomology_dim(K.ring, K, j, e)


@given(st.integers(0, 10 ** 6), st.integers(-1, 2))
def test_split_is_slice_additive(seed, i):
    ring = ring_node()
    gens, rows = random_presentation(ring, seed)
    M = PresentedModule.from_rows(ring, gens, rows)
    P = resolve(M, i + 2, None).complex
    if P.band.min_degree is None or P.band.min_degree < i:
        return
    s = split_projectives(P, i)
    assert split_check_zero_mixed(P, i)
    for j in range(P.lo, P.hi + 1):
        for e in range(-3, 4):
            whole = PresentedModule.free(P.term(j)).dim(e)
            assert whole == PresentedModule.free(s.lower.term(j)).dim(e) + PresentedModule.free(s.upper.term(j)).dim(e)


@given(st.integers(0, 10 ** 6))
def test_cone_euler_characteristic(seed):
    ring = ring_u2()
    gens, rows = random_presentation(ring, seed)
    M = PresentedModule.from_rows(ring, gens, rows)
    X = FreeComplex.single(M.F1)
    Y = FreeComplex.single(M.F0)
    C = cone(ChainMap(X, Y, {0: M.rel}))

    def chi(Z, e):
        return sum((-1) ** j * cohomology_slice(Z, j, e).dim() for j in range(Z.lo, Z.hi + 1))

    for e in range(-2, 4):
        assert chi(C, e) == chi(Y, e) - chi(X, e)
        assert cohomology_slice(C, 0, e).dim() == M.dim(e)


@given(st.integers(0, 10 ** 6))
def test_complex_cohomology_matches_oracle(seed):
    ring = ring_node()
    gens, rows = random_presentation(ring, seed)
    M = PresentedModule.from_rows(ring, gens, rows)
    P = resolve(M, None, 3).complex
    for j in range(P.lo + 1, 1):
        for e in range(-1, 4):
            assert cohomology_slice(P, j, e).dim() == complex_cohomology_dim(ring, P, j, e)
