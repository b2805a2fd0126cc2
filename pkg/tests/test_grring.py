import pytest
from hypothesis import given
from hypothesis import strategies as st

from orlovkit import GF, QQ, make_ring, parse_poly
from orlovkit.formats import parse_ring_text
from orlovkit.grmod import GradedFreeModule, GradedMap
from orlovkit.grring import (
    BaseClass,
    InhomogeneousRelation,
    NegativeWeight,
    NotInImage,
    ParseError,
    buchberger_certificate,
    groebner,
    lift,
    normal_form,
    pmul,
    syzygies,
)


def P(ring, text):
    return ring.parse(text)


def test_polynomial_ring_is_field_based(kx):
    assert kx.base_class == BaseClass.FIELD
    assert kx.relations == ()


def test_x2t_ring_has_pid_base(x2t):
    assert x2t.base_class == BaseClass.UNIVARIATE_PID


def test_two_degree_zero_variables_is_general():
    R = make_ring("Q", [("x", 0), ("y", 0), ("T", 1)])
    assert R.base_class == BaseClass.GENERAL


def test_inhomogeneous_relation_rejected():
    with pytest.raises(InhomogeneousRelation):
        make_ring("Q", [("x", 0), ("y", 1)], ["x^2", "y^2 + x"])


def test_negative_weight_rejected():
    with pytest.raises(NegativeWeight):
        make_ring("Q", [("x", -1)])


def test_groebner_of_monomial_ideal():
    R = make_ring("Q", [("x", 1), ("y", 1)])
    gb = groebner(R, [P(R, "x^2"), P(R, "x*y")])
    assert sorted(R.format({e: c for (_, e), c in g.items()}) for g in gb) == ["x*y", "x^2"]
    assert buchberger_certificate(R, gb)


def test_groebner_of_zero_ideal(kx):
    assert groebner(kx, []) == []


def test_principal_ideal_in_x2t(x2t):
    S = make_ring("Q", [("x", 0), ("T", 1)])
    gb = groebner(S, [P(S, "x^2*T")])
    assert len(gb) == 1
    assert {e: c for (_, e), c in gb[0].items()} == P(S, "x^2*T")


def test_normal_forms():
    R = make_ring("Q", [("x", 1)])
    assert normal_form(R, P(R, "x^3"), [P(R, "x^2")]) == {}
    S = make_ring("Q", [("x", 0), ("T", 1)])
    assert normal_form(S, P(S, "x^2*T + x*T"), [P(S, "x^2*T")]) == P(S, "x*T")
    K = make_ring("Q", [("x", 1), ("y", 1)])
    assert normal_form(K, P(K, "x^2*y"), [P(K, "x^2"), P(K, "x*y")]) == {}


def test_ring_arithmetic_uses_normal_forms(u2):
    u = u2.element(u2.var("u"))
    assert (u * u).is_zero()
    assert (u + 1) * (1 - u) == 1


def test_syzygy_of_nonzerodivisor(kx):
    f = GradedMap.from_matrix(GradedFreeModule(kx, [1]), GradedFreeModule(kx, [0]), [["x"]])
    assert syzygies(f).source.rank == 0


def test_syzygy_of_u_is_u(u2):
    f = GradedMap.from_matrix(GradedFreeModule(u2, [1]), GradedFreeModule(u2, [0]), [["u"]])
    g = syzygies(f)
    assert g.source.degrees == (2,)
    assert f.compose(g).is_zero()
    assert g.rows() == [[P(u2, "u")]]


def test_koszul_syzygy():
    R = make_ring("Q", [("x", 1), ("y", 1)])
    f = GradedMap.from_matrix(GradedFreeModule(R, [1, 1]), GradedFreeModule(R, [0]), [["x", "y"]])
    g = syzygies(f)
    assert g.source.degrees == (2,)
    assert f.compose(g).is_zero()
    col = g.rows()
    assert col == [[P(R, "y")], [P(R, "-x")]] or col == [[P(R, "-y")], [P(R, "x")]]


def test_lift(kx):
    R = make_ring("Q", [("x", 1), ("y", 1)])
    through = GradedMap.from_matrix(GradedFreeModule(kx, [1]), GradedFreeModule(kx, [0]), [["x"]])
    assert lift({(0, (2,)): QQ(1)}, through) == {(0, (1,)): QQ(1)}
    through2 = GradedMap.from_matrix(GradedFreeModule(R, [1]), GradedFreeModule(R, [0]), [["x"]])
    with pytest.raises(NotInImage):
        lift({(0, (0, 1)): QQ(1)}, through2)
    # W = xy through e1 = x: S(-2) -> S(-1)
    e1 = GradedMap.from_matrix(GradedFreeModule(R, [2]), GradedFreeModule(R, [1]), [["x"]])
    u = lift({(0, (1, 1)): QQ(1)}, e1)
    assert u == {(0, (0, 1)): QQ(1)}


def test_parse_error_columns():
    with pytest.raises(ParseError) as ex:
        parse_poly("x + * y", ["x", "y"])
    assert ex.value.line == 1 and ex.value.column >= 5


def test_ring_text_round_trip_examples():
    for text in ["field Q\nvars x:1\n", "field Q\nvars x:0 T:1\nrel x^2*T\n",
                 "field F 32003\nvars x:1 y:1\nrel x*y\n"]:
        R = parse_ring_text(text)
        R2 = parse_ring_text(R.to_text())
        assert R2.signature() == R.signature()
        assert R2.to_text() == R.to_text()


def test_missing_field_is_line_one():
    with pytest.raises(ParseError) as ex:
        parse_ring_text("vars x:1")
    assert ex.value.line == 1


terms = st.tuples(st.integers(-3, 3), st.integers(0, 3), st.integers(0, 3))


@given(st.lists(terms, min_size=1, max_size=4), st.sampled_from([QQ, GF(7)]))
def test_format_parse_round_trip(ts, field):
    R = make_ring(field, [("x", 1), ("y", 2)])
    p = {}
    for c, a, b in ts:
        p[(a, b)] = field(p.get((a, b), 0)) + field(c) if (a, b) in p else field(c)
    p = {e: c for e, c in p.items() if c}
    assert R.parse(R.format(p)) == p


@given(st.lists(st.lists(terms, min_size=1, max_size=3), min_size=1, max_size=3))
def test_groebner_basis_properties(gens):
    R = make_ring("Q", [("x", 1), ("y", 1)])
    # homogenize each generator by keeping only its top-degree terms
    polys = []
    for g in gens:
        top = max(a + b for _, a, b in g)
        p = {}
        for c, a, b in g:
            if a + b == top and c:
                p[(a, b)] = p.get((a, b), 0) + c
        p = {e: QQ(c) for e, c in p.items() if c}
        if p:
            polys.append(p)
    gb = groebner(R, polys)
    assert buchberger_certificate(R, gb)
    for p in polys:
        assert normal_form(R, p, gb) == {}
    probe = pmul(P(R, "x^2 + x*y"), P(R, "y"))
    nf = normal_form(R, probe, gb)
    assert normal_form(R, nf, gb) == nf
