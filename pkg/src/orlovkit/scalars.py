"""Exact scalars, exact linear algebra and Smith normal form over k[x].

Coefficients are either :class:`fractions.Fraction` (the field ``QQ``) or
:class:`FpElement` residues.  Both support the ordinary arithmetic
operators, so the polynomial code above this module never needs to know
which field it is working over.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

DEFAULT_PRIME = 32003
DENSITY_THRESHOLD = 0.25


class Field:
    """Descriptor for a coefficient field."""

    name = "field"
    characteristic = 0

    def __call__(self, value) -> object:
        raise NotImplementedError

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def __repr__(self) -> str:
        return self.name


class RationalField(Field):
    name = "QQ"
    characteristic = 0

    def __call__(self, value) -> Fraction:
        if isinstance(value, FpElement):
            raise TypeError("cannot coerce a residue into QQ")
        return Fraction(value)

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("QQ")

    def to_text(self) -> str:
        return "Q"


class FpElement:
    """Residue class modulo a prime, canonical representative 0 <= value < p."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.value = value % p
        self.p = p

    def _coerce(self, other) -> "FpElement":
        if isinstance(other, FpElement):
            if other.p != self.p:
                raise ValueError("mixing residues of different characteristic")
            return other
        if isinstance(other, int):
            return FpElement(other, self.p)
        if isinstance(other, Fraction):
            return FpElement(other.numerator, self.p) / FpElement(other.denominator, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(self.value + o.value, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(self.value - o.value, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(o.value - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(self.value * o.value, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElement(-self.value, self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.value == 0:
            raise ZeroDivisionError("division by zero in GF(%d)" % self.p)
        return FpElement(self.value * pow(o.value, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __eq__(self, other) -> bool:
        if isinstance(other, FpElement):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return False

    def __hash__(self) -> int:
        return hash((self.value, self.p))

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return "%d mod %d" % (self.value, self.p)

    def __str__(self) -> str:
        # symmetric representative reads better in printed polynomials
        v = self.value
        return str(v - self.p if v > self.p // 2 else v)


class PrimeField(Field):
    def __init__(self, p: int = DEFAULT_PRIME):
        if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise ValueError("%d is not prime" % p)
        self.p = p
        self.characteristic = p
        self.name = "GF(%d)" % p

    def __call__(self, value) -> FpElement:
        if isinstance(value, FpElement):
            if value.p != self.p:
                raise ValueError("residue from a different field")
            return value
        if isinstance(value, Fraction):
            return FpElement(value.numerator, self.p) / FpElement(value.denominator, self.p)
        return FpElement(int(value), self.p)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("GF", self.p))

    def to_text(self) -> str:
        return "F %d" % self.p


QQ = RationalField()


def GF(p: int = DEFAULT_PRIME) -> PrimeField:
    return PrimeField(p)


# ---------------------------------------------------------------------------
# dense / sparse exact matrices


class ExactMatrix:
    """Matrix over an exact field.

    Rows are stored sparsely (``{col: value}``) unless the density exceeds
    ``density_threshold``, in which case dense lists are used.  The storage
    choice never changes results.
    """

    def __init__(self, field: Field, nrows: int, ncols: int, rows, density_threshold: float = DENSITY_THRESHOLD):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        sparse_rows = []
        nnz = 0
        for r in rows:
            if isinstance(r, dict):
                d = {c: field(v) for c, v in r.items() if v}
            else:
                if len(r) != ncols:
                    raise ValueError("row length %d != %d columns" % (len(r), ncols))
                d = {c: field(v) for c, v in enumerate(r) if v}
            nnz += len(d)
            sparse_rows.append(d)
        if len(sparse_rows) != nrows:
            raise ValueError("expected %d rows, got %d" % (nrows, len(sparse_rows)))
        total = max(nrows * ncols, 1)
        self.dense = nnz / total > density_threshold
        self._rows = sparse_rows

    @classmethod
    def from_lists(cls, field: Field, rows: Sequence[Sequence]) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(field, len(rows), ncols, rows)

    @classmethod
    def identity(cls, field: Field, n: int) -> "ExactMatrix":
        return cls(field, n, n, [{i: 1} for i in range(n)])

    def row(self, i: int) -> dict:
        return dict(self._rows[i])

    def to_lists(self) -> list[list]:
        z = self.field.zero
        return [[r.get(c, z) for c in range(self.ncols)] for r in self._rows]

    def transpose(self) -> "ExactMatrix":
        cols = [dict() for _ in range(self.ncols)]
        for i, r in enumerate(self._rows):
            for c, v in r.items():
                cols[c][i] = v
        return ExactMatrix(self.field, self.ncols, self.nrows, cols)

    def matvec(self, x: Sequence) -> list:
        z = self.field.zero
        out = []
        for r in self._rows:
            s = z
            for c, v in r.items():
                s = s + v * x[c]
            out.append(s)
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExactMatrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self._rows == other._rows
        )

    def __repr__(self) -> str:
        return "ExactMatrix(%dx%d)" % (self.nrows, self.ncols)


def _as_matrix(m, field: Field | None = None) -> ExactMatrix:
    if isinstance(m, ExactMatrix):
        return m
    return ExactMatrix.from_lists(field or QQ, m)


def _eliminate(rows: list[dict], ncols: int) -> tuple[list[dict], list[int]]:
    """Gauss-Jordan elimination on sparse rows; returns (nonzero reduced rows, pivots)."""
    pivot_rows: dict[int, dict] = {}
    order: list[int] = []
    for r in rows:
        r = dict(r)
        # reduce against existing pivots
        for pc in order:
            v = r.get(pc)
            if v:
                for c, pv in pivot_rows[pc].items():
                    nv = r.get(c, 0) - v * pv
                    if nv:
                        r[c] = nv
                    else:
                        r.pop(c, None)
        if not r:
            continue
        pc = min(r)
        inv = 1 / r[pc]
        r = {c: v * inv for c, v in r.items()}
        # back-substitute into earlier pivot rows
        for oc in order:
            orow = pivot_rows[oc]
            v = orow.get(pc)
            if v:
                for c, rv in r.items():
                    nv = orow.get(c, 0) - v * rv
                    if nv:
                        orow[c] = nv
                    else:
                        orow.pop(c, None)
        pivot_rows[pc] = r
        order.append(pc)
    pivots = sorted(order)
    return [pivot_rows[p] for p in pivots], pivots


def rref(m, field: Field | None = None) -> tuple[int, list[int], ExactMatrix]:
    """Reduced row-echelon form: ``(rank, pivot columns, reduced matrix)``."""
    mat = _as_matrix(m, field)
    reduced, pivots = _eliminate(mat._rows, mat.ncols)
    rows = reduced + [{} for _ in range(mat.nrows - len(reduced))]
    return len(pivots), pivots, ExactMatrix(mat.field, mat.nrows, mat.ncols, rows)


def rank(m, field: Field | None = None) -> int:
    mat = _as_matrix(m, field)
    return len(_eliminate(mat._rows, mat.ncols)[1])


def rank_of_columns(columns: Iterable[dict], nrows: int | None = None) -> int:
    """Rank of a matrix given as sparse columns ``{row: value}``."""
    return len(_eliminate(list(columns), 0)[1])


def solve_linear(m, b: Sequence, field: Field | None = None):
    """Return some ``x`` with ``m x = b`` exactly, or ``None`` if inconsistent."""
    mat = _as_matrix(m, field)
    if len(b) != mat.nrows:
        raise ValueError("dimension mismatch: %d rows vs rhs of length %d" % (mat.nrows, len(b)))
    F = mat.field
    n = mat.ncols
    aug = []
    for i, r in enumerate(mat._rows):
        row = dict(r)
        if b[i]:
            row[n] = F(b[i])
        aug.append(row)
    reduced, pivots = _eliminate(aug, n + 1)
    if n in pivots:
        return None
    x = [F.zero] * n
    for row, pc in zip(reduced, pivots):
        x[pc] = row.get(n, F.zero)
    return x


def nullspace(m, field: Field | None = None) -> list[list]:
    mat = _as_matrix(m, field)
    F = mat.field
    reduced, pivots = _eliminate(mat._rows, mat.ncols)
    free = [c for c in range(mat.ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [F.zero] * mat.ncols
        v[fc] = F.one
        for row, pc in zip(reduced, pivots):
            val = row.get(fc)
            if val:
                v[pc] = -val
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# univariate polynomials (coefficient lists, low degree first)


class UPoly:
    """Univariate polynomial over an exact field; immutable."""

    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs: Iterable, field: Field = QQ):
        cs = [field(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)
        self.field = field

    @classmethod
    def x(cls, field: Field = QQ) -> "UPoly":
        return cls([0, 1], field)

    @classmethod
    def const(cls, c, field: Field = QQ) -> "UPoly":
        return cls([c], field)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_unit(self) -> bool:
        return len(self.coeffs) == 1

    def lc(self):
        return self.coeffs[-1]

    def __add__(self, other: "UPoly") -> "UPoly":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        z = self.field.zero
        return UPoly([(a[i] if i < len(a) else z) + (b[i] if i < len(b) else z) for i in range(n)], self.field)

    def __neg__(self) -> "UPoly":
        return UPoly([-c for c in self.coeffs], self.field)

    def __sub__(self, other: "UPoly") -> "UPoly":
        return self + (-other)

    def __mul__(self, other) -> "UPoly":
        if not isinstance(other, UPoly):
            return UPoly([c * other for c in self.coeffs], self.field)
        if not self.coeffs or not other.coeffs:
            return UPoly([], self.field)
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
        return UPoly(out, self.field)

    __rmul__ = __mul__

    def __divmod__(self, other: "UPoly") -> tuple["UPoly", "UPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        q = [self.field.zero] * max(len(r) - len(other.coeffs) + 1, 0)
        inv = 1 / other.lc()
        d = other.degree
        for k in range(len(r) - 1, d - 1, -1):
            c = r[k]
            if c:
                f = c * inv
                q[k - d] = f
                for i, oc in enumerate(other.coeffs):
                    r[k - d + i] = r[k - d + i] - f * oc
        return UPoly(q, self.field), UPoly(r, self.field)

    def monic(self) -> "UPoly":
        if self.is_zero():
            return self
        return self * (1 / self.lc())

    def __eq__(self, other) -> bool:
        if isinstance(other, UPoly):
            return self.coeffs == other.coeffs
        if other == 0:
            return not self.coeffs
        return False

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else "x^%d" % i)
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append("%s*%s" % (c, mono))
        return " + ".join(reversed(terms))


def _upoly_matrix(m: Sequence[Sequence], field: Field) -> list[list[UPoly]]:
    return [[e if isinstance(e, UPoly) else UPoly([e], field) for e in row] for row in m]


def _identity_upoly(n: int, field: Field) -> list[list[UPoly]]:
    return [[UPoly([1 if i == j else 0], field) for j in range(n)] for i in range(n)]


def upoly_matmul(a: list[list[UPoly]], b: list[list[UPoly]], field: Field) -> list[list[UPoly]]:
    n, k = len(a), len(b)
    m = len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = UPoly([], field)
            for t in range(k):
                if not a[i][t].is_zero() and not b[t][j].is_zero():
                    s = s + a[i][t] * b[t][j]
            row.append(s)
        out.append(row)
    return out


def upoly_det(m: list[list[UPoly]], field: Field) -> UPoly:
    """Determinant by cofactor expansion (small matrices only)."""
    n = len(m)
    if n == 0:
        return UPoly([1], field)
    if n == 1:
        return m[0][0]
    total = UPoly([], field)
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * upoly_det(minor, field)
        total = total + term if j % 2 == 0 else total - term
    return total


def smith_normal_form(m: Sequence[Sequence], field: Field = QQ, with_inverses: bool = False):
    """Smith normal form over ``k[x]``.

    Returns ``(U, D, V)`` with ``U * m * V == D``, ``U`` and ``V`` unimodular
    and the nonzero diagonal of ``D`` monic with each entry dividing the next.
    Entries of ``m`` may be :class:`UPoly` or field scalars.  With
    ``with_inverses`` the tuple is extended by ``U^-1`` and ``V^-1``.
    """
    D = _upoly_matrix(m, field)
    nr = len(D)
    nc = len(D[0]) if nr else 0
    U = _identity_upoly(nr, field)
    V = _identity_upoly(nc, field)
    Ui = _identity_upoly(nr, field)
    Vi = _identity_upoly(nc, field)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]
        for row in Ui:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(src, dst, f):  # row_dst += f * row_src
        D[dst] = [a + f * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]
        for row in Ui:
            row[src] = row[src] - f * row[dst]

    def add_col(src, dst, f):  # col_dst += f * col_src
        for row in D:
            row[dst] = row[dst] + f * row[src]
        for row in V:
            row[dst] = row[dst] + f * row[src]
        Vi[src] = [a - f * b for a, b in zip(Vi[src], Vi[dst])]

    t = 0
    while t < min(nr, nc):
        # smallest-degree nonzero entry in the remaining block
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                e = D[i][j]
                if not e.is_zero() and (best is None or e.degree < D[best[0]][best[1]].degree):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            p = D[t][t]
            for i in range(t + 1, nr):
                if not D[i][t].is_zero():
                    q, r = divmod(D[i][t], p)
                    add_row(t, i, -q)
                    if not r.is_zero():
                        swap_rows(t, i)
                        done = False
                        break
            if not done:
                continue
            p = D[t][t]
            for j in range(t + 1, nc):
                if not D[t][j].is_zero():
                    q, r = divmod(D[t][j], p)
                    add_col(t, j, -q)
                    if not r.is_zero():
                        swap_cols(t, j)
                        done = False
                        break
            if not done:
                continue
            # divisibility of the remaining block
            p = D[t][t]
            bad = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if not divmod(D[i][j], p)[1].is_zero():
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(bad, t, UPoly([1], field))
        c = D[t][t].lc()
        if c != 1:
            inv = 1 / c
            U[t] = [e * inv for e in U[t]]
            D[t] = [e * inv for e in D[t]]
            for row in Ui:
                row[t] = row[t] * c
        t += 1
    if with_inverses:
        return U, D, V, Ui, Vi
    return U, D, V


def smith_invariants(m: Sequence[Sequence], field: Field = QQ) -> tuple[list[UPoly], int]:
    """Nonzero invariant factors and the rank of ``m`` over ``k[x]``."""
    _, D, _ = smith_normal_form(m, field)
    diag = [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if not D[i][i].is_zero()]
    return diag, len(diag)
