"""Text formats for rings, modules and matrix factorizations.

Ring::

    field Q            (or: field F 32003)
    vars x:1 y:1
    rel x*y

Module (over a ring given separately)::

    gens 0 0
    rel x y            (one relation per line, one polynomial per generator;
                        use commas when a polynomial contains spaces)

Matrix factorization (ring lines may be included at the top)::

    field Q
    vars x:1
    mf d=2 W=x^2
    E1 gens 2
    E0 gens 1
    e1 x               (one line per row)
    e0 x

Lines starting with ``#`` and blank lines are ignored.
"""

from __future__ import annotations

from typing import Iterator, Optional

from .grmod import DegreeMismatch, GradedFreeModule, GradedMap, PresentedModule
from .grring import GradedRing, NegativeWeight, ParseError, parse_poly
from .scalars import GF, QQ


def _lines(text: str) -> Iterator[tuple[int, str, str, int]]:
    """(line number, keyword, rest, column where rest starts)."""
    for no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split(None, 1)
        kw = parts[0]
        rest = parts[1] if len(parts) > 1 else ""
        col = len(raw) - len(raw.lstrip()[len(kw):].lstrip()) if rest else len(raw)
        yield no, kw, rest, col + 1


def _poly(text: str, names, field, line: int, col: int) -> dict:
    try:
        return parse_poly(text, names, field, line)
    except ParseError as ex:
        raise ParseError(ex.message, line, ex.column + col - 1) from None


def parse_ring_text(text: str) -> GradedRing:
    field = None
    names, weights = None, None
    rels = []
    for no, kw, rest, col in _lines(text):
        if kw == "field":
            toks = rest.split()
            if toks == ["Q"]:
                field = QQ
            elif len(toks) == 2 and toks[0] == "F" and toks[1].isdigit():
                try:
                    field = GF(int(toks[1]))
                except ValueError as ex:
                    raise ParseError(str(ex), no, col) from None
            else:
                raise ParseError("expected 'field Q' or 'field F <p>'", no, col)
        elif kw == "vars":
            if field is None:
                raise ParseError("the field must be declared before the variables", no, 1)
            names, weights = [], []
            for tok in rest.split():
                name, sep, w = tok.partition(":")
                pos = col + rest.index(tok)
                if not sep or not name.isidentifier():
                    raise ParseError("expected name:weight, got %r" % tok, no, pos)
                try:
                    wi = int(w)
                except ValueError:
                    raise ParseError("weight of %s is not an integer" % name, no, pos) from None
                if wi < 0:
                    raise NegativeWeight("variable %s has negative weight %d" % (name, wi))
                names.append(name)
                weights.append(wi)
            if not names:
                raise ParseError("no variables declared", no, col)
        elif kw == "rel":
            if names is None:
                raise ParseError("relations need the variables first", no, 1)
            rels.append(_poly(rest, names, field, no, col))
        else:
            raise ParseError("unknown keyword %r" % kw, no, 1)
    if field is None:
        raise ParseError("missing 'field' line", 1, 1)
    if names is None:
        raise ParseError("missing 'vars' line", 1, 1)
    return GradedRing(field, names, weights, rels)


def _entries(rest: str, n: int) -> list[tuple[str, int]]:
    """Split a row into ``n`` polynomial strings with their offsets."""
    if "," in rest:
        out, pos = [], 0
        for piece in rest.split(","):
            out.append((piece, pos))
            pos += len(piece) + 1
        return out
    if n == 1:
        return [(rest, 0)]
    out, pos = [], 0
    for tok in rest.split():
        pos = rest.index(tok, pos)
        out.append((tok, pos))
        pos += len(tok)
    return out


def _int_list(rest: str, no: int, col: int) -> list[int]:
    out = []
    for tok in rest.split():
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError("expected an integer degree, got %r" % tok, no, col + rest.index(tok)) from None
    return out


def parse_module_text(ring: GradedRing, text: str) -> PresentedModule:
    gens = None
    rows = []
    for no, kw, rest, col in _lines(text):
        if kw == "gens":
            gens = _int_list(rest, no, col)
        elif kw == "rel":
            if gens is None:
                raise ParseError("'gens' must come before relations", no, 1)
            ents = _entries(rest, len(gens))
            if len(ents) != len(gens):
                raise ParseError("expected %d entries, got %d" % (len(gens), len(ents)), no, col)
            rows.append([_poly(t, ring.names, ring.field, no, col + off) for t, off in ents])
        else:
            raise ParseError("unknown keyword %r" % kw, no, 1)
    if gens is None:
        raise ParseError("missing 'gens' line", 1, 1)
    return PresentedModule.from_rows(ring, gens, rows)


def module_to_text(M: PresentedModule) -> str:
    ring = M.ring
    lines = ["gens " + " ".join(str(g) for g in M.gens)]
    for col in M.rel.columns:
        ents = []
        for c in range(M.F0.rank):
            p = {e: x for (cc, e), x in col.items() if cc == c}
            ents.append(ring.format(p))
        lines.append("rel " + ", ".join(ents))
    return "\n".join(lines) + "\n"


def _row_line(lines: list[int], ex: Exception) -> int:
    row = getattr(ex, "row", 0)
    return lines[row] if 0 <= row < len(lines) else (lines[0] if lines else 1)


def parse_mf_text(text: str, S: Optional[GradedRing] = None):
    """Returns ``(HypersurfaceData, MatrixFactorization)``; identities are checked.

    Without ``S`` the file must start with ``field`` and ``vars`` lines.
    """
    from .mf import hypersurface, make_mf

    if S is None:
        head = []
        for raw in text.splitlines():
            kw = raw.split(None, 1)[0] if raw.strip() else ""
            head.append(raw if kw in ("field", "vars") else "")
        S = parse_ring_text("\n".join(head))
    header = None
    E1 = E0 = None
    rows = {"e1": [], "e0": []}
    row_lines = {"e1": [], "e0": []}
    for no, kw, rest, col in _lines(text):
        if kw in ("field", "vars"):
            continue
        if kw == "mf":
            d_part, _, w_part = rest.partition("W=")
            d_part = d_part.strip()
            if not d_part.startswith("d=") or not w_part:
                raise ParseError("expected 'mf d=<d> W=<poly>'", no, col)
            try:
                d = int(d_part[2:])
            except ValueError:
                raise ParseError("degree d is not an integer", no, col + 2) from None
            W = _poly(w_part, S.names, S.field, no, col + rest.index("W=") + 2)
            header = (d, W)
        elif kw in ("E1", "E0"):
            toks = rest.split(None, 1)
            if not toks or toks[0] != "gens":
                raise ParseError("expected '%s gens <degrees>'" % kw, no, col)
            degs = _int_list(toks[1], no, col + rest.index(toks[1])) if len(toks) > 1 else []
            if kw == "E1":
                E1 = degs
            else:
                E0 = degs
        elif kw in ("e1", "e0"):
            if E1 is None or E0 is None:
                raise ParseError("declare E1 and E0 before the maps", no, 1)
            n = len(E1) if kw == "e1" else len(E0)
            ents = _entries(rest, n)
            if len(ents) != n:
                raise ParseError("expected %d entries, got %d" % (n, len(ents)), no, col)
            rows[kw].append([_poly(t, S.names, S.field, no, col + off) for t, off in ents])
            row_lines[kw].append(no)
        else:
            raise ParseError("unknown keyword %r" % kw, no, 1)
    if header is None:
        raise ParseError("missing 'mf' header", 1, 1)
    if E1 is None or E0 is None:
        raise ParseError("missing E1/E0 generator lines", 1, 1)
    d, W = header
    hd = hypersurface(S, W)
    if hd.d != d:
        raise ParseError("W has degree %d, header says %d" % (hd.d, d), 1, 1)
    F1 = GradedFreeModule(S, E1)
    F0 = GradedFreeModule(S, E0)
    try:
        e1 = GradedMap.from_matrix(F1, F0, rows["e1"])
    except DegreeMismatch as ex:
        raise ParseError("e1: %s" % ex, _row_line(row_lines["e1"], ex), 1) from None
    try:
        e0 = GradedMap.from_matrix(F0, F1.twist(d), rows["e0"])
    except DegreeMismatch as ex:
        raise ParseError("e0: %s" % ex, _row_line(row_lines["e0"], ex), 1) from None
    return hd, make_mf(hd, F1, F0, e1, e0)
