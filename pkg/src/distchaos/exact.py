"""Exact rational linear algebra on sparse rows.

Rows are ``dict`` objects mapping a column index to a non-zero
:class:`~fractions.Fraction`.  Elimination keeps the rows sparse and never
touches floating point, so ranks and nullspaces are decided exactly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

Row = Dict[int, Fraction]


def _as_row(row) -> Row:
    if isinstance(row, dict):
        return {int(c): Fraction(v) for c, v in row.items() if v != 0}
    return {c: Fraction(v) for c, v in enumerate(row) if v != 0}


def echelon(rows: Sequence, ncols: int) -> Tuple[List[Row], List[int]]:
    """Reduced row echelon form of ``rows``.

    Returns the non-zero reduced rows (pivot entry 1, zero in every other
    pivot column) together with their pivot columns, sorted by pivot.
    """
    work = [_as_row(r) for r in rows]
    work = [r for r in work if r]
    pivots: Dict[int, Row] = {}
    for row in work:
        # reduce against existing pivots, lowest column first
        while row:
            hit = [c for c in row if c in pivots]
            if not hit:
                break
            c = min(hit)
            factor = row[c]
            for cc, v in pivots[c].items():
                nv = row.get(cc, 0) - factor * v
                if nv:
                    row[cc] = nv
                else:
                    row.pop(cc, None)
        if not row:
            continue
        c = min(row)
        inv = 1 / row[c]
        row = {cc: v * inv for cc, v in row.items()}
        # back-eliminate the new pivot from earlier pivot rows
        for pc, prow in pivots.items():
            f = prow.get(c)
            if f:
                for cc, v in row.items():
                    nv = prow.get(cc, 0) - f * v
                    if nv:
                        prow[cc] = nv
                    else:
                        prow.pop(cc, None)
        pivots[c] = row
        if c >= ncols:
            raise IndexError(f"column {c} out of range for ncols={ncols}")
    order = sorted(pivots)
    return [pivots[c] for c in order], order


def rank(rows: Sequence, ncols: int) -> int:
    return len(echelon(rows, ncols)[1])


def nullspace(rows: Sequence, ncols: int) -> List[List[Fraction]]:
    """Basis of ``{v : rows @ v = 0}``, one vector per free column.

    Each basis vector has a 1 in its free column and 0 in every other free
    column, so the basis is canonical for a fixed column order.
    """
    red, piv = echelon(rows, ncols)
    pivset = set(piv)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for prow, pc in zip(red, piv):
            coef = prow.get(free)
            if coef:
                v[pc] = -coef
        basis.append(v)
    return basis


def solve(rows: Sequence, rhs: Sequence, ncols: int) -> Optional[List[Fraction]]:
    """One exact solution of ``rows @ x = rhs`` (free variables set to 0).

    Returns ``None`` when the system is inconsistent.
    """
    aug = []
    for r, b in zip(rows, rhs):
        row = _as_row(r)
        if b:
            row[ncols] = Fraction(b)
        aug.append(row)
    red, piv = echelon(aug, ncols + 1)
    if piv and piv[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for prow, pc in zip(red, piv):
        x[pc] = prow.get(ncols, Fraction(0))
    return x


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> List[List[Fraction]]:
    """Dense exact product; skips zero entries of ``a``."""
    ncol = len(b[0]) if b else 0
    out = []
    for arow in a:
        acc = [Fraction(0)] * ncol
        for k, av in enumerate(arow):
            if av:
                brow = b[k]
                for j in range(ncol):
                    if brow[j]:
                        acc[j] += av * brow[j]
        out.append(acc)
    return out


def transpose(a: Sequence[Sequence]) -> List[List]:
    return [list(col) for col in zip(*a)] if a else []
