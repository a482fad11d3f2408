"""Sparse exact Gaussian elimination.

Works over any field whose elements support ``+ - * /`` and truthiness:
``fractions.Fraction`` for integer-coefficient systems, and :class:`RatFunc`
(the fraction field Q(i)(pi) of :class:`ExactScalar`) for everything else.
Rows are dicts ``{column: value}`` with no zero entries.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .scalars import ONE, ExactScalar, NotInvertible, as_scalar

Row = Dict[int, object]


class InconsistentSystem(ArithmeticError):
    pass


class UnderdeterminedSystem(ArithmeticError):
    pass


class RatFunc:
    """Quotient ``num / den`` of two ExactScalars, reduced when the division is exact."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=ONE):
        num = as_scalar(num)
        den = as_scalar(den)
        if not den:
            raise ZeroDivisionError("RatFunc with zero denominator")
        if den.is_monomial():
            num, den = num * den.inv(), ONE
        elif num:
            try:
                num, den = num.exact_div(den), ONE
            except NotInvertible:
                pass
        self.num = num
        self.den = den

    def __bool__(self) -> bool:
        return bool(self.num)

    def __add__(self, other: "RatFunc") -> "RatFunc":
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return self + (-other)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        if not other.num:
            raise ZeroDivisionError("division by zero in Q(i)(pi)")
        return RatFunc(self.num * other.den, self.den * other.num)

    def is_unit_cheap(self) -> bool:
        return self.den == ONE and self.num.is_monomial()

    def to_scalar(self) -> ExactScalar:
        """Back to a Laurent polynomial; raises NotInvertible if not one."""
        if self.den == ONE:
            return self.num
        return self.num.exact_div(self.den)

    def __repr__(self) -> str:
        return f"RatFunc({self.num} / {self.den})"


def to_ratfunc_rows(matrix: Sequence[Sequence]) -> List[Row]:
    rows: List[Row] = []
    for r in matrix:
        row = {}
        for j, v in enumerate(r):
            v = as_scalar(v)
            if v:
                row[j] = RatFunc(v)
        rows.append(row)
    return rows


def _pick(cands: List[int], rows: List[Row], col: int) -> int:
    best, best_cost = cands[0], None
    for i in cands:
        v = rows[i][col]
        if isinstance(v, RatFunc):
            cost = (0 if v.is_unit_cheap() else 1, len(rows[i]))
        else:
            cost = (0, len(rows[i]))
        if best_cost is None or cost < best_cost:
            best, best_cost = i, cost
    return best


def rref(rows: Sequence[Row], ncols: int, pivot_limit: Optional[int] = None) -> Tuple[List[Row], List[int]]:
    """Reduced row echelon form.

    Only columns ``< pivot_limit`` (default ``ncols``) may hold pivots; this is
    how an augmented right-hand side column is kept out of the pivot search.
    """
    if pivot_limit is None:
        pivot_limit = ncols
    work = [dict(r) for r in rows if r]
    done: List[Row] = []
    pivots: List[int] = []
    for col in range(pivot_limit):
        cands = [i for i, r in enumerate(work) if col in r]
        if not cands:
            continue
        prow = work.pop(_pick(cands, work, col))
        inv_p = prow[col]
        prow = {j: v / inv_p for j, v in prow.items()}
        for r in work + done:
            f = r.get(col)
            if f is None:
                continue
            for j, v in prow.items():
                nv = r[j] - f * v if j in r else -(f * v)
                if nv:
                    r[j] = nv
                else:
                    r.pop(j, None)
        work = [r for r in work if r]
        done.append(prow)
        pivots.append(col)
    # rows left in ``work`` only touch non-pivot columns (e.g. the rhs)
    done.extend(r for r in work if r)
    return done, pivots


def rank(rows: Sequence[Row], ncols: int) -> int:
    _, piv = rref(rows, ncols)
    return len(piv)


def nullspace(rows: Sequence[Row], ncols: int, one=Fraction(1)) -> List[Row]:
    red, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for fcol in free:
        vec: Row = {fcol: one}
        for prow, pcol in zip(red, piv):
            v = prow.get(fcol)
            if v:
                vec[pcol] = -v
        basis.append(vec)
    return basis


def solve(rows: Sequence[Row], rhs: Sequence, ncols: int, require_unique: bool = True) -> List:
    """Solve ``A x = b`` exactly; ``rows`` are the rows of A.

    Raises InconsistentSystem or, if ``require_unique``, UnderdeterminedSystem.
    Free variables are set to zero otherwise.
    """
    aug = []
    for r, b in zip(rows, rhs):
        row = dict(r)
        if b:
            row[ncols] = b
        aug.append(row)
    red, piv = rref(aug, ncols + 1, pivot_limit=ncols)
    for prow in red[len(piv):]:
        if prow:
            raise InconsistentSystem("system has no solution")
    if require_unique and len(piv) < ncols:
        raise UnderdeterminedSystem(f"solution space has dimension {ncols - len(piv)}")
    sol: List = [None] * ncols
    for prow, pcol in zip(red, piv):
        sol[pcol] = prow.get(ncols)
    return sol


def solve_scalar(matrix: Sequence[Sequence], rhs: Sequence, require_unique: bool = True) -> List[ExactScalar]:
    """Exact solve for ExactScalar matrices; the solution must be Laurent polynomial."""
    ncols = len(matrix[0]) if matrix else 0
    rows = to_ratfunc_rows(matrix)
    b = [RatFunc(as_scalar(v)) if as_scalar(v) else None for v in rhs]
    sol = solve(rows, b, ncols, require_unique=require_unique)
    return [as_scalar(0) if v is None else v.to_scalar() for v in sol]


def rank_scalar(matrix: Sequence[Sequence]) -> int:
    """Exact rank over Q(i)(pi)."""
    ncols = max((len(r) for r in matrix), default=0)
    return rank(to_ratfunc_rows(matrix), ncols)


def rational_rows(matrix: Sequence[Sequence[int]]) -> List[Row]:
    return [{j: Fraction(v) for j, v in enumerate(r) if v} for r in matrix]


def map_rows(rows: Sequence[Row], fn: Callable) -> List[Row]:
    return [{j: fn(v) for j, v in r.items()} for r in rows]
