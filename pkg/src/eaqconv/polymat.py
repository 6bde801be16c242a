"""Matrices over binary rational functions with Smith normal form machinery.

A PolyMatrix is a dense grid of RationalPoly entries.  Smith reduction works
on matrices whose entries are Laurent polynomials (denominator 1); rational
matrices must have their denominators cleared row by row first.

The Smith engine is deliberately deterministic: among nonzero entries of the
working block it always pivots on the one with minimal (deg - del), ties
broken row-major, and divides with the common-shift polynomial division from
the poly module.  Every elementary operation is pushed through caller hooks,
which lets the code construction replay column operations as circuit gates.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatch, PolyParseError
from .poly import (
    divmod_width,
    LaurentPoly,
    RationalPoly,
    divides,
    divmod_shifted,
    format_rational,
    parse_rational,
)

_RZERO = RationalPoly.zero()
_RONE = RationalPoly.one()


class PolyMatrix:
    """A rows x cols grid of RationalPoly entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries, cols: int | None = None):
        grid = tuple(tuple(RationalPoly.of(e) for e in row) for row in entries)
        rows = len(grid)
        if rows:
            cols = len(grid[0])
        elif cols is None:
            cols = 0
        if any(len(r) != cols for r in grid):
            raise DimensionMismatch("ragged rows")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", grid)

    def __setattr__(self, name, value):
        raise AttributeError("PolyMatrix is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, rows: int, cols: int) -> PolyMatrix:
        return cls([[_RZERO] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, n: int) -> PolyMatrix:
        return cls([[_RONE if i == j else _RZERO for j in range(n)] for i in range(n)])

    @classmethod
    def from_rows(cls, rows) -> PolyMatrix:
        return cls(rows)

    def to_lists(self) -> list[list[RationalPoly]]:
        return [list(row) for row in self.entries]

    # -- basic structure ---------------------------------------------------

    def __getitem__(self, ij) -> RationalPoly:
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyMatrix) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def is_polynomial(self) -> bool:
        return all(e.is_polynomial() for row in self.entries for e in row)

    def submatrix(self, rows, cols) -> PolyMatrix:
        return PolyMatrix([[self.entries[i][j] for j in cols] for i in rows], cols=len(list(cols)))

    def hstack(self, other: PolyMatrix) -> PolyMatrix:
        if self.rows != other.rows:
            raise DimensionMismatch("row counts differ")
        return PolyMatrix([list(a) + list(b) for a, b in zip(self.entries, other.entries)])

    def vstack(self, other: PolyMatrix) -> PolyMatrix:
        if self.cols != other.cols:
            raise DimensionMismatch("column counts differ")
        return PolyMatrix(list(self.entries) + list(other.entries))

    def __add__(self, other: PolyMatrix) -> PolyMatrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("shape mismatch in addition")
        return PolyMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)]
        )

    def __mul__(self, other: PolyMatrix) -> PolyMatrix:
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = _RZERO
                for t in range(self.cols):
                    acc = acc + self.entries[i][t] * other.entries[t][j]
                row.append(acc)
            out.append(row)
        return PolyMatrix(out)

    def scale(self, f: RationalPoly) -> PolyMatrix:
        return PolyMatrix([[e * f for e in row] for row in self.entries])

    def transpose(self) -> PolyMatrix:
        return PolyMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def reverse(self) -> PolyMatrix:
        """Substitute D^-1 for D entrywise."""
        return PolyMatrix([[e.reverse() for e in row] for row in self.entries])

    def transpose_reverse(self) -> PolyMatrix:
        """Transpose, then substitute D^-1 entrywise; an involution."""
        return self.transpose().reverse()

    def __repr__(self) -> str:
        return f"PolyMatrix({format_matrix(self)!r})"


def mul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    return a * b


def transpose_reverse(m: PolyMatrix) -> PolyMatrix:
    return m.transpose_reverse()


# -- elementary operations ---------------------------------------------------


@dataclass(frozen=True)
class RowAdd:
    """Type-1 row op: row dst += f * row src, f a Laurent polynomial."""

    src: int
    dst: int
    f: LaurentPoly


@dataclass(frozen=True)
class RowScale:
    """Type-2 row op: multiply a row by D^k."""

    row: int
    k: int


@dataclass(frozen=True)
class RowScalePoly:
    """Type-3 row op: multiply a row by an arbitrary nonzero polynomial.

    Only legitimate when the receiver reduces generators before measurement.
    """

    measurement_stage_only = True

    row: int
    f: LaurentPoly


@dataclass(frozen=True)
class RowSwap:
    i: int
    j: int


@dataclass(frozen=True)
class ColAdd:
    """Type-1 column op: col dst += f * col src."""

    src: int
    dst: int
    f: LaurentPoly


@dataclass(frozen=True)
class ColScale:
    """Type-2 column op: multiply a column by D^k (delay the qubit k frames)."""

    col: int
    k: int


@dataclass(frozen=True)
class ColSwap:
    i: int
    j: int


def _check_index(n, *idx):
    for i in idx:
        if not 0 <= i < n:
            raise IndexError(f"index {i} out of range for size {n}")


def apply_row_op(m: PolyMatrix, op) -> PolyMatrix:
    rows = m.to_lists()
    if isinstance(op, RowAdd):
        _check_index(m.rows, op.src, op.dst)
        f = RationalPoly(op.f)
        rows[op.dst] = [a + f * b for a, b in zip(rows[op.dst], rows[op.src])]
    elif isinstance(op, RowScale):
        _check_index(m.rows, op.row)
        f = RationalPoly(LaurentPoly.term(op.k))
        rows[op.row] = [f * a for a in rows[op.row]]
    elif isinstance(op, RowScalePoly):
        _check_index(m.rows, op.row)
        if op.f.is_zero():
            raise ValueError("zero multiplier in row scaling")
        f = RationalPoly(op.f)
        rows[op.row] = [f * a for a in rows[op.row]]
    elif isinstance(op, RowSwap):
        _check_index(m.rows, op.i, op.j)
        rows[op.i], rows[op.j] = rows[op.j], rows[op.i]
    else:
        raise TypeError(f"not a row operation: {op!r}")
    return PolyMatrix(rows)


def apply_col_op(m: PolyMatrix, op) -> PolyMatrix:
    rows = m.to_lists()
    if isinstance(op, ColAdd):
        _check_index(m.cols, op.src, op.dst)
        f = RationalPoly(op.f)
        for r in rows:
            r[op.dst] = r[op.dst] + f * r[op.src]
    elif isinstance(op, ColScale):
        _check_index(m.cols, op.col)
        f = RationalPoly(LaurentPoly.term(op.k))
        for r in rows:
            r[op.col] = f * r[op.col]
    elif isinstance(op, ColSwap):
        _check_index(m.cols, op.i, op.j)
        for r in rows:
            r[op.i], r[op.j] = r[op.j], r[op.i]
    else:
        raise TypeError(f"not a column operation: {op!r}")
    return PolyMatrix(rows)


# -- Smith normal form -------------------------------------------------------

_SMITH_CAP = 100_000


class SmithHooks:
    """Receives every elementary operation the Smith engine performs.

    Subclasses own the matrix state; the engine only reads entries through
    `entry` and decides which operation comes next.
    """

    def entry(self, i: int, j: int) -> LaurentPoly:
        raise NotImplementedError

    def row_add(self, src: int, dst: int, f: LaurentPoly):
        raise NotImplementedError

    def row_swap(self, i: int, j: int):
        raise NotImplementedError

    def col_add(self, src: int, dst: int, f: LaurentPoly):
        raise NotImplementedError

    def col_swap(self, i: int, j: int):
        raise NotImplementedError


class SmithEngine:
    """Drives a matrix to diagonal form through SmithHooks callbacks."""

    def __init__(self, shape: tuple[int, int], hooks: SmithHooks, enforce_chain: bool = True):
        self.rows, self.cols = shape
        self.hooks = hooks
        self.enforce_chain = enforce_chain
        self._budget = _SMITH_CAP

    def _tick(self):
        self._budget -= 1
        if self._budget <= 0:
            raise RuntimeError("Smith reduction exceeded its operation budget")

    def _pick_pivot(self, t):
        best = None
        for i in range(t, self.rows):
            for j in range(t, self.cols):
                e = self.hooks.entry(i, j)
                if e.is_zero():
                    continue
                key = (e.width, i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
        return (best[1], best[2]) if best else None

    def _snapshot(self, t):
        return tuple(
            (self.hooks.entry(i, j).bits, self.hooks.entry(i, j).low)
            for i in range(t, self.rows)
            for j in range(t, self.cols)
        )

    def _quotient(self, e, pivot, wide):
        """Reduction quotient for e against pivot; zero means 'flip roles'."""
        if wide:
            return divmod_width(e, pivot)[0]
        return divmod_shifted(e, pivot)[0]

    def _stage(self, t):
        """Diagonalize position t; returns False when the block is all zero.

        Plain common-shift division is tried first (it yields the gate
        sequences the worked constructions print); if the chase ever revisits
        a state it switches to width-reducing Laurent division, for which
        (deg - del) is a strictly decreasing Euclidean measure.
        """
        h = self.hooks
        seen = set()
        wide = False
        while True:
            self._tick()
            if not wide:
                snap = self._snapshot(t)
                if snap in seen:
                    wide = True
                seen.add(snap)
            pos = self._pick_pivot(t)
            if pos is None:
                return False
            pi, pj = pos
            # one operation per pass: reductions may shrink (or zero) the
            # pivot itself, so re-pick after every op
            dirty = False
            for j in range(t, self.cols):
                if j == pj:
                    continue
                e = h.entry(pi, j)
                if e.is_zero():
                    continue
                q = self._quotient(e, h.entry(pi, pj), wide)
                if q.is_zero():
                    # the pivot cannot reduce e in the common frame; shrink the pivot instead
                    q2 = self._quotient(h.entry(pi, pj), e, wide)
                    h.col_add(j, pj, q2)
                else:
                    h.col_add(pj, j, q)
                dirty = True
                break
            if dirty:
                continue
            for i in range(t, self.rows):
                if i == pi:
                    continue
                e = h.entry(i, pj)
                if e.is_zero():
                    continue
                q = self._quotient(e, h.entry(pi, pj), wide)
                if q.is_zero():
                    q2 = self._quotient(h.entry(pi, pj), e, wide)
                    h.row_add(i, pi, q2)
                else:
                    h.row_add(pi, i, q)
                dirty = True
                break
            if dirty:
                continue
            if pi != t:
                h.row_swap(t, pi)
            if pj != t:
                h.col_swap(t, pj)
            return True

    def run(self) -> int:
        rank = 0
        for t in range(min(self.rows, self.cols)):
            if not self._stage(t):
                break
            rank += 1
        if self.enforce_chain:
            self._fix_chain(rank)
        return rank

    def _fix_chain(self, rank):
        h = self.hooks
        i = 0
        while i < rank - 1:
            self._tick()
            a = h.entry(i, i)
            b = h.entry(i + 1, i + 1)
            if divides(a, b):
                i += 1
                continue
            # pull the successor into row i and re-diagonalize from there
            h.row_add(i + 1, i, LaurentPoly.one())
            for t in range(i, rank):
                self._stage(t)
            i = 0


class _MatrixHooks(SmithHooks):
    """Smith hooks over plain grids, accumulating unimodular witnesses."""

    def __init__(self, m: PolyMatrix):
        self.w = [[e.as_poly() for e in row] for row in m.entries]
        self.a = [[LaurentPoly.one() if i == j else LaurentPoly.zero() for j in range(m.rows)] for i in range(m.rows)]
        self.b = [[LaurentPoly.one() if i == j else LaurentPoly.zero() for j in range(m.cols)] for i in range(m.cols)]
        self.log = []

    def entry(self, i, j):
        return self.w[i][j]

    def row_add(self, src, dst, f):
        self.log.append(RowAdd(src, dst, f))
        self.w[dst] = [a + f * b for a, b in zip(self.w[dst], self.w[src])]
        for r in self.a:  # A := A * T^-1, i.e. A col src += f * A col dst
            r[src] = r[src] + f * r[dst]

    def row_swap(self, i, j):
        self.log.append(RowSwap(i, j))
        self.w[i], self.w[j] = self.w[j], self.w[i]
        for r in self.a:
            r[i], r[j] = r[j], r[i]

    def col_add(self, src, dst, f):
        self.log.append(ColAdd(src, dst, f))
        for r in self.w:
            r[dst] = r[dst] + f * r[src]
        self.b[src] = [a + f * b for a, b in zip(self.b[src], self.b[dst])]

    def col_swap(self, i, j):
        self.log.append(ColSwap(i, j))
        for r in self.w:
            r[i], r[j] = r[j], r[i]
        self.b[i], self.b[j] = self.b[j], self.b[i]

    def scale_a_col(self, i, k):
        for r in self.a:
            r[i] = r[i].shift(k)


@dataclass(frozen=True)
class SmithDecomposition:
    """M = A * diag(D^unit_exps[i] * gamma[i]) * B with unimodular A, B.

    gamma entries are normalized delay-free (del = 0); the pure-delay units
    are reported separately so 'power of D' reads as 'gamma[i] == 1'.
    """

    a: PolyMatrix
    gamma: tuple[LaurentPoly, ...]
    unit_exps: tuple[int, ...]
    b: PolyMatrix
    op_log: tuple

    @property
    def rank(self) -> int:
        return len(self.gamma)

    def diag_extended(self, rows: int, cols: int) -> PolyMatrix:
        """Normalized factors on the diagonal; the pure-delay units live in A."""
        grid = [[_RZERO] * cols for _ in range(rows)]
        for i, g in enumerate(self.gamma):
            grid[i][i] = RationalPoly(g)
        return PolyMatrix(grid)

    def reconstruct(self, rows: int, cols: int) -> PolyMatrix:
        return self.a * self.diag_extended(rows, cols) * self.b


def smith_form(m: PolyMatrix) -> SmithDecomposition:
    """Smith normal form over GF(2)[D] with Laurent units.

    Rejects matrices with true rational entries; callers clear denominators
    first (row scalings do not change the invariant factors' delay-free parts).
    """
    if not m.is_polynomial():
        raise ValueError("smith_form requires Laurent polynomial entries; clear denominators first")
    hooks = _MatrixHooks(m)
    rank = SmithEngine((m.rows, m.cols), hooks).run()
    gamma = []
    units = []
    for i in range(rank):
        df, k = hooks.w[i][i].delay_free()
        gamma.append(df)
        units.append(k)
        hooks.scale_a_col(i, k)  # fold the unit into A so gamma stays delay-free
    return SmithDecomposition(
        a=PolyMatrix(hooks.a),
        gamma=tuple(gamma),
        unit_exps=tuple(units),
        b=PolyMatrix(hooks.b),
        op_log=tuple(hooks.log),
    )


# -- rank and row spaces over GF(2)(D) ---------------------------------------


def rref(m: PolyMatrix) -> tuple[PolyMatrix, tuple[int, ...]]:
    """Reduced row echelon form over the rational function field GF(2)(D)."""
    rows = m.to_lists()
    pivots = []
    r = 0
    for c in range(m.cols):
        pivot_row = next((i for i in range(r, m.rows) if not rows[i][c].is_zero()), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [e * inv for e in rows[r]]
        for i in range(m.rows):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [a + f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m.rows:
            break
    return PolyMatrix(rows), tuple(pivots)


def rank(m: PolyMatrix) -> int:
    """Rank over GF(2)(D); equals the number of nonzero invariant factors."""
    return len(rref(m)[1])


def row_space_equal(a: PolyMatrix, b: PolyMatrix) -> bool:
    """Whether two matrices span the same row space over GF(2)(D)."""
    if a.cols != b.cols:
        return False
    ra, pa = rref(a)
    rb, pb = rref(b)
    if pa != pb:
        return False
    return all(ra.entries[i] == rb.entries[i] for i in range(len(pa)))


def det(m: PolyMatrix) -> RationalPoly:
    """Determinant by cofactor expansion; intended for small witness checks."""
    if m.rows != m.cols:
        raise DimensionMismatch("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return _RONE
    if n == 1:
        return m[0, 0]
    acc = _RZERO
    rest = list(range(1, n))
    for j in range(n):
        if m[0, j].is_zero():
            continue
        minor = m.submatrix(rest, [c for c in range(n) if c != j])
        acc = acc + m[0, j] * det(minor)
    return acc


# -- text format --------------------------------------------------------------


def format_matrix(m: PolyMatrix) -> str:
    return "\n".join(", ".join(format_rational(e) for e in row) for row in m.entries)


def parse_matrix(text: str) -> PolyMatrix:
    """One row per line, entries comma-separated, '#' starts a comment."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        row = []
        for colno, cell in enumerate(line.split(","), start=1):
            try:
                row.append(parse_rational(cell))
            except PolyParseError as exc:
                raise PolyParseError(f"bad entry {cell.strip()!r}: {exc}", line=lineno, column=colno) from None
        rows.append(row)
    if not rows:
        raise PolyParseError("empty matrix")
    if len({len(r) for r in rows}) != 1:
        raise PolyParseError("rows have differing lengths")
    return PolyMatrix(rows)
