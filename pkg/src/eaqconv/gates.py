"""Shift-invariant Clifford gates acting on quantum check matrices.

Gates are column operations on the paired (Z | X) polynomial matrices.  With
control a, target b and frame delay k:

  CNOT        X col b += D^k  X col a;   Z col a += D^-k Z col b
  Hadamard    swaps Z col a with X col a
  Phase       Z col a += X col a
  CPhase      Z col b += D^k  X col a;   Z col a += D^-k X col b
  CPhaseSelf  Z col a += (D^k + D^-k) X col a
  InfDepth    X col a *= 1/f(D);         Z col a *= f(D^-1)
  InfDepth'   X col a *= 1/f(D^-1);      Z col a *= f(D)    (time-reversed)

Gate qubit indices address the sender's (Alice's) columns; the receiver-side
columns sit to the left of them and only gates flagged full_frame (used by
decoding circuits, where the receiver holds every qubit) may address those.

Infinite-depth operations are realized physically by a sliding window of
CNOTs on one qubit track: the window spans N = deg(f) - del(f) + 1 frames
and one CNOT per nonzero exponent e >= 1 of f feeds window frame N - e into
frame N; applying the window at every frame in turn produces the 1/f(D)
expansion on the X side and f(D^-1) on the Z side.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import DimensionMismatch, PolyParseError
from .poly import LaurentPoly, RationalPoly, format_poly, parse_poly
from .polymat import PolyMatrix

_KINDS = ("CNOT", "H", "P", "CPHASE", "CPHASE_SELF", "INF")


@dataclass(frozen=True)
class Gate:
    kind: str
    i: int
    j: int | None = None
    delay: int = 0
    f: LaurentPoly | None = None
    time_reversed: bool = False
    full_frame: bool = False
    note: str = ""

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind in ("CNOT", "CPHASE"):
            if self.j is None:
                raise ValueError(f"{self.kind} needs a target qubit")
            if self.j == self.i:
                raise ValueError(f"{self.kind} control and target coincide")
        if self.kind == "INF" and (self.f is None or self.f.is_zero()):
            raise ValueError("infinite-depth gate needs a nonzero polynomial")

    def inverse(self) -> Gate:
        """All finite-depth gates are involutions in the binary picture."""
        if self.kind == "INF":
            raise ValueError("infinite-depth operations have no finite-depth inverse")
        return self


def cnot(i: int, j: int, delay: int = 0, **kw) -> Gate:
    return Gate("CNOT", i, j, delay, **kw)


def hadamard(i: int, **kw) -> Gate:
    return Gate("H", i, **kw)


def phase(i: int, **kw) -> Gate:
    return Gate("P", i, **kw)


def cphase(i: int, j: int, delay: int = 0, **kw) -> Gate:
    return Gate("CPHASE", i, j, delay, **kw)


def cphase_self(i: int, delay: int = 0, **kw) -> Gate:
    return Gate("CPHASE_SELF", i, delay=delay, **kw)


def inf_depth(i: int, f: LaurentPoly, time_reversed: bool = False, **kw) -> Gate:
    return Gate("INF", i, f=f, time_reversed=time_reversed, **kw)


def swap(i: int, j: int, **kw) -> list[Gate]:
    """SWAP expressed as three delay-0 CNOTs."""
    return [cnot(i, j, 0, **kw), cnot(j, i, 0, **kw), cnot(i, j, 0, **kw)]


# -- quantum check matrices ---------------------------------------------------


@dataclass(frozen=True)
class QuantumCheckMatrix:
    """Paired (Z | X) matrices over rational functions with a column split.

    The leftmost bob_cols columns belong to the receiver (ebit halves); the
    remaining columns are the sender's.  `info` carries the parallel
    logical-operator matrix with the same column layout.
    """

    z: PolyMatrix
    x: PolyMatrix
    bob_cols: int = 0
    row_labels: tuple[str, ...] = ()
    info: QuantumCheckMatrix | None = None

    def __post_init__(self):
        if (self.z.rows, self.z.cols) != (self.x.rows, self.x.cols):
            raise DimensionMismatch("Z and X halves differ in shape")
        if not 0 <= self.bob_cols <= self.z.cols:
            raise DimensionMismatch("bob_cols out of range")
        if self.row_labels and len(self.row_labels) != self.z.rows:
            raise DimensionMismatch("one label per row")
        if self.info is not None and (self.info.z.cols != self.z.cols or self.info.bob_cols != self.bob_cols):
            raise DimensionMismatch("info matrix must share the column layout")

    @property
    def rows(self) -> int:
        return self.z.rows

    @property
    def cols(self) -> int:
        return self.z.cols

    @property
    def alice_cols(self) -> int:
        return self.cols - self.bob_cols

    def row(self, i: int):
        from .pauli import CheckRow

        return CheckRow(self.z.entries[i], self.x.entries[i])

    def symplectic_gram(self) -> PolyMatrix:
        """All pairwise shifted symplectic products, over every column."""
        from .pauli import shifted_symplectic

        rows = [self.row(i) for i in range(self.rows)]
        return PolyMatrix([[shifted_symplectic(a, b) for b in rows] for a in rows]) if rows else PolyMatrix.zero(0, 0)

    def is_commuting(self) -> bool:
        return all(e.is_zero() for row in self.symplectic_gram().entries for e in row)

    def alice_part(self) -> QuantumCheckMatrix:
        cols = range(self.bob_cols, self.cols)
        return QuantumCheckMatrix(
            self.z.submatrix(range(self.rows), cols),
            self.x.submatrix(range(self.rows), cols),
            bob_cols=0,
            row_labels=self.row_labels,
        )

    def zx_concat(self) -> PolyMatrix:
        """The rows as vectors over 2*cols columns (Z half then X half)."""
        return self.z.hstack(self.x)

    def is_polynomial(self) -> bool:
        return self.z.is_polynomial() and self.x.is_polynomial()


def apply_gate(qcm: QuantumCheckMatrix, g: Gate) -> QuantumCheckMatrix:
    """Exact column-operation semantics on the stabilizer and info matrices."""

    def resolve(idx):
        if g.full_frame:
            if not 0 <= idx < qcm.cols:
                raise IndexError(f"gate qubit {idx} outside the frame")
            return idx
        if not 0 <= idx < qcm.alice_cols:
            raise IndexError(f"gate addressed outside the sender's qubits (index {idx})")
        return qcm.bob_cols + idx

    a = resolve(g.i)
    b = resolve(g.j) if g.j is not None else None

    def act(m: QuantumCheckMatrix) -> QuantumCheckMatrix:
        z = m.z.to_lists()
        x = m.x.to_lists()
        if g.kind == "CNOT":
            dk = RationalPoly(LaurentPoly.term(g.delay))
            dki = RationalPoly(LaurentPoly.term(-g.delay))
            for r in range(m.rows):
                x[r][b] = x[r][b] + dk * x[r][a]
                z[r][a] = z[r][a] + dki * z[r][b]
        elif g.kind == "H":
            for r in range(m.rows):
                z[r][a], x[r][a] = x[r][a], z[r][a]
        elif g.kind == "P":
            for r in range(m.rows):
                z[r][a] = z[r][a] + x[r][a]
        elif g.kind == "CPHASE":
            dk = RationalPoly(LaurentPoly.term(g.delay))
            dki = RationalPoly(LaurentPoly.term(-g.delay))
            for r in range(m.rows):
                zb = z[r][b] + dk * x[r][a]
                za = z[r][a] + dki * x[r][b]
                z[r][a], z[r][b] = za, zb
        elif g.kind == "CPHASE_SELF":
            w = RationalPoly(LaurentPoly.term(g.delay) + LaurentPoly.term(-g.delay))
            for r in range(m.rows):
                z[r][a] = z[r][a] + w * x[r][a]
        elif g.kind == "INF":
            fwd = g.f.reverse() if g.time_reversed else g.f
            xmul = RationalPoly(LaurentPoly.one(), fwd)
            zmul = RationalPoly(fwd.reverse())
            for r in range(m.rows):
                x[r][a] = x[r][a] * xmul
                z[r][a] = z[r][a] * zmul
        else:  # pragma: no cover
            raise ValueError(g.kind)
        return replace(m, z=PolyMatrix(z, cols=m.cols), x=PolyMatrix(x, cols=m.cols))

    out = act(qcm)
    if qcm.info is not None:
        out = replace(out, info=act(qcm.info))
    return out


# -- circuits -------------------------------------------------------------------


@dataclass(frozen=True)
class Circuit:
    gates: tuple[Gate, ...] = ()
    direction: str = "encode"
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def is_finite_depth(self) -> bool:
        return all(g.kind != "INF" for g in self.gates)

    def inverse(self) -> Circuit:
        if not self.is_finite_depth():
            raise ValueError("cannot invert a circuit with infinite-depth operations")
        return Circuit(tuple(g.inverse() for g in reversed(self.gates)), direction="decode")

    def apply(self, qcm: QuantumCheckMatrix) -> QuantumCheckMatrix:
        for g in self.gates:
            qcm = apply_gate(qcm, g)
        return qcm


def column_poly_to_cnots(f: LaurentPoly, i: int, j: int, **kw) -> list[Gate]:
    """One CNOT(i -> j, delay e) per term D^e of f; equals the column op X_j += f X_i."""
    if f.is_zero():
        raise ValueError("zero polynomial has no CNOT realization")
    return [cnot(i, j, e, **kw) for e in f.exponents()]


def format_gate(g: Gate) -> str:
    star = "*" if g.full_frame else ""
    if g.kind == "CNOT":
        return f"CNOT {star}{g.i + 1} {star}{g.j + 1} delay={g.delay}"
    if g.kind == "H":
        return f"H {star}{g.i + 1}"
    if g.kind == "P":
        return f"P {star}{g.i + 1}"
    if g.kind == "CPHASE":
        return f"CPHASE {star}{g.i + 1} {star}{g.j + 1} delay={g.delay}"
    if g.kind == "CPHASE_SELF":
        return f"CPHASE_SELF {star}{g.i + 1} delay={g.delay}"
    rev = " reversed" if g.time_reversed else ""
    return f"INF {star}{g.i + 1} f={format_poly(g.f)}{rev}"


def format_circuit(c: Circuit) -> str:
    return "\n".join(format_gate(g) for g in c.gates)


def _parse_qubit(tok: str) -> tuple[int, bool]:
    full = tok.startswith("*")
    if full:
        tok = tok[1:]
    try:
        idx = int(tok) - 1
    except ValueError:
        raise PolyParseError(f"bad qubit index {tok!r}") from None
    if idx < 0:
        raise PolyParseError(f"qubit indices are 1-based, got {tok!r}")
    return idx, full


def parse_gate(line: str) -> Gate:
    toks = line.split()
    if not toks:
        raise PolyParseError("empty gate line")
    kind = toks[0].upper()
    if kind in ("CNOT", "CPHASE"):
        if len(toks) not in (3, 4):
            raise PolyParseError(f"bad {kind} line {line!r}")
        i, fi = _parse_qubit(toks[1])
        j, fj = _parse_qubit(toks[2])
        delay = 0
        if len(toks) == 4:
            if not toks[3].startswith("delay="):
                raise PolyParseError(f"bad delay in {line!r}")
            delay = int(toks[3][6:])
        return Gate(kind, i, j, delay, full_frame=fi or fj)
    if kind in ("H", "P"):
        if len(toks) != 2:
            raise PolyParseError(f"bad {kind} line {line!r}")
        i, fi = _parse_qubit(toks[1])
        return Gate(kind, i, full_frame=fi)
    if kind == "CPHASE_SELF":
        i, fi = _parse_qubit(toks[1])
        delay = int(toks[2][6:]) if len(toks) > 2 else 0
        return Gate(kind, i, delay=delay, full_frame=fi)
    if kind == "INF":
        if len(toks) < 3 or not toks[2].startswith("f="):
            raise PolyParseError(f"bad INF line {line!r}")
        i, fi = _parse_qubit(toks[1])
        f = parse_poly(toks[2][2:])
        rev = len(toks) > 3 and toks[3] == "reversed"
        return Gate(kind, i, f=f, time_reversed=rev, full_frame=fi)
    raise PolyParseError(f"unknown gate {toks[0]!r}")


def parse_circuit(text: str, direction: str = "encode") -> Circuit:
    gates = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            gates.append(parse_gate(line))
    return Circuit(tuple(gates), direction=direction)


# -- infinite-depth synthesis ----------------------------------------------------


@dataclass(frozen=True)
class SlidingWindowRule:
    """The per-frame CNOT block realizing an infinite-depth operation.

    cnot_pattern entries are 1-based frame positions inside the N-frame
    window; scratch_frames is the head shift applied to the track before the
    window starts sliding (positive delays, negative advances).
    """

    window: int
    cnot_pattern: tuple[tuple[int, int], ...]
    scratch_frames: int = 0

    def __post_init__(self):
        for a, b in self.cnot_pattern:
            if not (1 <= a <= self.window and 1 <= b <= self.window):
                raise ValueError("pattern outside the window")


def _base_rule(f0: LaurentPoly, scratch: int) -> SlidingWindowRule:
    n = f0.width + 1
    pattern = tuple(sorted((n - e, n) for e in f0.exponents() if e >= 1))
    return SlidingWindowRule(window=n, cnot_pattern=pattern, scratch_frames=scratch)


def synthesize_infinite_depth(f: LaurentPoly) -> SlidingWindowRule:
    """Sliding-window CNOTs that multiply a track's X side by 1/f(D).

    The minimal-support solution: one CNOT per nonzero exponent e >= 1 of the
    delay-free part, feeding window frame N - e into frame N.  Larger CNOT
    sets realize the same transformation; this one is the canonical choice.
    """
    if f.is_zero():
        raise ValueError("cannot invert the zero polynomial")
    f0, d = f.delay_free()
    return _base_rule(f0, scratch=-d)


def time_reversed_rule(f: LaurentPoly) -> SlidingWindowRule:
    """Sliding-window CNOTs for 1/f(D^-1): delay by m = deg - del, then run
    the rule of the reversal polynomial D^m f(D^-1)."""
    if f.is_zero():
        raise ValueError("cannot invert the zero polynomial")
    f0, d = f.delay_free()
    m = f0.width
    g = f0.reverse().shift(m)  # the reversal polynomial, delay-free by construction
    return _base_rule(g, scratch=m + d)
