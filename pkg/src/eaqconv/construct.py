"""Construction of CSS entanglement-assisted quantum convolutional codes.

Input: two classical binary convolutional check matrices H1 ((n-k1) x n) and
H2 ((n-k2) x n) for noncatastrophic, delay-free encoders.  Output: an
[[n, k1+k2-n+c; c]] code with c = rank(H1(D) H2^T(D^-1)), its encoding and
decoding circuits, and the final stabilizer over c receiver columns plus n
sender columns.

The pipeline reduces the stacked quantum check matrix

    [ H1 | 0  ]
    [ 0  | H2 ]

to a standard form by mental row operations and recorded column operations
(gates).  The recorded gates, replayed in reverse on a bare stream of ebits,
ancillas and information qubits, form the encoder.  Codes split into classes
by the invariant factors of H1(D) H2^T(D^-1):

  class 1          all factors are powers of D; encoder and decoder are
                   finite depth.
  class 2          otherwise: the encoder needs one infinite-depth operation
                   per non-unit factor; the decoder stays finite depth.
  class 2 special  the cross block F(D) reduces to a full-row-rank matrix of
                   powers of D; the affected information qubits teleport to
                   fresh columns during decoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    CatastrophicInput,
    ClassMismatch,
    NotDelayFree,
    RankDeficient,
    ValidationError,
)
from .gates import (
    Circuit,
    Gate,
    QuantumCheckMatrix,
    apply_gate,
    cnot,
    format_gate,
    hadamard,
    inf_depth,
    swap,
)
from .poly import LaurentPoly, RationalPoly, divmod_shifted, gcd
from .polymat import PolyMatrix, SmithEngine, SmithHooks, smith_form

CLASS1 = "class1"
CLASS2 = "class2"
CLASS2_SPECIAL = "class2_special"

_R0 = RationalPoly.zero()
_R1 = RationalPoly.one()
_L1 = LaurentPoly.one()


# -- validation ---------------------------------------------------------------


def validate_inputs(h1: PolyMatrix, h2: PolyMatrix) -> tuple[PolyMatrix, PolyMatrix]:
    """Admit a pair of check matrices for noncatastrophic delay-free encoders."""
    if h1.cols != h2.cols:
        raise ValidationError(f"column counts differ: {h1.cols} vs {h2.cols}")
    for which, h in (("H1", h1), ("H2", h2)):
        if h.rows == 0 or h.rows >= h.cols:
            raise ValidationError(f"{which} must have 1 <= rows < cols, got {h.rows}x{h.cols}")
        if not h.is_polynomial():
            raise ValidationError(f"{which} has rational entries")
        for row in h.entries:
            for e in row:
                if not e.is_zero() and e.num.dell < 0:
                    raise NotDelayFree(which, e.num)
        s = smith_form(h)
        if s.rank < h.rows:
            raise RankDeficient(which, s.rank, h.rows)
        for g, k in zip(s.gamma, s.unit_exps):
            if g != _L1:
                raise CatastrophicInput(which, g.shift(k))
            if k != 0:
                raise NotDelayFree(which, g.shift(k))
    return h1, h2


def _product_factors(product: PolyMatrix):
    """Normalized invariant factors of the (Laurent) product matrix."""
    rows = []
    for row in product.entries:
        exps = [e.num.dell for e in row if not e.is_zero()]
        shift = RationalPoly(LaurentPoly.term(-min(exps))) if exps and min(exps) < 0 else _R1
        rows.append([shift * e for e in row])
    s = smith_form(PolyMatrix(rows))
    return list(s.gamma), list(s.unit_exps)


def ebit_count(h1: PolyMatrix, h2: PolyMatrix) -> int:
    """c = rank of H1(D) H2^T(D^-1) over the rational function field."""
    return len(_product_factors(h1 * h2.transpose_reverse())[0])


# -- the working reduction state ------------------------------------------------


@dataclass
class TraceStep:
    label: str
    state: QuantumCheckMatrix


class _Reduction:
    """Mutable quantum check matrix with a gate log and mental row operations."""

    def __init__(self, h1: PolyMatrix, h2: PolyMatrix, want_trace: bool = False):
        self.n = h1.cols
        self.k1 = self.n - h1.rows
        self.k2 = self.n - h2.rows
        top = h1.rows
        self.rows = top + h2.rows
        self.z = [list(r) for r in h1.entries] + [[_R0] * self.n for _ in range(h2.rows)]
        self.x = [[_R0] * self.n for _ in range(top)] + [list(r) for r in h2.entries]
        self.gates: list[Gate] = []
        self.row_op_log: list = []
        self.row_ids = list(range(self.rows))
        self.row_scales: dict[int, int] = {}
        self.want_trace = want_trace
        self.trace: list[TraceStep] = []
        self._snapshot("initial quantum check matrix")

    def state(self) -> QuantumCheckMatrix:
        return QuantumCheckMatrix(PolyMatrix(self.z), PolyMatrix(self.x))

    def _snapshot(self, label):
        if self.want_trace:
            self.trace.append(TraceStep(label, self.state()))

    def gate(self, g: Gate):
        out = apply_gate(self.state(), g)
        self.z = out.z.to_lists()
        self.x = out.x.to_lists()
        self.gates.append(g)
        self._snapshot(format_gate(g))

    def row_add(self, src: int, dst: int, f: LaurentPoly):
        fr = RationalPoly(f)
        self.z[dst] = [a + fr * b for a, b in zip(self.z[dst], self.z[src])]
        self.x[dst] = [a + fr * b for a, b in zip(self.x[dst], self.x[src])]
        self.row_op_log.append(("add", src, dst, f))
        self._snapshot(f"row {dst + 1} += ({f}) * row {src + 1}")

    def row_swap(self, i: int, j: int):
        if i == j:
            return
        self.z[i], self.z[j] = self.z[j], self.z[i]
        self.x[i], self.x[j] = self.x[j], self.x[i]
        self.row_ids[i], self.row_ids[j] = self.row_ids[j], self.row_ids[i]
        self.row_op_log.append(("swap", i, j))
        self._snapshot(f"swap rows {i + 1}, {j + 1}")

    def row_scale(self, pos: int, k: int):
        if k == 0:
            return
        fr = RationalPoly(LaurentPoly.term(k))
        self.z[pos] = [fr * a for a in self.z[pos]]
        self.x[pos] = [fr * a for a in self.x[pos]]
        rid = self.row_ids[pos]
        self.row_scales[rid] = self.row_scales.get(rid, 0) + k
        self.row_op_log.append(("scale", pos, k))
        self._snapshot(f"row {pos + 1} *= D^{k}")

    # column operation helpers realized as gates ------------------------------

    def z_coladd(self, src: int, dst: int, f: LaurentPoly, note: str = ""):
        """Z col dst += f * Z col src via CNOTs (X side: col src += f(D^-1) col dst)."""
        for e in f.exponents():
            self.gate(cnot(dst, src, -e, note=note))

    def x_coladd(self, src: int, dst: int, f: LaurentPoly, note: str = ""):
        for e in f.exponents():
            self.gate(cnot(src, dst, e, note=note))

    def col_swap(self, i: int, j: int, note: str = ""):
        for g in swap(i, j, note=note):
            self.gate(g)


class _ZBlockHooks(SmithHooks):
    """Smith of a Z-side block: column ops become gates, row ops stay mental.

    identity_rows maps a block column to the row position whose X side holds
    that column's identity entry; gate side effects there are undone by row
    operations.  gamma_f_col0, when set, keeps the F block's diagonal at
    (row position p, F column p) intact under row operations by emitting
    compensating column gates.
    """

    def __init__(self, red, row0, col0, identity_rows=None, gamma_f_col0=None, note=""):
        self.red = red
        self.row0 = row0
        self.col0 = col0
        self.identity_rows = identity_rows
        self.gamma_f_col0 = gamma_f_col0
        self.note = note

    def entry(self, i, j):
        return self.red.z[self.row0 + i][self.col0 + j].as_poly()

    def col_add(self, src, dst, f):
        self.red.z_coladd(self.col0 + src, self.col0 + dst, f, note=self.note)
        if self.identity_rows is not None:
            self.red.row_add(self.identity_rows[src], self.identity_rows[dst], f.reverse())

    def col_swap(self, i, j):
        self.red.col_swap(self.col0 + i, self.col0 + j, note=self.note)
        if self.identity_rows is not None:
            self.red.row_swap(self.identity_rows[i], self.identity_rows[j])
            self.identity_rows[i], self.identity_rows[j] = self.identity_rows[j], self.identity_rows[i]

    def _gamma_exp(self, p):
        poly = self.red.z[self.row0 + p][self.gamma_f_col0 + p].as_poly()
        if poly.weight() != 1:
            raise RuntimeError("F-block diagonal lost its power-of-D form")
        return poly.dell

    def row_add(self, src, dst, f):
        self.red.row_add(self.row0 + src, self.row0 + dst, f)
        if self.gamma_f_col0 is not None:
            q = f.shift(self._gamma_exp(src) - self._gamma_exp(dst))
            self.red.z_coladd(self.gamma_f_col0 + dst, self.gamma_f_col0 + src, q, note=self.note)

    def row_swap(self, i, j):
        self.red.row_swap(self.row0 + i, self.row0 + j)
        if self.gamma_f_col0 is not None:
            self.red.col_swap(self.gamma_f_col0 + i, self.gamma_f_col0 + j, note=self.note)


class _XBlockHooks(SmithHooks):
    """Smith of an X-side block: column ops are plain CNOTs, row ops mental."""

    def __init__(self, red, row0, col0, note=""):
        self.red = red
        self.row0 = row0
        self.col0 = col0
        self.note = note

    def entry(self, i, j):
        return self.red.x[self.row0 + i][self.col0 + j].as_poly()

    def col_add(self, src, dst, f):
        self.red.x_coladd(self.col0 + src, self.col0 + dst, f, note=self.note)

    def col_swap(self, i, j):
        self.red.col_swap(self.col0 + i, self.col0 + j, note=self.note)

    def row_add(self, src, dst, f):
        self.red.row_add(self.row0 + src, self.row0 + dst, f)

    def row_swap(self, i, j):
        self.red.row_swap(self.row0 + i, self.row0 + j)


# -- decomposition record ---------------------------------------------------------


@dataclass
class DecompositionRecord:
    h1: PolyMatrix
    h2: PolyMatrix
    n: int
    k1: int
    k2: int
    c: int
    s: int
    class_tag: str
    product_factors: tuple[LaurentPoly, ...]
    product_units: tuple[int, ...]
    e_mat: PolyMatrix
    f_mat: PolyMatrix
    f_massaged: PolyMatrix | None
    blocks: dict = field(default_factory=dict)
    reduction: _Reduction | None = None

    @property
    def k(self) -> int:
        return self.k1 + self.k2 - self.n + self.c

    @property
    def col_op_gates(self) -> tuple:
        return tuple(self.reduction.gates) if self.reduction else ()

    @property
    def row_op_log(self) -> tuple:
        return tuple(self.reduction.row_op_log) if self.reduction else ()

    def block_matrix(self, name: str) -> PolyMatrix:
        """A recorded block as a matrix (diagonal blocks are stored as entry lists)."""
        val = self.blocks[name]
        if isinstance(val, PolyMatrix):
            return val
        size = len(val)
        return PolyMatrix(
            [[RationalPoly(val[i]) if i == j else _R0 for j in range(size)] for i in range(size)],
            cols=size,
        )


def _standard_form_stage(red: _Reduction):
    """Row-reduce the top block, then column-reduce the bottom block to [I 0]."""
    n, k1, k2 = red.n, red.k1, red.k2
    # mental row operations bringing the top block to its Smith row basis
    scratch = smith_form(PolyMatrix([red.z[i] for i in range(n - k1)]))
    for op in scratch.op_log:
        name = type(op).__name__
        if name == "RowAdd":
            red.row_add(op.src, op.dst, op.f)
        elif name == "RowSwap":
            red.row_swap(op.i, op.j)
    # in-place Smith of the bottom block's X side; column ops become gates
    SmithEngine((n - k2, n), _XBlockHooks(red, n - k1, 0, note="standard-form"), enforce_chain=False).run()
    for p in range(n - k2):
        pivot = red.x[n - k1 + p][p].as_poly()
        if pivot.is_zero():
            raise RankDeficient("H2", p, n - k2)
        df, k = pivot.delay_free()
        if df != _L1:
            raise CatastrophicInput("H2", pivot)
        if k != 0:
            red.row_scale(n - k1 + p, -k)
    red._snapshot("standard form")


def _plan_massage(red: _Reduction):
    """Width-reduce F entries against pure E columns, planned on scratch copies."""
    n, k1, k2 = red.n, red.k1, red.k2
    top = n - k1
    work = [[red.z[i][j] for j in range(n)] for i in range(top)]
    plan = []
    changed = True
    while changed:
        changed = False
        for i in range(top):
            for j in range(n - k2, n):
                phi = work[i][j]
                if phi.is_zero():
                    continue
                for m in range(n - k2):
                    pivot = work[i][m]
                    if pivot.is_zero():
                        continue
                    if any(not work[r][m].is_zero() for r in range(top) if r != i):
                        continue  # impure column: the reduction would corrupt other rows
                    q, r = divmod_shifted(phi.as_poly(), pivot.as_poly())
                    if q.is_zero() or (not r.is_zero() and r.width >= phi.as_poly().width):
                        continue
                    plan.append((m, j, q))
                    work[i][j] = RationalPoly(r)
                    changed = True
                    break
    scalings = []
    for i in range(top):
        exps = [e.as_poly().dell for e in work[i] if not e.is_zero()]
        if exps and min(exps) != 0:
            scalings.append((i, -min(exps)))
    return plan, scalings


def _massage(red: _Reduction):
    """Normalize the cross block modulo the E block inside a Hadamard sandwich."""
    plan, scalings = _plan_massage(red)
    if not plan and not scalings:
        return
    for col in range(red.n):
        red.gate(hadamard(col, note="normalize-F"))
    for src, dst, q in plan:
        red.x_coladd(src, dst, q, note="normalize-F")
    for pos, k in scalings:
        red.row_scale(pos, k)
    for col in range(red.n):
        red.gate(hadamard(col, note="normalize-F"))
    red._snapshot("normalized standard form")


def _e_block(red: _Reduction) -> PolyMatrix:
    return PolyMatrix([[red.z[i][j] for j in range(red.n - red.k2)] for i in range(red.n - red.k1)])


def _f_block(red: _Reduction) -> PolyMatrix:
    return PolyMatrix([[red.z[i][j] for j in range(red.n - red.k2, red.n)] for i in range(red.n - red.k1)])


def _special_condition(f: PolyMatrix) -> bool:
    """Full row rank with every invariant factor a power of D."""
    if f.rows == 0 or f.is_zero():
        return False
    gammas, _ = _product_factors(f)
    return len(gammas) == f.rows and all(g == _L1 for g in gammas)


def decompose_general(h1: PolyMatrix, h2: PolyMatrix, want_trace: bool = False) -> DecompositionRecord:
    """Validate, reduce to the standard form, classify, and record everything."""
    validate_inputs(h1, h2)
    n = h1.cols
    k1, k2 = n - h1.rows, n - h2.rows
    gammas, units = _product_factors(h1 * h2.transpose_reverse())
    c = len(gammas)
    s = sum(1 for g in gammas if g == _L1)
    # k = k1+k2-n+c >= 0 always: Sylvester's inequality gives
    # c = rank(H1 H2~) >= (n-k1) + (n-k2) - n

    red = _Reduction(h1, h2, want_trace=want_trace)
    _standard_form_stage(red)
    e_mat = _e_block(red)
    f_mat = _f_block(red)
    f_massaged = None
    if s == c:
        tag = CLASS1
    else:
        _massage(red)
        f_massaged = _f_block(red)
        tag = CLASS2_SPECIAL if _special_condition(f_massaged) else CLASS2

    return DecompositionRecord(
        h1=h1, h2=h2, n=n, k1=k1, k2=k2, c=c, s=s, class_tag=tag,
        product_factors=tuple(gammas), product_units=tuple(units),
        e_mat=e_mat, f_mat=f_mat, f_massaged=f_massaged, reduction=red,
    )


def classify(h1: PolyMatrix, h2: PolyMatrix, want_trace: bool = False):
    record = decompose_general(h1, h2, want_trace=want_trace)
    return record.class_tag, record


# -- code specification ------------------------------------------------------------


@dataclass(frozen=True)
class Rates:
    entanglement_assisted: Fraction
    tradeoff: tuple[Fraction, Fraction]
    catalytic: Fraction


@dataclass
class CodeSpec:
    n: int
    k: int
    c: int
    s: int
    class_tag: str
    encoder: Circuit
    decoder: Circuit
    bare: QuantumCheckMatrix
    final_stabilizer: QuantumCheckMatrix
    measurable_stabilizer: QuantumCheckMatrix
    measurement_multipliers: tuple[LaurentPoly, ...]
    rates: Rates
    record: DecompositionRecord
    logical_cols: tuple[int, ...]
    decoded_cols: tuple[int, ...]
    decoded_offsets: tuple
    decoded_state: QuantumCheckMatrix
    encode_trace: list = field(default_factory=list)
    decode_trace: list = field(default_factory=list)

    @property
    def h1(self) -> PolyMatrix:
        return self.record.h1

    @property
    def h2(self) -> PolyMatrix:
        return self.record.h2


def code_params(spec: CodeSpec) -> dict:
    """The [[n, k; c]] parameters and the three rate interpretations."""
    return {
        "n": spec.n,
        "k": spec.k,
        "c": spec.c,
        "s": spec.s,
        "class": spec.class_tag,
        "entanglement_assisted_rate": spec.rates.entanglement_assisted,
        "tradeoff_rate": spec.rates.tradeoff,
        "catalytic_rate": spec.rates.catalytic,
    }


def _rates(n, k, c) -> Rates:
    return Rates(Fraction(k, n), (Fraction(k, n), Fraction(c, n)), Fraction(k - c, n))


def _bare_state(n, c, ebit_cols, anc_a, anc_b, logical_cols):
    """The unencoded stream: row order [Z-ebits, |0> ancillas A, X-ebits, |0> ancillas B].

    ebit_cols[b] is the sender column entangled with receiver column b;
    logical_cols carry one X/Z logical pair each.
    """
    total = c + n
    rows, labels = [], []

    def empty():
        return [_R0] * total

    for b, col in enumerate(ebit_cols):
        z = empty()
        z[b] = _R1
        z[c + col] = _R1
        rows.append((z, empty()))
        labels.append(f"ebit-Z{b + 1}")
    for j, col in enumerate(anc_a):
        z = empty()
        z[c + col] = _R1
        rows.append((z, empty()))
        labels.append(f"ancilla{j + 1}")
    for b, col in enumerate(ebit_cols):
        x = empty()
        x[b] = _R1
        x[c + col] = _R1
        rows.append((empty(), x))
        labels.append(f"ebit-X{b + 1}")
    for j, col in enumerate(anc_b):
        z = empty()
        z[c + col] = _R1
        rows.append((z, empty()))
        labels.append(f"ancilla{len(anc_a) + j + 1}")

    info_rows, info_labels = [], []
    for q, col in enumerate(logical_cols):
        x = empty()
        x[c + col] = _R1
        info_rows.append((empty(), x))
        info_labels.append(f"X{q + 1}")
        z = empty()
        z[c + col] = _R1
        info_rows.append((z, empty()))
        info_labels.append(f"Z{q + 1}")

    def matrix(pairs, idx):
        return PolyMatrix([p[idx] for p in pairs], cols=total)

    info = QuantumCheckMatrix(
        matrix(info_rows, 0), matrix(info_rows, 1), bob_cols=c, row_labels=tuple(info_labels)
    )
    return QuantumCheckMatrix(
        matrix(rows, 0), matrix(rows, 1), bob_cols=c, row_labels=tuple(labels), info=info
    )


def _apply_with_trace(state, gates, trace, want_trace):
    for g in gates:
        state = apply_gate(state, g)
        if want_trace:
            trace.append(TraceStep(format_gate(g), state))
    return state


def _scale_rows(qcm: QuantumCheckMatrix, scale_by_row) -> QuantumCheckMatrix:
    z = qcm.z.to_lists()
    x = qcm.x.to_lists()
    for r, kexp in scale_by_row.items():
        f = RationalPoly(LaurentPoly.term(kexp))
        z[r] = [f * e for e in z[r]]
        x[r] = [f * e for e in x[r]]
    return QuantumCheckMatrix(
        PolyMatrix(z, cols=qcm.cols), PolyMatrix(x, cols=qcm.cols), qcm.bob_cols, qcm.row_labels, qcm.info
    )


def _permute_rows(qcm: QuantumCheckMatrix, order) -> QuantumCheckMatrix:
    z = [qcm.z.entries[i] for i in order]
    x = [qcm.x.entries[i] for i in order]
    labels = tuple(qcm.row_labels[i] for i in order) if qcm.row_labels else ()
    return QuantumCheckMatrix(PolyMatrix(z, cols=qcm.cols), PolyMatrix(x, cols=qcm.cols), qcm.bob_cols, labels, qcm.info)


def _measurable(qcm: QuantumCheckMatrix):
    """Clear denominators row by row (type-3 scalings, recorded as multipliers)."""
    mults = []
    z = qcm.z.to_lists()
    x = qcm.x.to_lists()
    for r in range(qcm.rows):
        m = _L1
        for e in z[r] + x[r]:
            if e.den != _L1:
                g = gcd(m, e.den)
                q, _ = divmod_shifted(m, g)
                m = q * e.den
        if m != _L1:
            fr = RationalPoly(m)
            z[r] = [fr * e for e in z[r]]
            x[r] = [fr * e for e in x[r]]
        mults.append(m)
    out = QuantumCheckMatrix(PolyMatrix(z, cols=qcm.cols), PolyMatrix(x, cols=qcm.cols), qcm.bob_cols, qcm.row_labels)
    return out, tuple(mults)


def _monomial_offset(qcm: QuantumCheckMatrix, row: int, col: int, side: str):
    """If the row is exactly D^k at `col` on `side` (and zero elsewhere), return k."""
    m = qcm.z if side == "z" else qcm.x
    other = qcm.x if side == "z" else qcm.z
    target = None
    for j in range(qcm.cols):
        e = m.entries[row][j]
        if j == col:
            if e.is_zero() or not e.is_polynomial() or e.num.weight() != 1:
                return None
            target = e.num.dell
        elif not e.is_zero():
            return None
    if any(not e.is_zero() for e in other.entries[row]):
        return None
    return target


# -- class-specific builders --------------------------------------------------------


def _finish_class1(record: DecompositionRecord):
    red = record.reduction
    n, k1, k2, c = red.n, red.k1, red.k2, record.c
    # diagonalize the E block in place (its invariant factors are powers of D)
    identity_rows = {col: n - k1 + col for col in range(n - k2)}
    SmithEngine(
        (n - k1, n - k2),
        _ZBlockHooks(red, 0, 0, identity_rows=identity_rows, note="E-block"),
        enforce_chain=False,
    ).run()
    gamma = []
    for t in range(c):
        pivot = red.z[t][t].as_poly()
        df, _ = pivot.delay_free()
        if df != _L1:
            raise ClassMismatch(f"invariant factor {pivot} of E is not a power of D")
        gamma.append(pivot)
    red._snapshot("E diagonalized")
    # swap every column to the Hadamard frame, then clear the ebit rows' F entries
    for col in range(n):
        red.gate(hadamard(col, note="frame-swap"))
    for i in range(c):
        a = gamma[i].dell
        for j in range(n - k2, n):
            phi = red.x[i][j].as_poly()
            if not phi.is_zero():
                red.x_coladd(i, j, phi.shift(-a), note="clear-F1")
    red._snapshot("ebit cross entries cleared")
    # Smith of the ancilla cross block (now on the X side)
    r2 = n - k1 - c
    gamma_f = []
    if r2 > 0:
        got = SmithEngine((r2, k2), _XBlockHooks(red, c, n - k2, note="F2-block"), enforce_chain=False).run()
        if got < r2:
            raise RuntimeError("ancilla cross block lost rank; the input should have been rejected")
        for t in range(r2):
            pivot = red.x[c + t][n - k2 + t].as_poly()
            if pivot.weight() != 1:
                raise RuntimeError(f"ancilla cross factor {pivot} is not a power of D")
            gamma_f.append(pivot)
        for t in range(r2):
            red.gate(hadamard(n - k2 + t, note="frame-swap"))
    red._snapshot("reduced form")
    record.blocks["Gamma"] = gamma
    record.blocks["GammaF"] = gamma_f


def build_class1(record: DecompositionRecord) -> CodeSpec:
    if record.class_tag != CLASS1:
        raise ClassMismatch(f"build_class1 called on a {record.class_tag} record")
    red = record.reduction
    n, k1, k2, c, k = record.n, record.k1, record.k2, record.c, record.k
    _finish_class1(record)

    # sender columns: [c ebit][n-k2-c ancilla B][n-k1-c ancilla A][k info]
    ebit_cols = list(range(c))
    anc_a = [n - k2 + j for j in range(n - k1 - c)]
    anc_b = [c + j for j in range(n - k2 - c)]
    logical_cols = [n - k + q for q in range(k)]
    bare = _bare_state(n, c, ebit_cols, anc_a, anc_b, logical_cols)

    # reduced row position -> bare row index
    pair = {}
    for i in range(c):
        pair[i] = c + len(anc_a) + i          # X-frame ebit rows carry the Z-check structure
    for j in range(n - k1 - c):
        pair[c + j] = c + j                   # ancilla-A rows
    for i in range(c):
        pair[n - k1 + i] = i                  # Z-frame ebit rows
    for j in range(n - k2 - c):
        pair[n - k1 + c + j] = c + len(anc_a) + c + j

    encoder = Circuit(tuple(g.inverse() for g in reversed(red.gates)), direction="encode")
    decoder = Circuit(tuple(red.gates), direction="decode")
    return _assemble(record, bare, pair, encoder, decoder, info_fix=None,
                     logical_cols=logical_cols, decoded_cols=logical_cols)


def _finish_class2(record: DecompositionRecord):
    red = record.reduction
    n, k1, k2, c, s = red.n, red.k1, red.k2, record.c, record.s
    special = record.class_tag == CLASS2_SPECIAL
    identity_rows = {col: n - k1 + col for col in range(n - k2)}

    if special:
        # Smith of the full cross block; its diagonal becomes powers of D
        got = SmithEngine(
            (n - k1, k2), _ZBlockHooks(red, 0, n - k2, note="F-block"), enforce_chain=False
        ).run()
        if got < n - k1:
            raise ClassMismatch("special-case cross block lost full row rank")
        for t in range(n - k1):
            if red.z[t][n - k2 + t].as_poly().weight() != 1:
                raise ClassMismatch("special-case cross factor is not a power of D")
        red._snapshot("F diagonalized")
        hooks = _ZBlockHooks(red, 0, 0, identity_rows=identity_rows, gamma_f_col0=n - k2, note="E-block")
    else:
        hooks = _ZBlockHooks(red, 0, 0, identity_rows=identity_rows, note="E-block")
    SmithEngine((n - k1, n - k2), hooks, enforce_chain=True).run()

    gamma1, gamma2 = [], []
    for t in range(c):
        pivot = red.z[t][t].as_poly()
        df, kexp = pivot.delay_free()
        if df == _L1:
            gamma1.append(pivot)
        else:
            if kexp != 0:
                red.row_scale(t, -kexp)
            gamma2.append(df)
    if len(gamma1) != s:
        raise RuntimeError(f"unit-factor count {len(gamma1)} disagrees with s={s}")
    red._snapshot("E diagonalized")
    blocks = {"Gamma1": gamma1, "Gamma2": gamma2}

    if special:
        gp = []
        for t in range(n - k1):
            e = red.z[t][n - k2 + t].as_poly()
            if e.weight() != 1:
                raise ClassMismatch("special-case F diagonal lost its power-of-D form")
            gp.append(e)
        blocks["Gamma1p"] = gp[:s]
        blocks["Gamma2p"] = gp[s:c]
        blocks["Gamma3p"] = gp[c:]
        for i in range(s):
            red.z_coladd(i, n - k2 + i, LaurentPoly.term(gp[i].dell - gamma1[i].dell), note="clear-G1p")
        red._snapshot("ebit cross entries cleared")
    else:
        r3 = n - k1 - c
        gamma_f3 = []
        if r3 > 0:
            got = SmithEngine(
                (r3, k2), _ZBlockHooks(red, c, n - k2, note="F3-block"), enforce_chain=False
            ).run()
            if got < r3:
                raise RuntimeError("ancilla cross block lost rank; the input should have been rejected")
            for t in range(r3):
                pivot = red.z[c + t][n - k2 + t].as_poly()
                if pivot.weight() != 1:
                    raise RuntimeError(f"ancilla cross factor {pivot} is not a power of D")
                gamma_f3.append(pivot)
            for r in range(c):
                for j in range(r3):
                    phi = red.z[r][n - k2 + j].as_poly()
                    if not phi.is_zero():
                        red.row_add(c + j, r, phi.shift(-gamma_f3[j].dell))
            red._snapshot("ancilla cross block cleared")
        blocks["GammaF3"] = gamma_f3
        for i in range(s):
            a = gamma1[i].dell
            for j in range(r3, k2):
                phi = red.z[i][n - k2 + j].as_poly()
                if not phi.is_zero():
                    red.z_coladd(i, n - k2 + j, phi.shift(-a), note="clear-F1b")
        # column-only triangularization of the remaining cross rows
        for r in range(c - s):
            col0 = n - k2 + r3 + r
            if n - col0 <= 0:
                break
            SmithEngine(
                (1, n - col0), _ZBlockHooks(red, s + r, col0, note="L-block"), enforce_chain=False
            ).run()
        lmat = [[red.z[s + i][n - k2 + r3 + j] for j in range(c - s)] for i in range(c - s)]
        for i in range(c - s):
            for j in range(i + 1, c - s):
                if not lmat[i][j].is_zero():
                    raise RuntimeError("column-only reduction failed to reach lower-triangular form")
        blocks["L"] = PolyMatrix(lmat) if lmat else PolyMatrix.zero(0, 0)
        red._snapshot("cross rows triangularized")

    # flip the plain-ancilla columns into the Z frame
    for col in range(c, n - k2):
        red.gate(hadamard(col, note="frame-swap"))
    red._snapshot("reduced form")
    record.blocks.update(blocks)
    return blocks


def build_class2(record: DecompositionRecord) -> CodeSpec:
    if record.class_tag not in (CLASS2, CLASS2_SPECIAL):
        raise ClassMismatch(f"build_class2 called on a {record.class_tag} record")
    red = record.reduction
    n, k1, k2, c, s, k = record.n, record.k1, record.k2, record.c, record.s, record.k
    special = record.class_tag == CLASS2_SPECIAL
    blocks = _finish_class2(record)
    gamma2 = blocks["Gamma2"]
    cs = c - s
    f0 = n - k2

    mid_cols = [s + j for j in range(cs)]
    if special:
        last_cols = [f0 + s + j for j in range(cs)]
        anc_a = [f0 + c + j for j in range(n - k1 - c)]
        logical_cols = [f0 + j for j in range(s)] + last_cols + [f0 + (n - k1) + q for q in range(k1 + k2 - n)]
        decoded_map = {col: col for col in logical_cols}
        for j in range(cs):
            decoded_map[last_cols[j]] = mid_cols[j]  # coherent teleportation target
    else:
        r3 = n - k1 - c
        last_cols = [f0 + r3 + j for j in range(cs)]
        anc_a = [f0 + j for j in range(r3)]
        logical_cols = last_cols + [f0 + r3 + cs + q for q in range(k1 + k2 - n + s)]
        decoded_map = {col: col for col in logical_cols}
    anc_b = [c + j for j in range(n - k2 - c)]
    ebit_cols = list(range(s)) + mid_cols
    logical_cols = sorted(logical_cols)
    decoded_cols = [decoded_map[col] for col in logical_cols]
    bare = _bare_state(n, c, ebit_cols, anc_a, anc_b, logical_cols)

    # reduced row position -> bare row index
    pair = {}
    for i in range(c):
        pair[i] = i                            # Z-frame ebit rows (Gamma1 + Gamma2 rows)
    for j in range(n - k1 - c):
        pair[c + j] = c + j                    # ancilla-A rows
    for i in range(c):
        pair[n - k1 + i] = c + len(anc_a) + i  # X-frame ebit rows
    for j in range(n - k2 - c):
        pair[n - k1 + c + j] = c + len(anc_a) + c + j

    # the infinite-depth stage acting on the fresh ebits and information qubits
    sub = []
    if special:
        g2p = blocks["Gamma2p"]
        for j in range(cs):
            sub.append(hadamard(mid_cols[j], note="ebit-stage"))
        for j in range(cs):
            sub.append(cnot(mid_cols[j], last_cols[j], g2p[j].dell, note="ebit-stage"))
        for j in range(cs):
            sub.append(inf_depth(last_cols[j], gamma2[j], note="ebit-stage"))
        for j in range(cs):
            sub.append(hadamard(mid_cols[j], note="ebit-stage"))
        for j in range(cs):
            sub.append(hadamard(last_cols[j], note="ebit-stage"))
    else:
        lmat = blocks["L"]
        for i in range(cs):
            for j in range(cs):
                e = lmat[i, j]
                if not e.is_zero():
                    for exp in e.num.exponents():
                        sub.append(cnot(last_cols[j], mid_cols[i], -exp, note="ebit-stage"))
        for i in range(cs):
            sub.append(inf_depth(mid_cols[i], gamma2[i], time_reversed=True, note="ebit-stage"))

    encoder = Circuit(tuple(sub) + tuple(g.inverse() for g in reversed(red.gates)), direction="encode")

    # decoding: undo the finite-depth part, then unravel the infinite-depth stage
    tail = []
    if special:
        g2p = blocks["Gamma2p"]
        for j in range(cs):
            tail.append(cnot(s + j, c + mid_cols[j], 0, full_frame=True, note="ebit-unstage"))
        for j in range(cs):
            for exp in gamma2[j].shift(-g2p[j].dell).exponents():
                tail.append(cnot(mid_cols[j], last_cols[j], -exp, note="ebit-unstage"))
        for j in range(cs):
            tail.append(hadamard(mid_cols[j], note="ebit-unstage"))
        for j in range(cs):
            tail.append(hadamard(last_cols[j], note="ebit-unstage"))
    else:
        lmat = blocks["L"]
        sandwich = [hadamard(s + i, full_frame=True, note="ebit-unstage") for i in range(cs)]
        sandwich += [hadamard(last_cols[j], note="ebit-unstage") for j in range(cs)]
        tail.extend(sandwich)
        for i in range(cs):
            for j in range(cs):
                e = lmat[i, j]
                if not e.is_zero():
                    for exp in e.num.exponents():
                        tail.append(cnot(s + i, c + last_cols[j], exp, full_frame=True, note="ebit-unstage"))
        tail.extend(sandwich)

    decoder = Circuit(tuple(red.gates) + tuple(tail), direction="decode")

    # decode-time logical fix-ups: add stabilizer rows to logical rows
    def info_fix(stab: QuantumCheckMatrix, info: QuantumCheckMatrix) -> QuantumCheckMatrix:
        iz = info.z.to_lists()
        ix = info.x.to_lists()
        if special:
            g2p = blocks["Gamma2p"]
            for j in range(cs):
                xrow = 2 * logical_cols.index(last_cols[j])
                srow = s + j  # the reduced-position index survives the final row ordering
                co = RationalPoly(LaurentPoly.term(-g2p[j].dell))
                iz[xrow] = [a + co * b for a, b in zip(iz[xrow], stab.z.entries[srow])]
                ix[xrow] = [a + co * b for a, b in zip(ix[xrow], stab.x.entries[srow])]
        else:
            lmat = blocks["L"]
            for i in range(cs):
                xrow = 2 * logical_cols.index(last_cols[i])
                for j in range(cs):
                    e = lmat[j, i]
                    if e.is_zero():
                        continue
                    coeff = e.reverse()
                    srow = n - k1 + s + j
                    iz[xrow] = [a + coeff * b for a, b in zip(iz[xrow], stab.z.entries[srow])]
                    ix[xrow] = [a + coeff * b for a, b in zip(ix[xrow], stab.x.entries[srow])]
        return QuantumCheckMatrix(PolyMatrix(iz, cols=info.cols), PolyMatrix(ix, cols=info.cols), info.bob_cols, info.row_labels)

    return _assemble(record, bare, pair, encoder, decoder, info_fix=info_fix,
                     logical_cols=logical_cols, decoded_cols=decoded_cols)


def _assemble(record, bare, pair, encoder, decoder, info_fix, logical_cols, decoded_cols):
    red = record.reduction
    want_trace = red.want_trace

    encode_trace = [TraceStep("unencoded stream", bare)] if want_trace else []
    evolved = _apply_with_trace(bare, encoder.gates, encode_trace, want_trace)

    # undo the mental row scalings recorded during the reduction
    unscale = {}
    for rid, kexp in red.row_scales.items():
        pos = red.row_ids.index(rid)
        unscale[pair[pos]] = -kexp
    presented = _scale_rows(evolved, unscale) if unscale else evolved
    order = [pair[pos] for pos in range(red.rows)]
    final = _permute_rows(presented, order)
    if want_trace:
        encode_trace.append(TraceStep("final stabilizer", final))

    decode_trace = [TraceStep("received stream", final)] if want_trace else []
    rescale = {pos: red.row_scales[red.row_ids[pos]] for pos in range(red.rows)
               if red.row_scales.get(red.row_ids[pos])}
    decoded = _scale_rows(final, rescale) if rescale else final
    if want_trace and rescale:
        decode_trace.append(TraceStep("reduction row scalings reapplied", decoded))
    decoded = _apply_with_trace(decoded, decoder.gates, decode_trace, want_trace)
    if info_fix is not None and decoded.info is not None:
        fixed = info_fix(decoded, decoded.info)
        decoded = QuantumCheckMatrix(decoded.z, decoded.x, decoded.bob_cols, decoded.row_labels, fixed)
        if want_trace:
            decode_trace.append(TraceStep("logical operators reduced by stabilizer rows", decoded))

    offsets = []
    if decoded.info is not None:
        for q, col in enumerate(decoded_cols):
            kx = _monomial_offset(decoded.info, 2 * q, record.c + col, "x")
            kz = _monomial_offset(decoded.info, 2 * q + 1, record.c + col, "z")
            offsets.append(kx if kx is not None and kx == kz else None)

    measurable, mults = _measurable(final)
    return CodeSpec(
        n=record.n,
        k=record.k,
        c=record.c,
        s=record.s,
        class_tag=record.class_tag,
        encoder=encoder,
        decoder=decoder,
        bare=bare,
        final_stabilizer=final,
        measurable_stabilizer=measurable,
        measurement_multipliers=mults,
        rates=_rates(record.n, record.k, record.c),
        record=record,
        logical_cols=tuple(logical_cols),
        decoded_cols=tuple(decoded_cols),
        decoded_offsets=tuple(offsets),
        decoded_state=decoded,
        encode_trace=encode_trace,
        decode_trace=decode_trace,
    )


def build_code(h1: PolyMatrix, h2: PolyMatrix, want_trace: bool = False) -> CodeSpec:
    """The full pipeline: validate, classify, and synthesize the code."""
    tag, record = classify(h1, h2, want_trace=want_trace)
    if tag == CLASS1:
        return build_class1(record)
    return build_class2(record)
