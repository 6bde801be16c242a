"""Gate semantics on check matrices and infinite-depth synthesis."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from eaqconv.gates import (
    Circuit,
    Gate,
    QuantumCheckMatrix,
    SlidingWindowRule,
    apply_gate,
    cnot,
    column_poly_to_cnots,
    cphase,
    cphase_self,
    format_circuit,
    hadamard,
    inf_depth,
    parse_circuit,
    phase,
    swap,
    synthesize_infinite_depth,
    time_reversed_rule,
)
from eaqconv.poly import LaurentPoly, RationalPoly, parse_poly
from eaqconv.polymat import PolyMatrix, parse_matrix


def P(text):
    return parse_poly(text)


def qcm(ztext, xtext, bob_cols=0, info=None):
    return QuantumCheckMatrix(parse_matrix(ztext), parse_matrix(xtext), bob_cols=bob_cols, info=info)


# -- the worked finite-depth encoding, step by step ---------------------------

EBIT_START = qcm("1, 1, 0\n0, 0, 0", "0, 0, 0\n1, 1, 0", bob_cols=1)


def test_cnot_pair_delayed_frames():
    m = apply_gate(apply_gate(EBIT_START, cnot(0, 1, 1)), cnot(0, 1, 2))
    assert m.z == parse_matrix("1, 1, 0\n0, 0, 0")
    assert m.x == parse_matrix("0, 0, 0\n1, 1, D+D^2")


def test_hadamard_pair():
    m = apply_gate(apply_gate(EBIT_START, cnot(0, 1, 1)), cnot(0, 1, 2))
    m = apply_gate(apply_gate(m, hadamard(0)), hadamard(1))
    assert m.z == parse_matrix("1, 0, 0\n0, 1, D+D^2")
    assert m.x == parse_matrix("0, 1, 0\n1, 0, 0")


def test_full_encoding_sequence():
    m = EBIT_START
    for g in [cnot(0, 1, 1), cnot(0, 1, 2), hadamard(0), hadamard(1), cnot(0, 1, 1)]:
        m = apply_gate(m, g)
    assert m.z == parse_matrix("1, 0, 0\n0, D, D+D^2")
    assert m.x == parse_matrix("0, 1, D\n1, 0, 0")
    m = apply_gate(m, cnot(1, 0, 1))
    assert m.z == parse_matrix("1, 0, 0\n0, D, 1+D+D^2")
    assert m.x == parse_matrix("0, 1+D^2, D\n1, 0, 0")
    m = apply_gate(m, cnot(0, 1, 0))
    assert m.z == parse_matrix("1, 0, 0\n0, 1+D^2, 1+D+D^2")
    assert m.x == parse_matrix("0, 1+D^2, 1+D+D^2\n1, 0, 0")


def test_gate_cannot_touch_receiver_columns():
    with pytest.raises(IndexError):
        apply_gate(EBIT_START, cnot(1, 2, 0))  # only two sender qubits exist
    # full-frame gates may address the receiver half explicitly
    m = apply_gate(EBIT_START, cnot(0, 1, 0, full_frame=True))
    assert m.x == parse_matrix("0, 0, 0\n1, 0, 0")


# -- infinite-depth gate on the ancilla warm-up --------------------------------


def _warmup_state():
    stab = qcm("0, 0, 0\n1, 1, 0", "1, 1, 1\n0, 0, 0")
    info = qcm("0, 0, 0\n1, 0, 1", "0, 0, 1\n0, 0, 0")
    return QuantumCheckMatrix(stab.z, stab.x, info=info)


def test_inf_depth_gate_golden():
    m = apply_gate(_warmup_state(), inf_depth(2, P("1+D")))
    assert m.x == parse_matrix("1, 1, 1/(1+D)\n0, 0, 0")
    assert m.z == parse_matrix("0, 0, 0\n1, 1, 0")
    assert m.info.z == parse_matrix("0, 0, 0\n1, 0, 1+D^-1")
    assert m.info.x == parse_matrix("0, 0, 1/(1+D)\n0, 0, 0")


def test_inf_depth_then_finite_decode():
    m = apply_gate(_warmup_state(), inf_depth(2, P("1+D")))
    for g in [cnot(0, 1, 0), cnot(2, 0, 0), cnot(2, 0, 1)]:
        m = apply_gate(m, g)
    assert m.z == parse_matrix("0, 0, 0\n0, 1, 0")
    assert m.x == parse_matrix("0, 0, 1/(1+D)\n0, 0, 0")
    assert m.info.z == parse_matrix("0, 0, 0\n1, 0, 0")
    assert m.info.x == parse_matrix("1, 0, 1/(1+D)\n0, 0, 0")
    # adding the first stabilizer row to the first logical row purifies it
    fixed = [a + b for a, b in zip(m.info.x.entries[0], m.x.entries[0])]
    assert PolyMatrix([fixed]) == parse_matrix("1, 0, 0")


# -- gate catalog coverage -------------------------------------------------------


def test_phase_gate():
    m = qcm("0", "1")
    assert apply_gate(m, phase(0)).z == parse_matrix("1")


def test_cphase_gates():
    m = qcm("0, 0", "1, 0")
    out = apply_gate(m, cphase(0, 1, 1))
    assert out.z == parse_matrix("0, D")
    out = apply_gate(m, cphase_self(0, 2))
    assert out.z == parse_matrix("D^2+D^-2, 0")


def test_swap_is_three_cnots():
    m = qcm("1, D", "D^2, 1+D")
    for g in swap(0, 1):
        m = apply_gate(m, g)
    assert m.z == parse_matrix("D, 1")
    assert m.x == parse_matrix("1+D, D^2")


def test_column_poly_to_cnots():
    gs = column_poly_to_cnots(P("D+D^2"), 0, 1)
    assert [(g.i, g.j, g.delay) for g in gs] == [(0, 1, 1), (0, 1, 2)]
    assert [(g.i, g.j, g.delay) for g in column_poly_to_cnots(P("1"), 0, 1)] == [(0, 1, 0)]
    assert [g.delay for g in column_poly_to_cnots(P("1+D^3"), 0, 1)] == [0, 3]
    with pytest.raises(ValueError):
        column_poly_to_cnots(LaurentPoly.zero(), 0, 1)
    m = qcm("0, 0", "1, 0")
    for g in gs:
        m = apply_gate(m, g)
    assert m.x == parse_matrix("1, D+D^2")


def test_gate_constructor_validation():
    with pytest.raises(ValueError):
        cnot(1, 1, 0)
    with pytest.raises(ValueError):
        inf_depth(0, LaurentPoly.zero())
    with pytest.raises(ValueError):
        Gate("BOGUS", 0)


# -- invariance properties ---------------------------------------------------------


def _random_qcm(rng, rows, cols, bob_cols=0, rational=False):
    def rp():
        num = LaurentPoly(rng.randrange(0, 8), rng.randint(-1, 1))
        if rational and rng.random() < 0.25:
            return RationalPoly(num, LaurentPoly(rng.randrange(1, 8) | 1, 0))
        return RationalPoly(num)

    z = PolyMatrix([[rp() for _ in range(cols)] for _ in range(rows)])
    x = PolyMatrix([[rp() for _ in range(cols)] for _ in range(rows)])
    return QuantumCheckMatrix(z, x, bob_cols=bob_cols)


def _random_gate(rng, n_alice):
    kinds = ["CNOT", "H", "P", "CPHASE", "CPHASE_SELF", "INF"]
    if n_alice < 2:
        kinds = ["H", "P", "CPHASE_SELF", "INF"]
    kind = rng.choice(kinds)
    i = rng.randrange(n_alice)
    if kind in ("CNOT", "CPHASE"):
        j = rng.choice([q for q in range(n_alice) if q != i])
        return Gate(kind, i, j, rng.randint(-2, 2))
    if kind == "CPHASE_SELF":
        return cphase_self(i, rng.randint(-2, 2))
    if kind == "INF":
        f = LaurentPoly(rng.randrange(1, 16), rng.randint(-1, 1))
        return inf_depth(i, f, time_reversed=rng.random() < 0.5)
    return Gate(kind, i)


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_symplectic_gram_invariant_under_gates(seed):
    rng = random.Random(seed)
    rows, cols, bob = rng.randint(1, 3), rng.randint(2, 4), rng.randint(0, 1)
    m = _random_qcm(rng, rows, cols, bob_cols=bob, rational=True)
    g = _random_gate(rng, m.alice_cols)
    assert apply_gate(m, g).symplectic_gram() == m.symplectic_gram()


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_finite_depth_circuit_inverse(seed):
    rng = random.Random(seed)
    m = _random_qcm(rng, rng.randint(1, 3), rng.randint(2, 4))
    gates = []
    for _ in range(rng.randint(1, 6)):
        g = _random_gate(rng, m.cols)
        if g.kind != "INF":
            gates.append(g)
    circ = Circuit(tuple(gates))
    assert circ.inverse().apply(circ.apply(m)) == m


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_finite_depth_preserves_polynomials(seed):
    rng = random.Random(seed)
    m = _random_qcm(rng, rng.randint(1, 2), rng.randint(2, 3))
    assert m.is_polynomial()
    g = _random_gate(rng, m.cols)
    if g.kind != "INF":
        assert apply_gate(m, g).is_polynomial()


def test_inverse_rejects_infinite_depth():
    circ = Circuit((inf_depth(0, P("1+D")),))
    with pytest.raises(ValueError):
        circ.inverse()


# -- sliding-window synthesis --------------------------------------------------------


def test_synthesize_golden_weight_three():
    rule = synthesize_infinite_depth(P("1+D+D^3"))
    assert rule.window == 4
    assert rule.cnot_pattern == ((1, 4), (3, 4))
    assert rule.scratch_frames == 0


def test_synthesize_golden_weight_two():
    rule = synthesize_infinite_depth(P("1+D"))
    assert rule.window == 2
    assert rule.cnot_pattern == ((1, 2),)


def test_synthesize_identity():
    rule = synthesize_infinite_depth(P("1"))
    assert rule.window == 1
    assert rule.cnot_pattern == ()


def test_time_reversed_golden():
    rule = time_reversed_rule(P("1+D"))
    assert rule.scratch_frames == 1
    assert rule.window == 2
    assert rule.cnot_pattern == ((1, 2),)
    rule = time_reversed_rule(P("1+D+D^3"))
    assert rule.scratch_frames == 3
    assert rule.window == 4
    assert rule.cnot_pattern == ((1, 4), (2, 4))
    assert time_reversed_rule(P("1")).cnot_pattern == ()


def test_rule_pattern_bounds_checked():
    with pytest.raises(ValueError):
        SlidingWindowRule(window=2, cnot_pattern=((1, 3),))


# -- serialization ----------------------------------------------------------------------


def test_circuit_text_round_trip():
    circ = Circuit(
        (
            cnot(0, 1, 1),
            hadamard(1),
            inf_depth(2, P("1+D+D^3")),
            inf_depth(0, P("1+D"), time_reversed=True),
            cnot(0, 2, 0, full_frame=True),
            cphase(0, 1, -1),
            cphase_self(1, 2),
            phase(0),
        )
    )
    text = format_circuit(circ)
    assert "CNOT 1 2 delay=1" in text
    assert "INF 3 f=1+D+D^3" in text
    assert "CNOT *1 *3 delay=0" in text
    parsed = parse_circuit(text)
    assert parsed.gates == circ.gates
