"""CSS entanglement-assisted quantum convolutional codes.

Builds an [[n, k; c]] entanglement-assisted quantum convolutional code from
two arbitrary classical binary convolutional check matrices, synthesizes the
encoding and decoding circuits (finite depth where possible, sliding-window
infinite-depth operations where not), and verifies every step with exact
polynomial algebra plus a truncated stream simulator.
"""

from .construct import (
    CLASS1,
    CLASS2,
    CLASS2_SPECIAL,
    CodeSpec,
    DecompositionRecord,
    build_class1,
    build_class2,
    build_code,
    classify,
    code_params,
    decompose_general,
    ebit_count,
    validate_inputs,
)
from .gates import (
    Circuit,
    Gate,
    QuantumCheckMatrix,
    SlidingWindowRule,
    apply_gate,
    column_poly_to_cnots,
    synthesize_infinite_depth,
    time_reversed_rule,
)
from .pauli import CheckRow, PauliFrameStream, b2p, commute_oracle, p2b, shifted_symplectic
from .poly import LaurentPoly, RationalPoly, parse_poly, parse_rational, series_expand
from .polymat import PolyMatrix, SmithDecomposition, parse_matrix, rank, smith_form
from .simulate import BinarySymplecticWindow, ErrorPattern, expand, run_circuit, syndrome, verify_code

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
