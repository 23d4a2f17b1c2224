"""Classical multi-engine simulator of Grover's quantum search.

Three engines over one problem model:

* ``dense``      -- explicit operator matrices applied to a full vector;
                    the ground truth for everything else.
* ``matrixfree`` -- operator elements computed on demand by bitwise rules,
                    with structure-aware fast paths.
* ``compressed`` -- the two-amplitude representation; O(1) memory and
                    arithmetic per iteration, usable past 1000 qubits.

Runs stop under one of five termination models (fixed count, first local
optimum, best-within-budget, entropy threshold, or threshold-within-budget);
see :mod:`groversim.termination`.
"""

from .core import (
    AllMarked,
    CompressedState,
    DenseState,
    DimensionMismatch,
    DenseLimitExceeded,
    EmptyMarkedSet,
    GroverError,
    IndexOutOfRange,
    InvalidMarkedCount,
    MatrixFreeLimitExceeded,
    NotNormalized,
    OracleMismatch,
    OracleSpec,
    PolicyParameterMissing,
    QubitCountOutOfRange,
    SearchOutcome,
    TableConstants,
    f_eval,
    make_oracle,
    table_constants,
)
from .compressed import (
    entropy_compressed,
    expand,
    h_block,
    measure_compressed,
    run_compressed,
    ud_step,
)
from .dense import (
    OperatorMatrix,
    apply,
    build_entanglement,
    build_gate,
    build_interference,
    build_superposition,
    run_dense,
    state_entropy_dense,
)
from .kernels import KERNEL_BACKEND
from .matrixfree import (
    apply_entanglement_fast,
    apply_interference_fast,
    apply_on_demand,
    ent_element,
    int_element,
    run_matrixfree,
    sp_element,
)
from .termination import (
    StepDecision,
    TerminationPolicy,
    TerminationState,
    parse_policy,
    theoretical_iterations,
)
from .trace import TraceRow, emit_trace, read_trace

__version__ = "0.1.0"
