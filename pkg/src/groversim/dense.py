"""Dense-matrix engine: operators built explicitly, applied to full vectors.

This is the slowest but most transparent engine and serves as the ground
truth the other engines are validated against.  Operator storage grows as
4^(n+1), which caps practical use around a dozen input qubits.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DENSE_LIMIT_DEFAULT,
    DenseLimitExceeded,
    DenseState,
    DimensionMismatch,
    NotNormalized,
    OracleSpec,
    SearchOutcome,
    initial_state,
    table_constants,
)
from ._runloop import run_vector_search
from .termination import TerminationPolicy
from .trace import TraceRow

OPERATOR_KINDS = ("superposition", "entanglement", "interference", "gate")

# Row-block size for operator construction; bounds temporaries to
# _BLOCK * dim doubles instead of dim^2.
_BLOCK = 1024


@dataclass(frozen=True)
class OperatorMatrix:
    """A real orthogonal operator on the (n+1)-qubit register."""

    kind: str
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.kind not in OPERATOR_KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        e = self.entries
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise DimensionMismatch(f"operator must be square, got {e.shape}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _check_dense_limit(n: int, dense_limit: int | None) -> None:
    limit = DENSE_LIMIT_DEFAULT if dense_limit is None else dense_limit
    if n > limit:
        raise DenseLimitExceeded(
            f"n={n} exceeds the dense-engine limit of {limit} input qubits"
        )


def build_superposition(n: int, dense_limit: int | None = None) -> OperatorMatrix:
    """Walsh-Hadamard operator on n+1 qubits.

    Entry (i, j) is 2^(-(n+1)/2) with sign (-1)^popcount(i AND j), the
    closed form of the recursive two-by-two block replication of H.
    """
    _check_dense_limit(n, dense_limit)
    dim = 1 << (n + 1)
    hc = table_constants(n).hc
    cols = np.arange(dim, dtype=np.uint64)
    entries = np.empty((dim, dim))
    for lo in range(0, dim, _BLOCK):
        hi = min(lo + _BLOCK, dim)
        rows = np.arange(lo, hi, dtype=np.uint64)
        parity = np.bitwise_count(rows[:, None] & cols[None, :]) & np.uint8(1)
        entries[lo:hi] = np.where(parity.astype(bool), -hc, hc)
    return OperatorMatrix(kind="superposition", entries=entries)


def build_entanglement(oracle: OracleSpec, dense_limit: int | None = None) -> OperatorMatrix:
    """Oracle permutation: identity blocks except a bit-flip block on each
    marked input, i.e. the reversible (x, y) -> (x, f(x) XOR y)."""
    _check_dense_limit(oracle.n, dense_limit)
    dim = 1 << (oracle.n + 1)
    entries = np.eye(dim)
    for x in oracle.marked:
        i = 2 * x
        entries[i, i] = 0.0
        entries[i + 1, i + 1] = 0.0
        entries[i, i + 1] = 1.0
        entries[i + 1, i] = 1.0
    return OperatorMatrix(kind="entanglement", entries=entries)


def build_interference(n: int, dense_limit: int | None = None) -> OperatorMatrix:
    """Diffusion (inversion about the mean) on the inputs, identity on the
    ancilla: dc1 on the diagonal, dc2 on same-parity off-diagonals, zero
    across ancilla parities."""
    _check_dense_limit(n, dense_limit)
    dim = 1 << (n + 1)
    consts = table_constants(n)
    entries = np.zeros((dim, dim))
    for b in (0, 1):
        entries[b::2, b::2] = consts.dc2
    np.fill_diagonal(entries, consts.dc1)
    return OperatorMatrix(kind="interference", entries=entries)


def build_gate(
    oracle: OracleSpec, h: int, dense_limit: int | None = None
) -> OperatorMatrix:
    """Composite search gate: h oracle+diffusion rounds after one
    superposition, as an explicit matrix product."""
    if h < 1:
        raise ValueError(f"iteration count h must be >= 1, got {h}")
    _check_dense_limit(oracle.n, dense_limit)
    sp = build_superposition(oracle.n, dense_limit)
    uf = build_entanglement(oracle, dense_limit)
    intf = build_interference(oracle.n, dense_limit)
    step = intf.entries @ uf.entries
    gate = np.linalg.matrix_power(step, h) @ sp.entries
    return OperatorMatrix(kind="gate", entries=gate)


def apply(matrix: OperatorMatrix, state: DenseState) -> DenseState:
    """Matrix-vector product, returned as a new state."""
    if matrix.dim != state.dim:
        raise DimensionMismatch(
            f"operator dim {matrix.dim} does not match state dim {state.dim}"
        )
    return DenseState(n=state.n, amps=matrix.entries @ state.amps)


def entropy_of_amplitudes(amps: np.ndarray) -> float:
    """Shannon entropy (bits) of the measurement distribution amps^2."""
    p = amps * amps
    total = float(p.sum())
    if abs(total - 1.0) > 1e-6:
        raise NotNormalized(f"probabilities sum to {total!r}")
    nz = p[p > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def state_entropy_dense(state: DenseState) -> float:
    """Shannon entropy of a full state vector, in bits."""
    return entropy_of_amplitudes(state.amps)


def run_dense(
    oracle: OracleSpec,
    policy: TerminationPolicy,
    dense_limit: int | None = None,
    trace_stride: int | None = 1,
    record_entropy: bool | None = None,
) -> tuple[SearchOutcome, list[TraceRow]]:
    """Full five-layer run: input, superposition, then oracle+diffusion
    rounds until the policy stops (evaluated after each diffusion)."""
    _check_dense_limit(oracle.n, dense_limit)
    sp = build_superposition(oracle.n, dense_limit)
    amps0 = sp.entries @ initial_state(oracle.n).amps
    del sp
    uf = build_entanglement(oracle, dense_limit).entries
    intf = build_interference(oracle.n, dense_limit).entries
    return run_vector_search(
        oracle,
        policy,
        amps0,
        apply_oracle=lambda a: uf @ a,
        apply_diffusion=lambda a: intf @ a,
        entropy_of=entropy_of_amplitudes,
        trace_stride=trace_stride,
        record_entropy=record_entropy,
    )


def dump_operator(matrix: OperatorMatrix, path) -> None:
    """Write an operator as plain text, one row per line, 17-significant-
    digit reals (round-trips to the same doubles)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in matrix.entries:
            fh.write(" ".join(f"{v:.17g}" for v in row))
            fh.write("\n")


def load_operator(path, kind: str = "gate") -> OperatorMatrix:
    entries = np.loadtxt(path, ndmin=2)
    return OperatorMatrix(kind=kind, entries=entries)
