"""Compute-on-demand engine: operator elements produced by bitwise rules
at the moment of use, never stored.

Two modes: the honest on-demand products evaluate the element rule for
every (row, column) pair; the fast paths exploit operator structure (the
oracle is a pair swap, diffusion needs only one sum per ancilla parity)
and must agree with the on-demand products to 1e-12.
"""
from __future__ import annotations

import numpy as np

from . import kernels
from .core import (
    MATRIXFREE_FAST_LIMIT_DEFAULT,
    MATRIXFREE_NAIVE_LIMIT_DEFAULT,
    DenseState,
    DimensionMismatch,
    IndexOutOfRange,
    MatrixFreeLimitExceeded,
    OracleSpec,
    SearchOutcome,
    f_eval,
    table_constants,
)
from .dense import entropy_of_amplitudes
from ._runloop import run_vector_search
from .termination import TerminationPolicy
from .trace import TraceRow

ELEMENT_SOURCES = ("sp", "ent", "int")


def _check_indices(n: int, i: int, j: int) -> None:
    dim = 1 << (n + 1)
    if not (0 <= i < dim and 0 <= j < dim):
        raise IndexOutOfRange(f"element ({i}, {j}) outside [0, {dim})^2")


def sp_element(n: int, i: int, j: int) -> float:
    """Walsh-Hadamard element: +/- 2^(-(n+1)/2).

    The sign is accumulated bit by bit, flipping once for every position
    where i and j both have a set bit, over the n+1 register bits.
    """
    _check_indices(n, i, j)
    hc = table_constants(n).hc
    h = 1.0
    ii = i
    jj = j
    for _ in range(n + 1):
        if ii & jj & 1:
            h = -h
        ii >>= 1
        jj >>= 1
    return h * hc


def ent_element(oracle: OracleSpec, i: int, j: int) -> float:
    """Oracle permutation element (0 or 1)."""
    _check_indices(oracle.n, i, j)
    r = i >> 1
    c = j >> 1
    if r != c:
        return 0.0
    if f_eval(oracle, r) == 0:
        return 1.0 if i == j else 0.0
    return 1.0 if (i ^ j) & 1 else 0.0


def int_element(n: int, i: int, j: int) -> float:
    """Diffusion element: zero across ancilla parities, dc1 on the
    diagonal, dc2 elsewhere."""
    _check_indices(n, i, j)
    if (i ^ j) & 1:
        return 0.0
    consts = table_constants(n)
    return consts.dc1 if i == j else consts.dc2


def _marked_mask(oracle: OracleSpec) -> np.ndarray:
    mask = np.zeros(1 << oracle.n, dtype=np.uint8)
    mask[oracle.marked_array()] = 1
    return mask


def apply_on_demand(
    element_source: str, state: DenseState, oracle: OracleSpec | None = None
) -> DenseState:
    """y_i = sum_j element(i, j) * x_j without materializing the operator."""
    if element_source not in ELEMENT_SOURCES:
        raise ValueError(
            f"unknown element source {element_source!r}; expected one of {ELEMENT_SOURCES}"
        )
    if element_source == "ent":
        if oracle is None:
            raise ValueError("the 'ent' element source requires an oracle")
        if oracle.n != state.n:
            raise DimensionMismatch(
                f"oracle n={oracle.n} does not match state n={state.n}"
            )
        out = kernels.apply_ent_on_demand(state.amps, _marked_mask(oracle), state.n)
    elif element_source == "sp":
        out = kernels.apply_sp_on_demand(state.amps, state.n)
    else:
        out = kernels.apply_int_on_demand(state.amps, state.n)
    return DenseState(n=state.n, amps=out)


def _swap_marked_pairs(amps: np.ndarray, marked: np.ndarray) -> np.ndarray:
    out = amps.copy()
    even = 2 * marked
    tmp = out[even].copy()
    out[even] = out[even + 1]
    out[even + 1] = tmp
    return out


def apply_entanglement_fast(oracle: OracleSpec, state: DenseState) -> DenseState:
    """Swap the amplitude pair of every marked input; O(2^n + m) work."""
    if oracle.n != state.n:
        raise DimensionMismatch(f"oracle n={oracle.n} does not match state n={state.n}")
    return DenseState(
        n=state.n, amps=_swap_marked_pairs(state.amps, oracle.marked_array())
    )


def _diffuse(amps: np.ndarray, n: int) -> np.ndarray:
    # y_i = dc1*x_i + dc2*(s_b - x_i), one sum per ancilla parity class
    consts = table_constants(n)
    out = np.empty_like(amps)
    for b in (0, 1):
        x = amps[b::2]
        s = x.sum()
        out[b::2] = consts.dc1 * x + consts.dc2 * (s - x)
    return out


def apply_interference_fast(n: int, state: DenseState) -> DenseState:
    """Inversion about the per-parity-class mean; O(2^(n+1)) work."""
    if n != state.n:
        raise DimensionMismatch(f"n={n} does not match state n={state.n}")
    return DenseState(n=n, amps=_diffuse(state.amps, n))


def _superposed_input(n: int) -> np.ndarray:
    # Walsh-Hadamard column for the |0...01> input: hc with sign from the
    # ancilla bit alone
    hc = table_constants(n).hc
    signs = np.where(np.arange(1 << (n + 1)) & 1, -hc, hc)
    return signs.astype(np.float64)


def run_matrixfree(
    oracle: OracleSpec,
    policy: TerminationPolicy,
    fast_paths: bool = True,
    limit: int | None = None,
    trace_stride: int | None = 1,
    record_entropy: bool | None = None,
) -> tuple[SearchOutcome, list[TraceRow]]:
    """Same contract as the dense run, with operators applied on demand.

    With fast paths the per-iteration cost is linear in the vector length;
    without them every product evaluates the full element grid, which is
    only sensible for small n.
    """
    n = oracle.n
    if limit is None:
        limit = (
            MATRIXFREE_FAST_LIMIT_DEFAULT
            if fast_paths
            else MATRIXFREE_NAIVE_LIMIT_DEFAULT
        )
    if n > limit:
        raise MatrixFreeLimitExceeded(
            f"n={n} exceeds the matrix-free limit of {limit} input qubits "
            f"({'fast' if fast_paths else 'on-demand'} paths)"
        )
    if fast_paths:
        amps0 = _superposed_input(n)
        marked = oracle.marked_array()
        apply_oracle = lambda a: _swap_marked_pairs(a, marked)
        apply_diffusion = lambda a: _diffuse(a, n)
    else:
        e1 = np.zeros(1 << (n + 1))
        e1[1] = 1.0
        amps0 = kernels.apply_sp_on_demand(e1, n)
        mask = _marked_mask(oracle)
        apply_oracle = lambda a: kernels.apply_ent_on_demand(a, mask, n)
        apply_diffusion = lambda a: kernels.apply_int_on_demand(a, n)
    return run_vector_search(
        oracle,
        policy,
        amps0,
        apply_oracle=apply_oracle,
        apply_diffusion=apply_diffusion,
        entropy_of=entropy_of_amplitudes,
        trace_stride=trace_stride,
        record_entropy=record_entropy,
    )
