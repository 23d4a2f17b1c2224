"""Two-amplitude engine: the problem-oriented O(1)-per-iteration simulation.

Every reachable search state is determined by two reals (the shared
amplitude of the marked components and of the unmarked ones) plus the
iteration count, so one Grover iteration is a handful of arithmetic
operations regardless of qubit count.  Exponent-shift scaling keeps the
recurrence exact out to n = 2040, far past where 2^n (or the diffusion
constants) stop being representable doubles.
"""
from __future__ import annotations

import math

from . import kernels
from .core import (
    CompressedState,
    DenseState,
    DimensionMismatch,
    GroverError,
    OracleMismatch,
    OracleSpec,
    SearchOutcome,
    TableConstants,
    category_masses,
    table_constants,
)
from .termination import TerminationPolicy, TerminationState, block_pop, evaluate
from .trace import TraceRow

import numpy as np


def h_block(n: int, m: int) -> CompressedState:
    """Superposition block: both categories at 2^(-(n+1)/2), zero iterations."""
    hc = table_constants(n).hc
    return CompressedState(n=n, m=m, vx=hc, va=hc, vi=0)


def ud_step(state: CompressedState, consts: TableConstants) -> CompressedState:
    """One full Grover iteration: oracle sign-flip, then inversion about
    the mean, collapsed to category arithmetic."""
    if consts.n != state.n:
        raise DimensionMismatch(
            f"table constants are for n={consts.n}, state has n={state.n}"
        )
    vx, va = kernels.ud_steps(state.n, state.m, state.vx, state.va, 1)
    return CompressedState(n=state.n, m=state.m, vx=vx, va=va, vi=state.vi + 1)


def expand(state: CompressedState, oracle: OracleSpec) -> DenseState:
    """Materialize the full vector: vx on marked odd components, va on
    unmarked odd components, each even component the negated partner."""
    if oracle.n != state.n or oracle.m != state.m:
        raise OracleMismatch(
            f"oracle (n={oracle.n}, m={oracle.m}) does not match "
            f"state (n={state.n}, m={state.m})"
        )
    odd = np.full(1 << state.n, state.va)
    odd[oracle.marked_array()] = state.vx
    amps = np.empty(1 << (state.n + 1))
    amps[1::2] = odd
    amps[0::2] = -odd
    return DenseState(n=state.n, amps=amps)


def _entropy_values(n: int, m: int, vx: float, va: float) -> float:
    # -sum p*log2(p) grouped by category: mass * log2(amp^2), with the
    # 0*log(0) terms dropped
    mass_x, mass_a = category_masses(n, m, vx, va)
    h = 0.0
    if mass_x > 0.0 and vx != 0.0:
        h -= mass_x * (2.0 * math.log2(abs(vx)))
    if mass_a > 0.0 and va != 0.0:
        h -= mass_a * (2.0 * math.log2(abs(va)))
    return h


def entropy_compressed(state: CompressedState) -> float:
    """Shannon entropy in bits, from the two category amplitudes alone."""
    return _entropy_values(state.n, state.m, state.vx, state.va)


def measure_compressed(state: CompressedState) -> SearchOutcome:
    """Final measurement: the search succeeded iff the marked-category
    amplitude strictly dominates (a tie counts as failure)."""
    mass_x, _ = category_masses(state.n, state.m, state.vx, state.va)
    return SearchOutcome(
        success=abs(state.vx) > abs(state.va),
        p_success=mass_x,
        iterations=state.vi,
        entropy_bits=entropy_compressed(state),
    )


def run_compressed(
    oracle: OracleSpec,
    policy: TerminationPolicy,
    trace_stride: int | None = 1,
    record_entropy: bool | None = None,
) -> tuple[SearchOutcome, list[TraceRow]]:
    """Superpose, then iterate the quantum step until the policy stops.

    Tracing is optional (trace_stride=None keeps memory constant no matter
    how many iterations run); models 1-3 dispatch to the bulk kernels when
    their per-step decisions do not need Python.
    """
    n = oracle.n
    m = oracle.m
    if trace_stride is not None and trace_stride < 1:
        raise GroverError(f"trace_stride must be >= 1, got {trace_stride}")
    if record_entropy is None:
        record_entropy = policy.needs_entropy
    hc = table_constants(n).hc

    rows: list[TraceRow] = []
    tracing = trace_stride is not None

    def sample(vi: int, vx: float, va: float) -> None:
        mass_x, _ = category_masses(n, m, vx, va)
        rows.append(
            TraceRow(
                iter=vi,
                vx=vx,
                va=va,
                p_success=mass_x,
                entropy_bits=_entropy_values(n, m, vx, va) if record_entropy else None,
            )
        )

    vx = hc
    va = hc
    vi = 0
    if tracing:
        sample(0, vx, va)

    if policy.model == "m1":
        total = policy.max_iterations
        if tracing:
            while vi < total:
                chunk = min(trace_stride, total - vi)
                vx, va = kernels.ud_steps(n, m, vx, va, chunk)
                vi += chunk
                sample(vi, vx, va)
        else:
            vx, va = kernels.ud_steps(n, m, vx, va, total)
            vi = total
    elif policy.model == "m2" and not tracing:
        vx, va, vi, mvx, mva, mvi, _ = kernels.run_until_turnover(
            n, m, vx, va, 0, 0.0, 0.0, 0, 0
        )
        vx, va, vi = _restore(hc, mvx, mva, mvi)
    elif policy.model == "m3" and not tracing:
        vx, va, vi, mvx, mva, mvi = kernels.best_of_steps(
            n, m, vx, va, 0, 0.0, 0.0, 0, policy.max_iterations
        )
        tstate = TerminationState(mvx=mvx, mva=mva, mvi=mvi)
        rvx, rva, rvi, restored = block_pop(vx, va, vi, tstate)
        if restored:
            vx, va, vi = _restore(hc, rvx, rva, rvi)
    else:
        tstate = TerminationState()
        last_sampled = 0
        while True:
            vx, va = kernels.ud_steps(n, m, vx, va, 1)
            vi += 1
            if tracing and vi % trace_stride == 0:
                sample(vi, vx, va)
                last_sampled = vi
            decision, rvx, rva, rvi = evaluate(
                policy, vx, va, vi, tstate,
                lambda: _entropy_values(n, m, vx, va),
            )
            if decision.stop:
                if tracing and last_sampled != vi:
                    sample(vi, vx, va)
                if decision.restored:
                    vx, va, vi = _restore(hc, rvx, rva, rvi)
                break

    outcome = measure_compressed(CompressedState(n=n, m=m, vx=vx, va=va, vi=vi))
    return outcome, rows


def _restore(hc: float, rvx: float, rva: float, rvi: int) -> tuple[float, float, int]:
    # a rewind before any successful save points at the post-superposition
    # state, not at the zeroed registers
    if rvx == 0.0 and rva == 0.0 and rvi == 0:
        return hc, hc, 0
    return rvx, rva, rvi
