"""Shared Grover iteration loop for the vector-state engines.

The dense and compute-on-demand engines differ only in how they apply the
oracle and diffusion operators; the trace sampling, category extraction,
and stop-rule wiring live here so every engine emits identical rows.

Category convention: in any reachable state the even-index component of a
pair carries the same value as the compressed engine's (vx, va) registers
(the odd component is its exact negation), so traces line up across
engines without sign fixups.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .core import GroverError, OracleSpec, SearchOutcome
from .termination import TerminationPolicy, TerminationState, evaluate
from .trace import TraceRow


def first_unmarked(oracle: OracleSpec) -> int:
    x = 0
    for idx in oracle.marked:
        if idx != x:
            break
        x += 1
    return x


def marked_mass(amps: np.ndarray, oracle: OracleSpec) -> float:
    """Probability of measuring any marked input index."""
    sq = amps * amps
    pairs = sq[0::2] + sq[1::2]
    return float(pairs[oracle.marked_array()].sum())


def rebuild_from_categories(oracle: OracleSpec, vx: float, va: float) -> np.ndarray:
    """Reconstruct the full vector a stop-rule rewind points at."""
    cats = np.full(1 << oracle.n, va)
    cats[oracle.marked_array()] = vx
    amps = np.empty(1 << (oracle.n + 1))
    amps[0::2] = cats
    amps[1::2] = -cats
    return amps


def run_vector_search(
    oracle: OracleSpec,
    policy: TerminationPolicy,
    amps0: np.ndarray,
    apply_oracle: Callable[[np.ndarray], np.ndarray],
    apply_diffusion: Callable[[np.ndarray], np.ndarray],
    entropy_of: Callable[[np.ndarray], float],
    trace_stride: int | None,
    record_entropy: bool | None,
) -> tuple[SearchOutcome, list[TraceRow]]:
    """Iterate (oracle, diffusion) on `amps0` until the policy stops.

    `amps0` is the post-superposition state (iteration 0).  Trace rows are
    live states sampled every `trace_stride` iterations (None disables
    tracing); the row for the last executed iteration is always included.
    A rewinding stop only affects the returned outcome, never the rows.
    """
    if trace_stride is not None and trace_stride < 1:
        raise GroverError(f"trace_stride must be >= 1, got {trace_stride}")
    if record_entropy is None:
        record_entropy = policy.needs_entropy
    ix = 2 * oracle.marked[0]
    ia = 2 * first_unmarked(oracle)

    rows: list[TraceRow] = []

    def sample(vi: int, amps: np.ndarray) -> None:
        rows.append(
            TraceRow(
                iter=vi,
                vx=float(amps[ix]),
                va=float(amps[ia]),
                p_success=marked_mass(amps, oracle),
                entropy_bits=entropy_of(amps) if record_entropy else None,
            )
        )

    amps = amps0
    vi = 0
    if trace_stride is not None:
        sample(0, amps)
    last_sampled = 0

    tstate = TerminationState()
    while True:
        amps = apply_diffusion(apply_oracle(amps))
        vi += 1
        if trace_stride is not None and vi % trace_stride == 0:
            sample(vi, amps)
            last_sampled = vi
        decision, rvx, rva, rvi = evaluate(
            policy,
            float(amps[ix]),
            float(amps[ia]),
            vi,
            tstate,
            lambda: entropy_of(amps),
        )
        if decision.stop:
            if trace_stride is not None and last_sampled != vi:
                sample(vi, amps)
            if decision.restored:
                if rvx == 0.0 and rva == 0.0 and rvi == 0:
                    # rewind before any successful save: the best state seen
                    # is the post-superposition one
                    amps = amps0
                    vi = 0
                else:
                    amps = rebuild_from_categories(oracle, rvx, rva)
                    vi = rvi
            break

    vx = float(amps[ix])
    va = float(amps[ia])
    outcome = SearchOutcome(
        success=abs(vx) > abs(va),
        p_success=marked_mass(amps, oracle),
        iterations=vi,
        entropy_bits=entropy_of(amps),
    )
    return outcome, rows
