"""Pure-Python kernels: reference twins of the compiled extension.

Every function here has a bit-identical counterpart in ``_kernels.pyx``.
The floating-point evaluation order is part of the contract (the
compressed quantum step uses exact exponent shifts, ldexp, so the same
recurrence runs unchanged from 1 to 2040 input qubits), so do not
"simplify" the arithmetic in one twin without the other.
"""
from __future__ import annotations

import math

import numpy as np

from .core import half_power

COMPILED = False

_U64_SHIFTS = tuple(np.uint64(s) for s in (32, 16, 8, 4, 2, 1))
_U64_ONE = np.uint64(1)


def ud_steps(n: int, m: int, vx: float, va: float, steps: int) -> tuple[float, float]:
    """Advance the two-amplitude state by `steps` Grover iterations."""
    shift_up = n
    shift_down = 1 - n
    for _ in range(steps):
        u = -vx
        s = m * (u - va) + math.ldexp(va, shift_up)
        mean2 = math.ldexp(s, shift_down)
        vx = mean2 - u
        va = mean2 - va
    return vx, va


def best_of_steps(
    n: int,
    m: int,
    vx: float,
    va: float,
    vi: int,
    mvx: float,
    mva: float,
    mvi: int,
    steps: int,
) -> tuple[float, float, int, float, float, int]:
    """Advance `steps` iterations while tracking the best |vx| seen."""
    shift_up = n
    shift_down = 1 - n
    for _ in range(steps):
        u = -vx
        s = m * (u - va) + math.ldexp(va, shift_up)
        mean2 = math.ldexp(s, shift_down)
        vx = mean2 - u
        va = mean2 - va
        vi += 1
        if abs(vx) > abs(mvx):
            mvx, mva, mvi = vx, va, vi
    return vx, va, vi, mvx, mva, mvi


def run_until_turnover(
    n: int,
    m: int,
    vx: float,
    va: float,
    vi: int,
    mvx: float,
    mva: float,
    mvi: int,
    max_steps: int,
) -> tuple[float, float, int, float, float, int, bool]:
    """Iterate until |vx| first fails to improve on the stored best.

    Returns the live state, the best-so-far registers, and whether the
    turnover was actually detected (False only if `max_steps` > 0 ran out).
    """
    shift_up = n
    shift_down = 1 - n
    executed = 0
    while max_steps <= 0 or executed < max_steps:
        u = -vx
        s = m * (u - va) + math.ldexp(va, shift_up)
        mean2 = math.ldexp(s, shift_down)
        vx = mean2 - u
        va = mean2 - va
        vi += 1
        executed += 1
        if abs(vx) > abs(mvx):
            mvx, mva, mvi = vx, va, vi
        else:
            return vx, va, vi, mvx, mva, mvi, True
    return vx, va, vi, mvx, mva, mvi, False


def _parity_of_and(i: int, j: np.ndarray) -> np.ndarray:
    """Parity of popcount(i & j) for a whole row, via xor-fold."""
    v = np.uint64(i) & j
    for s in _U64_SHIFTS:
        v ^= v >> s
    return v & _U64_ONE


def apply_sp_on_demand(x: np.ndarray, n: int) -> np.ndarray:
    """Walsh-Hadamard product, one element-rule row at a time."""
    dim = 1 << (n + 1)
    hc = half_power(n + 1)
    cols = np.arange(dim, dtype=np.uint64)
    y = np.empty(dim)
    for i in range(dim):
        signs = 1.0 - 2.0 * _parity_of_and(i, cols).astype(np.float64)
        y[i] = hc * float(signs @ x)
    return y


def apply_ent_on_demand(x: np.ndarray, marked_mask: np.ndarray, n: int) -> np.ndarray:
    """Oracle permutation product from the element rule.

    Each row has a single unit entry, so the row sum collapses exactly to
    one gathered amplitude (the zero terms contribute exactly 0.0).
    """
    y = x.copy()
    pairs = y.reshape(-1, 2)
    hit = marked_mask.astype(bool)
    pairs[hit] = pairs[hit, ::-1]
    return y


def apply_int_on_demand(x: np.ndarray, n: int) -> np.ndarray:
    """Diffusion product with rows built from the element rule."""
    dim = 1 << (n + 1)
    dc2 = math.ldexp(1.0, 1 - n)
    dc1 = dc2 - 1.0
    y = np.empty(dim)
    row = np.zeros(dim)
    for i in range(dim):
        b = i & 1
        row[b::2] = dc2
        row[i] = dc1
        y[i] = float(row @ x)
        row[b::2] = 0.0
    return y
