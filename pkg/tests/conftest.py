"""Shared reference constructions for the test suite.

These are deliberately independent of the engine code paths they check:
operators come from recursive block replication / truth tables / Kronecker
products, and amplitude dynamics from the closed-form rotation angle.
"""
from __future__ import annotations

import math

import numpy as np
import pytest

from groversim.core import OracleSpec, half_power


def ref_hadamard_signs(k: int) -> np.ndarray:
    """Sign pattern of the k-fold Walsh-Hadamard operator by the recursive
    two-by-two block replication (exact integers)."""
    s = np.array([[1]], dtype=np.int64)
    for _ in range(k):
        s = np.block([[s, s], [s, -s]])
    return s


def ref_superposition(n: int) -> np.ndarray:
    return half_power(n + 1) * ref_hadamard_signs(n + 1)


def ref_entanglement(oracle: OracleSpec) -> np.ndarray:
    """Permutation matrix straight from the reversible truth table
    (x, y) -> (x, f(x) XOR y)."""
    dim = 1 << (oracle.n + 1)
    marked = set(oracle.marked)
    out = np.zeros((dim, dim))
    for x in range(1 << oracle.n):
        fx = 1 if x in marked else 0
        for y in (0, 1):
            src = (x << 1) | y
            dst = (x << 1) | (fx ^ y)
            out[dst, src] = 1.0
    return out


def ref_interference(n: int) -> np.ndarray:
    """Kronecker product of the diffusion definition (2/2^n - identity)
    with the 2x2 identity."""
    size = 1 << n
    d = np.full((size, size), 2.0 / size)
    np.fill_diagonal(d, 2.0 / size - 1.0)
    return np.kron(d, np.eye(2))


def ref_gate_run(oracle: OracleSpec, iterations: int) -> np.ndarray:
    """Brute-force state after `iterations` rounds, by plain matrix
    products of the reference operators on |0...01>."""
    dim = 1 << (oracle.n + 1)
    state = np.zeros(dim)
    state[1] = 1.0
    state = ref_superposition(oracle.n) @ state
    uf = ref_entanglement(oracle)
    intf = ref_interference(oracle.n)
    for _ in range(iterations):
        state = intf @ (uf @ state)
    return state


def sine_amplitudes(n: int, m: int, k: int) -> tuple[float, float]:
    """Closed-form category amplitudes after k iterations: the state lives
    in a 2-D invariant subspace rotated by 2*asin(sqrt(m/2^n)) per round."""
    size = float(1 << n)
    theta = math.asin(math.sqrt(m / size))
    vx = math.sin((2 * k + 1) * theta) / math.sqrt(2 * m)
    va = math.cos((2 * k + 1) * theta) / math.sqrt(2 * (size - m))
    return vx, va


def ref_entropy(amps: np.ndarray) -> float:
    p = amps * amps
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def random_unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim)
    return v / math.sqrt(float(v @ v))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
