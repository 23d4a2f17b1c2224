"""Problem specification, shared table constants, and state representations.

The search register holds n input qubits plus one output (ancilla) qubit.
Basis index convention: the ancilla is the least significant bit, so basis
index i = (x << 1) | y for input x and ancilla y.  All amplitudes are real.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

# Largest input-qubit count for which the two-amplitude state stays clear of
# the double-precision underflow floor (2^(-(n+1)/2) must remain normal).
MAX_QUBITS = 2040

DENSE_LIMIT_DEFAULT = 12
MATRIXFREE_FAST_LIMIT_DEFAULT = 20
MATRIXFREE_NAIVE_LIMIT_DEFAULT = 13


class GroverError(Exception):
    """Base class for all simulator errors."""


class EmptyMarkedSet(GroverError):
    pass


class IndexOutOfRange(GroverError):
    pass


class AllMarked(GroverError):
    pass


class QubitCountOutOfRange(GroverError):
    pass


class InvalidMarkedCount(GroverError):
    pass


class DenseLimitExceeded(GroverError):
    pass


class MatrixFreeLimitExceeded(GroverError):
    pass


class DimensionMismatch(GroverError):
    pass


class NotNormalized(GroverError):
    pass


class OracleMismatch(GroverError):
    pass


class PolicyParameterMissing(GroverError):
    pass


class OracleFileError(GroverError):
    pass


@dataclass(frozen=True)
class OracleSpec:
    """Search problem: n input qubits and the set of marked indices.

    ``marked`` is strictly increasing with all entries in [0, 2^n), and
    ``m == len(marked)``.  Construct through :func:`make_oracle`, which
    normalizes and validates.
    """

    n: int
    marked: tuple[int, ...]
    m: int

    def marked_array(self) -> np.ndarray:
        return np.asarray(self.marked, dtype=np.int64)


def make_oracle(n: int, marked) -> OracleSpec:
    """Build a validated oracle from a qubit count and marked-index list.

    Duplicates are dropped and indices sorted.  Rejects an empty set, any
    index outside [0, 2^n), and the degenerate all-marked case (the
    unmarked amplitude category would be empty).
    """
    if n < 1 or n > MAX_QUBITS:
        raise QubitCountOutOfRange(f"n must be in [1, {MAX_QUBITS}], got {n}")
    items = sorted(set(int(x) for x in marked))
    if not items:
        raise EmptyMarkedSet("at least one marked index is required")
    size = 1 << n
    if items[0] < 0 or items[-1] >= size:
        bad = items[0] if items[0] < 0 else items[-1]
        raise IndexOutOfRange(f"marked index {bad} outside [0, {size})")
    if len(items) == size:
        raise AllMarked("all basis states marked; search problem is degenerate")
    return OracleSpec(n=n, marked=tuple(items), m=len(items))


def f_eval(oracle: OracleSpec, x: int) -> int:
    """The search predicate: 1 iff x is a marked index."""
    if x < 0 or x >= (1 << oracle.n):
        raise IndexOutOfRange(f"x={x} outside [0, 2^{oracle.n})")
    pos = bisect.bisect_left(oracle.marked, x)
    return 1 if pos < oracle.m and oracle.marked[pos] == x else 0


@dataclass(frozen=True)
class TableConstants:
    """Precomputed constants shared by the element algorithms and the
    compressed quantum step.

    hc  = 2^(-(n+1)/2)   uniform-superposition amplitude
    dc1 = 2^(1-n) - 1    diffusion diagonal
    dc2 = 2^(1-n)        diffusion off-diagonal

    For n > 1074 dc2 underflows to 0.0 (and dc1 rounds to -1.0); the
    compressed step avoids both by scaling with exact exponent shifts.
    """

    n: int
    hc: float
    dc1: float
    dc2: float


def table_constants(n: int) -> TableConstants:
    """Exact binary-power table values for an n-input search."""
    if n < 1 or n > MAX_QUBITS:
        raise QubitCountOutOfRange(f"n must be in [1, {MAX_QUBITS}], got {n}")
    hc = half_power(n + 1)
    dc2 = math.ldexp(1.0, 1 - n)
    return TableConstants(n=n, hc=hc, dc1=dc2 - 1.0, dc2=dc2)


def half_power(k: int) -> float:
    """2^(-k/2), computed exactly up to one correctly-rounded sqrt."""
    if k % 2 == 0:
        return math.ldexp(1.0, -(k // 2))
    return math.ldexp(math.sqrt(0.5), -(k // 2))


@dataclass(frozen=True)
class DenseState:
    """Full real amplitude vector over the 2^(n+1) basis states."""

    n: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amps, dtype=np.float64)
        object.__setattr__(self, "amps", amps)
        if amps.shape != (1 << (self.n + 1),):
            raise DimensionMismatch(
                f"expected {1 << (self.n + 1)} amplitudes for n={self.n}, "
                f"got shape {amps.shape}"
            )
        norm = float(np.dot(amps, amps))
        if abs(norm - 1.0) > 1e-10:
            raise NotNormalized(f"sum of squared amplitudes is {norm!r}")
        self.amps.flags.writeable = False

    @property
    def dim(self) -> int:
        return 1 << (self.n + 1)


def basis_state(n: int, index: int) -> DenseState:
    """Unit vector on one basis state of the (n+1)-qubit register."""
    dim = 1 << (n + 1)
    if index < 0 or index >= dim:
        raise IndexOutOfRange(f"basis index {index} outside [0, {dim})")
    amps = np.zeros(dim)
    amps[index] = 1.0
    return DenseState(n=n, amps=amps)


def initial_state(n: int) -> DenseState:
    """The canonical search input |0...01> (ancilla set, inputs clear)."""
    return basis_state(n, 1)


@dataclass(frozen=True)
class CompressedState:
    """Two-amplitude representation of a search state.

    vx is the amplitude shared by every odd-index marked component, va the
    one shared by every odd-index unmarked component; each even component
    mirrors its odd partner with opposite sign and is never stored.  vi
    counts completed Grover iterations.
    """

    n: int
    m: int
    vx: float
    va: float
    vi: int

    def __post_init__(self):
        if self.n < 1 or self.n > MAX_QUBITS:
            raise QubitCountOutOfRange(f"n must be in [1, {MAX_QUBITS}], got {self.n}")
        if self.m < 1 or self.m > (1 << self.n) - 1:
            raise InvalidMarkedCount(
                f"m must be in [1, 2^{self.n} - 1], got {self.m}"
            )
        if self.vi < 0:
            raise GroverError(f"iteration counter must be non-negative, got {self.vi}")


def category_masses(n: int, m: int, vx: float, va: float) -> tuple[float, float]:
    """Probability mass on the marked (2m components) and unmarked
    (2*(2^n - m) components) categories.

    The unmarked amplitude is rescaled before squaring so the mass stays
    finite out to n = 2040, where va*va itself would underflow.
    """
    shift = (n + 1) // 2
    va_s = math.ldexp(va, shift)
    mass_a = math.ldexp(va_s * va_s, (n + 1) - 2 * shift) - 2.0 * m * (va * va)
    return 2.0 * m * (vx * vx), mass_a


def compressed_norm(state: CompressedState) -> float:
    """Total probability 2*m*vx^2 + 2*(2^n - m)*va^2, safe for huge n."""
    mass_x, mass_a = category_masses(state.n, state.m, state.vx, state.va)
    return mass_x + mass_a


@dataclass(frozen=True)
class SearchOutcome:
    """Result of a completed search run.

    success follows the final-measurement rule |vx| > |va| (strict, so an
    exact tie counts as failure); p_success is the probability mass on
    marked basis states.
    """

    success: bool
    p_success: float
    iterations: int
    entropy_bits: float


def parse_oracle_text(text: str) -> OracleSpec:
    """Parse the two-line oracle format::

        n=<int>
        marked=<comma-separated decimal indices>

    Whitespace around tokens is ignored.
    """
    fields: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise OracleFileError(f"expected key=value, got {line!r}")
        fields[key.strip().lower()] = value.strip()
    if "n" not in fields:
        raise OracleFileError("missing 'n=' line")
    if "marked" not in fields:
        raise OracleFileError("missing 'marked=' line")
    try:
        n = int(fields["n"])
    except ValueError:
        raise OracleFileError(f"n is not an integer: {fields['n']!r}") from None
    try:
        marked = [int(tok) for tok in fields["marked"].split(",") if tok.strip()]
    except ValueError:
        raise OracleFileError(
            f"marked is not a comma-separated integer list: {fields['marked']!r}"
        ) from None
    return make_oracle(n, marked)


def load_oracle_file(path) -> OracleSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_oracle_text(fh.read())
