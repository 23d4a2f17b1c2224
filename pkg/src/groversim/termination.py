"""Stop rules for the Grover iteration loop.

Five models, assembled from four primitive blocks:

  A     stop once a maximum iteration count is reached
  D     stop once the Shannon entropy falls to an acceptable level
  PUSH  record the best (largest |vx|) state seen so far
  POP   rewind the live state to the recorded best

  m1  A alone: run a fixed number of iterations.
  m2  PUSH until the first non-improvement, then POP: stop on the first
      local optimum, using amplitudes directly (no entropy evaluation).
  m3  best state within a fixed number of iterations (A + PUSH, POP at
      the end).
  m4  D alone: run until the entropy is at or below a threshold.
  m5  m3 with an early exit when the entropy threshold is reached.

The same evaluator drives every engine; it sees only the two category
amplitudes (vx marked, va unmarked), the iteration counter, and a lazy
entropy thunk that models 1-3 never invoke.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .core import PolicyParameterMissing

MODELS = ("m1", "m2", "m3", "m4", "m5")

_NEEDS_MAX = ("m1", "m3", "m5")
_NEEDS_THRESHOLD = ("m4", "m5")


@dataclass(frozen=True)
class TerminationPolicy:
    """One of the five stop-rule models plus its parameters."""

    model: str
    max_iterations: int | None = None
    entropy_threshold: float | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise PolicyParameterMissing(
                f"unknown termination model {self.model!r}; expected one of {MODELS}"
            )
        if self.model in _NEEDS_MAX:
            if self.max_iterations is None or self.max_iterations < 1:
                raise PolicyParameterMissing(
                    f"model {self.model} requires max_iterations >= 1"
                )
        if self.model in _NEEDS_THRESHOLD:
            if self.entropy_threshold is None or self.entropy_threshold < 0:
                raise PolicyParameterMissing(
                    f"model {self.model} requires entropy_threshold >= 0"
                )

    @property
    def needs_entropy(self) -> bool:
        return self.model in _NEEDS_THRESHOLD


@dataclass
class TerminationState:
    """Best-so-far registers for the PUSH/POP blocks.

    Starts at zero so the first PUSH of any nonzero amplitude succeeds.
    """

    mvx: float = 0.0
    mva: float = 0.0
    mvi: int = 0


@dataclass(frozen=True)
class StepDecision:
    """Evaluator verdict: keep iterating or stop, and whether POP rewound
    the live state to the stored best."""

    stop: bool
    restored: bool = False

    def __post_init__(self):
        if self.restored and not self.stop:
            raise ValueError("a restored decision must also stop")


def block_a(vi: int, max_iterations: int) -> bool:
    """Iteration-budget test: True means stop."""
    return vi >= max_iterations


def block_push(vx: float, va: float, vi: int, tstate: TerminationState) -> bool:
    """Record (vx, va, vi) as the new best iff |vx| strictly improved."""
    if abs(vx) > abs(tstate.mvx):
        tstate.mvx = vx
        tstate.mva = va
        tstate.mvi = vi
        return True
    return False


def block_pop(
    vx: float, va: float, vi: int, tstate: TerminationState
) -> tuple[float, float, int, bool]:
    """Rewind to the stored best unless the live state already beats it.

    Returns the (possibly restored) amplitudes and iteration counter plus
    a flag saying whether the rewind happened.
    """
    if abs(vx) <= abs(tstate.mvx):
        return tstate.mvx, tstate.mva, tstate.mvi, True
    return vx, va, vi, False


def block_d(entropy_bits: float, threshold: float) -> bool:
    """Entropy-level test: True (stop) once entropy <= threshold."""
    return entropy_bits <= threshold


_policy_entropy_evals = 0


def policy_entropy_eval_count() -> int:
    """How many per-step entropy evaluations termination logic has requested."""
    return _policy_entropy_evals


def reset_policy_entropy_eval_count() -> None:
    global _policy_entropy_evals
    _policy_entropy_evals = 0


def _entropy(entropy_fn: Callable[[], float]) -> float:
    global _policy_entropy_evals
    _policy_entropy_evals += 1
    return entropy_fn()


def evaluate(
    policy: TerminationPolicy,
    vx: float,
    va: float,
    vi: int,
    tstate: TerminationState,
    entropy_fn: Callable[[], float],
) -> tuple[StepDecision, float, float, int]:
    """Evaluate the policy after one completed Grover iteration.

    Returns the decision and the live (vx, va, vi), rewritten when POP
    restored the stored best.  Must be called exactly once per iteration,
    after the diffusion step.
    """
    model = policy.model
    if model == "m1":
        return StepDecision(stop=block_a(vi, policy.max_iterations)), vx, va, vi
    if model == "m2":
        if block_push(vx, va, vi, tstate):
            return StepDecision(stop=False), vx, va, vi
        vx, va, vi, restored = block_pop(vx, va, vi, tstate)
        return StepDecision(stop=True, restored=restored), vx, va, vi
    if model == "m3":
        if block_a(vi, policy.max_iterations):
            vx, va, vi, restored = block_pop(vx, va, vi, tstate)
            return StepDecision(stop=True, restored=restored), vx, va, vi
        block_push(vx, va, vi, tstate)
        return StepDecision(stop=False), vx, va, vi
    if model == "m4":
        stop = block_d(_entropy(entropy_fn), policy.entropy_threshold)
        return StepDecision(stop=stop), vx, va, vi
    # m5: budget test, then entropy acceptance, then best-so-far tracking
    if block_a(vi, policy.max_iterations):
        vx, va, vi, restored = block_pop(vx, va, vi, tstate)
        return StepDecision(stop=True, restored=restored), vx, va, vi
    if block_d(_entropy(entropy_fn), policy.entropy_threshold):
        return StepDecision(stop=True), vx, va, vi
    block_push(vx, va, vi, tstate)
    return StepDecision(stop=False), vx, va, vi


def theoretical_iterations(n: int, m: int) -> int:
    """Closed-form optimum iteration count round((pi/4)*sqrt(2^n/m) - 1/2).

    This is the integer maximizer of the marked-category amplitude, i.e.
    where model 2 stops for non-degenerate (n, m).
    """
    if m < 1 or m >= (1 << n):
        raise PolicyParameterMissing(f"m must be in [1, 2^{n} - 1], got {m}")
    # sqrt(2^n / m) without forming 2^n (overflows a double past n = 1023)
    root = math.ldexp(math.sqrt(1.0 / m), n // 2)
    if n % 2:
        root *= math.sqrt(2.0)
    return round((math.pi / 4.0) * root - 0.5)


def parse_policy(spec: str) -> TerminationPolicy:
    """Parse a policy spec string.

    Grammar: ``m1:max=<int>``, ``m2``, ``m3:max=<int>``, ``m4:ent=<float>``,
    ``m5:max=<int>,ent=<float>``.
    """
    head, sep, rest = spec.strip().lower().partition(":")
    if head not in MODELS:
        raise PolicyParameterMissing(
            f"unknown termination model {head!r}; expected one of {MODELS}"
        )
    max_iterations = None
    entropy_threshold = None
    if sep:
        for item in rest.split(","):
            item = item.strip()
            if not item:
                continue
            key, eq, value = item.partition("=")
            key = key.strip()
            if not eq:
                raise PolicyParameterMissing(f"expected key=value in policy, got {item!r}")
            try:
                if key == "max":
                    max_iterations = int(value)
                elif key == "ent":
                    entropy_threshold = float(value)
                else:
                    raise PolicyParameterMissing(
                        f"unknown policy parameter {key!r} (expected 'max' or 'ent')"
                    )
            except ValueError:
                raise PolicyParameterMissing(
                    f"bad value for policy parameter {key!r}: {value!r}"
                ) from None
    return TerminationPolicy(
        model=head, max_iterations=max_iterations, entropy_threshold=entropy_threshold
    )


def format_policy(policy: TerminationPolicy) -> str:
    """Inverse of :func:`parse_policy`."""
    parts = []
    if policy.max_iterations is not None:
        parts.append(f"max={policy.max_iterations}")
    if policy.entropy_threshold is not None:
        parts.append(f"ent={policy.entropy_threshold:g}")
    return policy.model + (":" + ",".join(parts) if parts else "")
