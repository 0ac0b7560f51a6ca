"""Wait/go decision rules: the expected-saving policy and the benchmarks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

WAIT = 0
GO = 1
POLICY_KINDS = ("learn", "wait", "go", "random", "oracle")


class DecisionInputs(NamedTuple):
    """``p_hat`` is None (or NaN) when nothing is known yet."""

    p_hat: float | None
    penalty: float
    procT: float


def expected_saving(c: int, inputs: DecisionInputs) -> float:
    """Expected seconds saved by choosing ``c`` (0 = wait, 1 = go).

    Waiting avoids the turn-back penalty when an event occurs; going saves
    the processing time when none does.
    """
    p = inputs.p_hat
    if c == WAIT:
        return p * inputs.penalty
    if c == GO:
        return (1.0 - p) * inputs.procT
    raise ValueError(f"decision must be 0 or 1, got {c}")


def indifference_prob(penalty: float, procT: float) -> float:
    """Probability at which waiting and going save the same time."""
    return procT / (procT + penalty)


@dataclass
class Policy:
    kind: str
    seed: int = 0
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy {self.kind!r}; expected one of {POLICY_KINDS}")
        self._rng = np.random.default_rng(self.seed)

    @property
    def uses_estimate(self) -> bool:
        return self.kind in ("learn", "oracle")


def decide(policy: Policy, inputs: DecisionInputs) -> int:
    kind = policy.kind
    if kind == "wait":
        return WAIT
    if kind == "go":
        return GO
    if kind == "random":
        return int(policy._rng.integers(2))
    p = inputs.p_hat
    if p is None or math.isnan(p):
        # no experience yet: behave like the Wait policy
        return WAIT
    return GO if expected_saving(GO, inputs) > expected_saving(WAIT, inputs) else WAIT
