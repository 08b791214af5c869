"""The upper transition operator and the expected-time-average recursions.

For a transition model with row sets ``M_x``, the upper transition operator
maps a gamble ``h`` to the gamble ``x -> sup { p . h : p in M_x }``; its
conjugate (the lower transition operator) is obtained by negation.  Marginal
upper expectations ``k`` steps ahead are iterates of this operator, and upper
expected time averages follow the incremental recursion

    m_1 = f,    m_k = f + (upper operator applied to m_{k-1}),

whose normalized value ``m_k / k`` is the upper expected average of ``f``
over the first ``k`` time points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import Gamble, TransitionModel, _as_values


@dataclass(frozen=True)
class AverageRecursionState:
    """The average recursion after ``k`` steps: ``m_bar`` is ``m_tilde / k``."""

    f: Gamble
    k: int
    m_tilde: Gamble
    m_bar: Gamble


class UpperTransitionOperator:
    """Callable wrapper around a model's row-wise upper expectations."""

    __slots__ = ("model", "_cm")

    def __init__(self, model: TransitionModel):
        self.model = model
        self._cm = kernels.compile_model(model)

    @property
    def n(self) -> int:
        return self.model.n

    def _gamble(self, values: np.ndarray) -> Gamble:
        return Gamble(self.model.states, values)

    def apply_upper_values(self, values: np.ndarray) -> np.ndarray:
        return kernels.apply_upper(self._cm, _as_values(values, self.n))


def apply_upper(op: UpperTransitionOperator, h) -> Gamble:
    """One application of the upper transition operator."""
    return op._gamble(op.apply_upper_values(_as_values(h, op.n)))


def apply_lower(op: UpperTransitionOperator, h) -> Gamble:
    """One application of the conjugate lower transition operator."""
    # + 0.0 turns negative zeros into plain zeros
    return op._gamble(-op.apply_upper_values(-_as_values(h, op.n)) + 0.0)


def iterate_upper(op: UpperTransitionOperator, f, k: int) -> Gamble:
    """The k-fold iterate of the upper transition operator; k = 0 is the identity."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return op._gamble(kernels.run_iterate(op._cm, _as_values(f, op.n), k))


def iterate_lower(op: UpperTransitionOperator, f, k: int) -> Gamble:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return op._gamble(-kernels.run_iterate(op._cm, -_as_values(f, op.n), k) + 0.0)


def apply_topical(op: UpperTransitionOperator, f, h) -> Gamble:
    """One application of the topical map ``h -> f + (upper operator)(h)``."""
    fv = _as_values(f, op.n)
    return op._gamble(fv + op.apply_upper_values(_as_values(h, op.n)))


def average_recursion(op: UpperTransitionOperator, f, k: int) -> AverageRecursionState:
    """Run the average recursion for ``k`` steps (``k`` >= 1)."""
    if k < 1:
        raise ValueError("k must be positive")
    fv = _as_values(f, op.n)
    m_tilde = kernels.run_average(op._cm, fv, k)
    f_g = f if isinstance(f, Gamble) else op._gamble(fv)
    return AverageRecursionState(
        f=f_g, k=k, m_tilde=op._gamble(m_tilde), m_bar=op._gamble(m_tilde / k)
    )


def average_trace(op: UpperTransitionOperator, f, k_max: int) -> list[AverageRecursionState]:
    """States of the average recursion for every k = 1 .. k_max.

    Step ``k`` reuses the accumulator of step ``k - 1``, so the whole trace
    costs one recursion run.
    """
    if k_max < 1:
        raise ValueError("k_max must be positive")
    fv = _as_values(f, op.n)
    trace = np.empty((k_max, op.n))
    kernels.run_average(op._cm, fv, k_max, trace)
    f_g = f if isinstance(f, Gamble) else op._gamble(fv)
    return [
        AverageRecursionState(
            f=f_g,
            k=j + 1,
            m_tilde=op._gamble(trace[j]),
            m_bar=op._gamble(trace[j] / (j + 1)),
        )
        for j in range(k_max)
    ]
