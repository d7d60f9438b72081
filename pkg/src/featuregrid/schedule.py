"""Warm-restart cosine learning-rate schedule as a pure function of time.

A run is a sequence of cycles; within a cycle of length T the rate anneals
from ``eta_max`` down to ``eta_min`` following a half cosine, and each restart
multiplies the cycle length by ``cycle_mult``.  Time is a real number of
epochs so per-iteration callers can interpolate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ScheduleParams:
    eta_max: float
    eta_min: float
    first_cycle: int
    cycle_mult: int
    total_epochs: int

    def __post_init__(self) -> None:
        if not 0.0 < self.eta_min < self.eta_max:
            raise ValueError(
                f"need 0 < eta_min < eta_max, got {self.eta_min} and {self.eta_max}"
            )
        if self.first_cycle < 1:
            raise ValueError("first_cycle must be >= 1")
        if self.cycle_mult < 1:
            raise ValueError("cycle_mult must be >= 1")
        if self.total_epochs < 1:
            raise ValueError("total_epochs must be >= 1")


def _cycle_at(params: ScheduleParams, t: float) -> tuple[float, float]:
    """(start, length) of the cycle covering time ``t``.

    A boundary instant belongs to the cycle it starts, except the final
    instant of the run, which belongs to the cycle it ends.
    """
    start = 0.0
    length = float(params.first_cycle)
    while t > start + length or (t == start + length and t < params.total_epochs):
        start += length
        length *= params.cycle_mult
    return start, length


def _anneal(params: ScheduleParams, position: float, length: float) -> float:
    """Cosine value inside one cycle; exact at both cycle endpoints."""
    if position == 0.0:
        return params.eta_max
    if position == length:
        return params.eta_min
    span = params.eta_max - params.eta_min
    return params.eta_min + 0.5 * span * (1.0 + math.cos(math.pi * position / length))


def lr_at(params: ScheduleParams, t: float) -> float:
    """Learning rate after ``t`` epochs.

    Exactly ``eta_max`` at each cycle start and exactly ``eta_min`` at the
    final instant of the run; restart boundaries inside the run belong to the
    cycle they start.
    """
    if not math.isfinite(t) or t < 0 or t > params.total_epochs:
        raise ValueError(f"t={t} outside [0, {params.total_epochs}]")
    start, length = _cycle_at(params, t)
    return _anneal(params, t - start, length)


def restart_boundaries(params: ScheduleParams) -> list[int]:
    """Cumulative cycle end epochs, up to and including ``total_epochs``."""
    boundaries = []
    end = 0
    length = params.first_cycle
    while end + length <= params.total_epochs:
        end += length
        boundaries.append(end)
        length *= params.cycle_mult
    return boundaries


def epoch_table(params: ScheduleParams) -> list[tuple[int, float, float]]:
    """(epoch, rate at epoch start, rate approached by epoch end) per epoch.

    The end-of-epoch rate is evaluated inside the epoch's own cycle, so the
    last epoch of a cycle reports exactly ``eta_min``.
    """
    rows = []
    for epoch in range(params.total_epochs):
        start, length = _cycle_at(params, float(epoch))
        begin = _anneal(params, epoch - start, length)
        end = _anneal(params, min(epoch + 1 - start, length), length)
        rows.append((epoch, begin, end))
    return rows
