"""Solver result and trace records."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class TraceEntry:
    """One solver step: phase, objective value, and active-set change."""

    iteration: int
    phase: str                  # 'search', 'update', 'init'
    z: float
    support: tuple
    kind: str = ""              # 'ray', 'hyperbola', 'ellipse', 'parabola', ...
    entering: int | None = None
    leaving: int | None = None
    alpha: float = 0.0


@dataclass
class SolveResult:
    """Outcome of a solver run.

    status: 'optimal' when a certified stationary covering was reached,
    'iteration_limit' when the step cap was hit first.
    """

    status: str
    center: np.ndarray
    radius: float
    support: tuple
    iterations: int
    algorithm: str
    trace: list = field(default_factory=list)
