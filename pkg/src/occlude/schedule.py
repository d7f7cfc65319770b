"""Semantic density schedules over denoising steps ``t = T, T-1, ..., 1``."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import ConfigError, RangeError


class ScheduleKind(str, Enum):
    INVERSE_PROPORTIONAL = "inverse_proportional"
    FIXED_OPAQUE = "fixed_opaque"
    FIXED_DENSITY = "fixed_density"


@dataclass(frozen=True)
class DensitySchedule:
    density: float
    steps: int
    kind: ScheduleKind = ScheduleKind.INVERSE_PROPORTIONAL

    def __post_init__(self):
        try:
            kind = ScheduleKind(self.kind)
        except ValueError:
            names = [k.value for k in ScheduleKind]
            raise ConfigError(f"unknown schedule kind {self.kind!r}; expected one of {names}") from None
        object.__setattr__(self, "kind", kind)
        if not (isinstance(self.steps, (int, np.integer)) and self.steps >= 1):
            raise ConfigError(f"steps must be an integer >= 1, got {self.steps!r}")
        if not float(self.density) >= 0.0:
            raise ConfigError(f"density must be >= 0, got {self.density!r}")


def sigma_at(schedule, t):
    """Density used at step ``t``.

    inverse_proportional starts at ``D*T`` (near-opaque, no mixing) and
    falls fast then slowly to ``D`` at the last step.
    """
    T = int(schedule.steps)
    if not (isinstance(t, (int, np.integer)) and 1 <= t <= T):
        raise RangeError(f"step must be an integer in [1, {T}], got {t!r}")
    D = float(schedule.density)
    if schedule.kind is ScheduleKind.FIXED_OPAQUE:
        return D * T
    if schedule.kind is ScheduleKind.FIXED_DENSITY:
        return D
    # T / (T + 1 - t) is exactly T at t = T and exactly 1 at t = 1.
    return D * (T / (T + 1 - int(t)))


def schedule_table(schedules, steps=None):
    """Rows per object, columns for ``t = T`` down to ``1``."""
    schedules = list(schedules)
    found = {int(s.steps) for s in schedules}
    if steps is not None:
        found.add(int(steps))
    if len(found) > 1:
        raise ConfigError(f"schedules disagree on the number of steps: {sorted(found)}")
    if not schedules:
        return np.zeros((0, int(steps or 0)))
    T = found.pop()
    return np.array([[sigma_at(s, t) for t in range(T, 0, -1)] for s in schedules], dtype=np.float64)
