"""Replay AoI from an explicit event log by evaluating the timeline definition slot by slot.

Unlike :func:`ehaoi.model.next_state`, nothing here is recursive: every slot is
computed from the latest delivered generation time, the latest process change
and the state reported by the latest delivery.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import NamedTuple, Sequence


class Update(NamedTuple):
    generated: int
    delivered: int
    state: int


class TracePoint(NamedTuple):
    k: int
    z: int
    zd: int
    d0: int
    d1: int


@dataclass(frozen=True)
class EventLog:
    """Process change times and delivered status updates.

    ``initial_state`` is the process state before the first change. Until the
    first delivery the destination is assumed to know ``initial_state`` as of
    time 0.
    """

    changes: tuple[int, ...]
    updates: tuple[Update, ...]
    horizon: int
    d_max0: int = 10
    d_max1: int = 10
    initial_state: int = 0

    def __post_init__(self):
        object.__setattr__(self, "changes", tuple(int(t) for t in self.changes))
        object.__setattr__(self, "updates", tuple(Update(*map(int, u)) for u in self.updates))
        if self.initial_state not in (0, 1):
            raise ValueError(f"initial_state must be 0 or 1, got {self.initial_state!r}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.d_max0 < 1 or self.d_max1 < 1:
            raise ValueError("AoI caps must be >= 1")
        _check_increasing(self.changes, "changes")
        if self.changes and self.changes[0] < 1:
            raise ValueError("process changes must happen at k >= 1")
        _check_increasing([u.generated for u in self.updates], "update generation times")
        _check_increasing([u.delivered for u in self.updates], "update delivery times")
        for u in self.updates:
            if u.delivered < u.generated:
                raise ValueError(f"update delivered at {u.delivered} before generation at {u.generated}")
            if u.state != self.process_state(u.generated):
                raise ValueError(
                    f"update generated at {u.generated} reports state {u.state}, "
                    f"process was in {self.process_state(u.generated)}"
                )

    def process_state(self, k: int) -> int:
        flips = bisect.bisect_right(self.changes, k)
        return self.initial_state ^ (flips & 1)

    def cap(self, z: int) -> int:
        return self.d_max1 if z else self.d_max0


def _check_increasing(values: Sequence[int], what: str) -> None:
    for a, b in zip(values, values[1:]):
        if b <= a:
            raise ValueError(f"{what} must be strictly increasing, got {a} then {b}")


def aoi_at(log: EventLog, k: int) -> TracePoint:
    delivered = [u for u in log.updates if u.delivered <= k]
    if delivered:
        last_gen, zd = delivered[-1].generated, delivered[-1].state
    else:
        last_gen, zd = 0, log.initial_state
    z = log.process_state(k)
    past_changes = [t for t in log.changes if t <= k]

    ages = []
    for state in (0, 1):
        if state == zd:
            ages.append(min(k - last_gen, log.cap(state)))
        elif state == z:
            ages.append(min(k - past_changes[-1], log.cap(state)))
        else:
            ages.append(0)
    return TracePoint(k, z, zd, ages[0], ages[1])


def aoi_trace(log: EventLog, start: int = 0) -> list[TracePoint]:
    """AoI pair at every slot ``start <= k < log.horizon``."""
    return [aoi_at(log, k) for k in range(start, log.horizon)]


def worked_example_log(horizon: int = 15) -> EventLog:
    """Event log of the worked example: sync at 0, change at 5, update generated 7 delivered 8."""
    return EventLog(changes=(5,), updates=(Update(0, 0, 0), Update(7, 8, 1)), horizon=horizon)


def log_from_trajectory(states, disturbances, d_max0: int, d_max1: int) -> EventLog:
    """Convert a simulated trajectory into an event log.

    A success in slot k becomes an update generated at k and delivered at k+1.
    The start state's AoI of the known state fixes the generation time of the
    update the destination already holds.
    """
    s0 = states[0]
    if s0.z != s0.zd:
        raise ValueError("trajectory conversion needs a start state in sync with the destination")
    changes = [k for k in range(1, len(states)) if states[k].z != states[k - 1].z]
    first_gen = -(s0.d1 if s0.z else s0.d0)
    updates = [Update(first_gen, first_gen + 1, s0.z)]
    for k, w in enumerate(disturbances[: len(states) - 1]):
        if w.ws:
            updates.append(Update(k, k + 1, states[k].z))
    return EventLog(
        changes=tuple(changes),
        updates=tuple(updates),
        horizon=len(states),
        d_max0=d_max0,
        d_max1=d_max1,
        initial_state=s0.z,
    )
