"""Belief formation: noise estimation, bounded FIFO memory, learned expectations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

from .model import UNBOUNDED, Capacity, parse_capacity


def estimate_exogenous(outcome, incited_effort):
    """Principal's estimate: she attributes the incited effort to the agent."""
    return outcome - incited_effort


def observe_exogenous(outcome, actual_effort):
    return outcome - actual_effort


@dataclass(frozen=True)
class MemoryBuffer:
    capacity: Capacity
    entries: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "capacity", parse_capacity(self.capacity))
        object.__setattr__(self, "entries", tuple(float(v) for v in self.entries))
        if self.capacity is not UNBOUNDED and len(self.entries) > self.capacity:
            raise ValueError(f"{len(self.entries)} entries exceed capacity {self.capacity}")

    def __len__(self) -> int:
        return len(self.entries)


def remember(buffer: MemoryBuffer, value: float) -> MemoryBuffer:
    """Append ``value``; at capacity the oldest entry is dropped."""
    entries = buffer.entries + (float(value),)
    if buffer.capacity is not UNBOUNDED and len(entries) > buffer.capacity:
        entries = entries[1:]
    return MemoryBuffer(buffer.capacity, entries)


def learned_expectation(buffer: MemoryBuffer, prior: float = 0.0) -> float:
    if not buffer.entries:
        return prior
    return sum(buffer.entries) / len(buffer.entries)
