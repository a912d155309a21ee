"""Atomic integer cells and the retry-loop minimum combine.

CPython threads give no atomic read-modify-write on plain ints, so each
cell guards its value with a lock and exposes compare_exchange and
fetch_add.  The combine loop on top of compare_exchange is the update
discipline the parallel engine's semantics are specified against: a
lost race re-reads and retries only while the candidate still improves
the cell.
"""

from __future__ import annotations

import threading


class AtomicCell:
    """Mutable integer cell with linearizable primitive operations."""

    __slots__ = ("_value", "_lock")

    def __init__(self, value: int):
        self._value = int(value)
        self._lock = threading.Lock()

    def load(self) -> int:
        with self._lock:
            return self._value

    def store(self, value: int) -> None:
        with self._lock:
            self._value = int(value)

    def compare_exchange(self, expected: int, desired: int) -> int:
        """Install desired iff the cell still holds expected.

        Returns the value witnessed before the attempt; the exchange
        succeeded exactly when that equals expected.
        """
        with self._lock:
            witnessed = self._value
            if witnessed == expected:
                self._value = int(desired)
            return witnessed

    def fetch_add(self, amount: int) -> int:
        """Add amount and return the value held before the add."""
        with self._lock:
            old = self._value
            self._value = old + int(amount)
            return old


def min_combine(cell: AtomicCell, candidate: int) -> bool:
    """Lower cell to candidate if candidate is strictly smaller.

    Retries the compare_exchange until it either succeeds or the cell
    is observed at or below the candidate.  An equal value is left
    untouched.  Returns True when this call installed the candidate.
    """
    current = cell.load()
    while candidate < current:
        witnessed = cell.compare_exchange(current, candidate)
        if witnessed == current:
            return True
        current = witnessed
    return False


class AtomicCounter:
    """Shared cursor for block reservation, built on fetch_add."""

    def __init__(self, start: int = 0):
        self._cell = AtomicCell(start)

    def reserve(self, count: int) -> int:
        """Claim a half-open block [offset, offset+count); returns offset."""
        return self._cell.fetch_add(count)

    def value(self) -> int:
        return self._cell.load()
