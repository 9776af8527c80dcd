"""Lightweight call counters used to audit the solver cost budget.

Counts are advisory diagnostics (tests assert one assignment solve and one
least-squares solve per one-step estimate); they are not synchronized and do
not participate in any numeric output.
"""

from __future__ import annotations

from collections import Counter

counters: Counter = Counter()


def record(event: str) -> None:
    counters[event] += 1


def snapshot() -> dict:
    return dict(counters)


def delta_since(before: dict) -> dict:
    return {k: counters[k] - before.get(k, 0) for k in counters if counters[k] != before.get(k, 0)}
