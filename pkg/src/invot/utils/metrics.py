"""
Counters, gauges and per-stage timers for pipeline runs.

A run dumps ``get_metrics()`` into the sidecar log; nothing here reaches the
artifacts, so wall-clock readings never break their determinism.
"""

import time
from collections import defaultdict
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional


class MetricsCollector:
    """Metrics for one run."""

    def __init__(self):
        self.counters: Dict[str, int] = defaultdict(int)
        self.timers: Dict[str, List[float]] = defaultdict(list)
        self.gauges: Dict[str, float] = {}
        self.start_times: Dict[str, float] = {}

    def start_timer(self, stage: str, identifier: Optional[str] = None) -> str:
        key = f"{stage}:{identifier}" if identifier else stage
        self.start_times[key] = time.perf_counter()
        return key

    def end_timer(self, timer_key: str, success: bool = True) -> float:
        """Record the duration of a started timer; unknown keys record nothing."""
        started = self.start_times.pop(timer_key, None)
        if started is None:
            return 0.0
        duration = time.perf_counter() - started
        self.timers[timer_key].append(duration)
        self.counters[f"{timer_key}:{'success' if success else 'failure'}"] += 1
        return duration

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        """Time a block; failures are counted and re-raised."""
        key = self.start_timer(name)
        try:
            yield
        except Exception:
            self.end_timer(key, success=False)
            raise
        self.end_timer(key)

    def increment_counter(self, name: str, value: int = 1) -> None:
        self.counters[name] += value

    def set_gauge(self, name: str, value: float) -> None:
        self.gauges[name] = float(value)

    def get_metrics(self) -> Dict[str, Any]:
        return {
            "counters": dict(self.counters),
            "timers": {
                k: {
                    "count": len(v),
                    "total": sum(v),
                    "max": max(v),
                }
                for k, v in self.timers.items()
                if v
            },
            "gauges": dict(self.gauges),
        }
