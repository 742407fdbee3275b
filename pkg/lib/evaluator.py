"""
Evaluator — memoised evaluate() shared by all optimizers of one run.

Results are cached per (L-L set, I-L set, with_time), so the optimizers can
revisit a selection for free; `evaluations` counts distinct selections
actually evaluated, `calls` counts every lookup.

Usage:
    ev = Evaluator(topology, profile, settings)
    result = ev(ll_edges, il_edges)
    results = ev.evaluate_many([(ll, il1), (ll, il2)])   # order preserved
    solution = ev.solution(ll, il)                       # always with T^K
"""
from __future__ import annotations

import logging
import math
import threading
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from .config import Settings
from .learning import evaluate
from .models import EdgeKey, EvaluationResult, LearningProfile, Selection, Solution, Topology

logger = logging.getLogger(__name__)

EdgeSets = tuple[Iterable[EdgeKey], Iterable[EdgeKey]]


class Evaluator:
    """Caches EvaluationResults for one (topology, profile, settings) triple."""

    def __init__(self, topology: Topology, profile: LearningProfile,
                 settings: Optional[Settings] = None) -> None:
        self.topology = topology
        self.profile = profile
        self.settings = settings or Settings()
        self._cache: dict[tuple, EvaluationResult] = {}
        self._lock = threading.Lock()
        self.calls = 0
        self.evaluations = 0

    # ── Single evaluation ─────────────────────────────────────────────────────

    def __call__(self, ll_edges: Iterable[EdgeKey], il_edges: Iterable[EdgeKey],
                 with_time: bool = False) -> EvaluationResult:
        ll, il = frozenset(ll_edges), frozenset(il_edges)
        with_time = with_time or math.isfinite(self.profile.t_max)
        key = (ll, il, with_time)
        with self._lock:
            self.calls += 1
            hit = self._cache.get(key)
        if hit is not None:
            return hit

        result = evaluate(
            self.topology, ll, il, self.profile,
            settings=self.settings,
            with_time=with_time,
            epoch_samples=self.settings.epoch_samples,
        )
        with self._lock:
            if key not in self._cache:
                self._cache[key] = result
                self.evaluations += 1
        return result

    def solution(self, ll_edges: Iterable[EdgeKey], il_edges: Iterable[EdgeKey]) -> Solution:
        """Selection with its fully timed evaluation."""
        ll, il = frozenset(ll_edges), frozenset(il_edges)
        result = self(ll, il, with_time=True)
        return Solution(Selection(ll, il, result.epochs), result)

    # ── Batches ───────────────────────────────────────────────────────────────

    def evaluate_many(self, pairs: Sequence[EdgeSets],
                      with_time: bool = False) -> list[EvaluationResult]:
        """Evaluate several selections, in parallel when threads > 1; order preserved."""
        pairs = list(pairs)
        threads = min(self.settings.threads, len(pairs))
        if threads <= 1:
            return [self(ll, il, with_time) for ll, il in pairs]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda p: self(p[0], p[1], with_time), pairs))

    def stats(self) -> dict[str, int]:
        return {"calls": self.calls, "evaluations": self.evaluations}
