"""
Order-preserving grid evaluation.

Jobs are independent; results come back in input order whatever the
scheduling, so outputs do not depend on the worker count.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Any, Callable, List, Sequence, TypeVar

from excitonflow.core.errors import GridPointError, NumericalError

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass(frozen=True)
class _LabelledJob:
    func: Callable[[Any], Any]
    label: str

    def __call__(self, value: Any) -> Any:
        try:
            return self.func(value)
        except GridPointError as exc:
            if exc.label == self.label:
                raise
            # Inner point (e.g. a baseline) stays in the message under the outer one.
            raise GridPointError(self.label, value, exc) from exc
        except NumericalError as exc:
            raise GridPointError(self.label, value, exc) from exc


def labelled(func: Callable[[Any], T], label: str) -> Callable[[Any], T]:
    """
    Wrap a single-argument job so a NumericalError names its argument.

    Used for evaluations outside map_grid (golden-section searches, bisection,
    baselines) so they fail the same way grid points do.
    """
    return _LabelledJob(func, label)


def map_grid(
    func: Callable[[Any], T],
    values: Sequence[Any],
    workers: int = 1,
    label: str = "param",
) -> List[T]:
    """
    Evaluate func over values, in order.

    func must be picklable (module-level function or functools.partial of
    one) when workers > 1. A NumericalError at any point is re-raised as
    GridPointError naming label and the offending value.
    """
    job = _LabelledJob(func, label)
    values = list(values)
    if workers <= 1 or len(values) <= 1:
        return [job(v) for v in values]
    workers = min(workers, len(values))
    logger.debug("evaluating %d %s points on %d workers", len(values), label, workers)
    with Pool(workers) as pool:
        return pool.map(job, values)


__all__ = ["labelled", "map_grid"]
