"""
Execution Engine.
Runs independent trials (verification instances, landscape chunks) on a
thread pool and hands results back in task order.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Optional, Sequence, TypeVar

from tqdm.auto import tqdm

from src.core.errors import ParameterError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class TrialEngine:
    """
    Map a function over tasks with up to ``jobs`` worker threads.

    Results are stored by task index, never by completion order, so the
    output of ``map`` is identical for every ``jobs`` value as long as each
    task derives its own randomness from its inputs.
    """

    def __init__(self, jobs: int = 1, desc: Optional[str] = None, quiet: bool = True):
        if int(jobs) != jobs or jobs < 1:
            raise ParameterError(f"jobs must be a positive integer, got {jobs}")
        self.jobs = int(jobs)
        self.desc = desc
        self.quiet = quiet

    def map(self, fn: Callable[[T], R], tasks: Sequence[T]) -> List[R]:
        results: List[Optional[R]] = [None] * len(tasks)
        start_time = time.time()

        with tqdm(total=len(tasks), desc=self.desc, unit="task", disable=self.quiet) as pbar:
            if self.jobs == 1:
                for idx, task in enumerate(tasks):
                    results[idx] = fn(task)
                    pbar.update(1)
            else:
                with ThreadPoolExecutor(max_workers=self.jobs) as executor:
                    future_to_index = {executor.submit(fn, task): idx for idx, task in enumerate(tasks)}
                    for future in as_completed(future_to_index):
                        idx = future_to_index[future]
                        try:
                            results[idx] = future.result()
                        except Exception as e:
                            logger.error("task %d failed: %s", idx, e)
                            raise
                        pbar.update(1)

        elapsed = time.time() - start_time
        logger.debug("%s: %d tasks in %.1fs on %d worker(s)", self.desc or "engine", len(tasks), elapsed, self.jobs)
        return results  # type: ignore[return-value]
