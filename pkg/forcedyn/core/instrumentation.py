"""
Operation logging helpers.

Provides a decorator that times long-running operations (grid sampling,
training, evaluation, episode runners), logs slow calls and logs failures
before re-raising them.
"""

import logging
import time
from functools import wraps
from typing import Any, Callable, TypeVar, cast

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


def log_operation(threshold_s: float = 1.0) -> Callable[[F], F]:
    """
    Decorator factory to log an operation for monitoring and debugging.

    Logs every call's elapsed time at DEBUG, calls slower than
    ``threshold_s`` at WARNING, and exceptions at ERROR before re-raising.

    Args:
        threshold_s: Elapsed time in seconds above which a call is reported as slow

    Returns:
        Decorator preserving the wrapped function's signature
    """

    def decorator(func: F) -> F:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            start_time = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                logger.error("Operation failed: %s: %s", func.__qualname__, e)
                raise

            elapsed = time.perf_counter() - start_time
            if elapsed > threshold_s:
                logger.warning("Slow operation: %s took %.3fs", func.__qualname__, elapsed)
            else:
                logger.debug("Operation %s took %.3fs", func.__qualname__, elapsed)
            return result

        return cast(F, wrapper)

    return decorator
