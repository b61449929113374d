import time
from functools import wraps

from ..core.logger import logger
from .exceptions import SphericalRMTException


def log_execution_time(func):
    @wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.perf_counter()
        try:
            result = func(*args, **kwargs)
            logger.info(
                f"Function {func.__name__} took {time.perf_counter() - start_time:.2f} seconds"
            )
            return result
        except Exception as e:
            logger.error(
                f"Function {func.__name__} failed after {time.perf_counter() - start_time:.2f} seconds: {str(e)}"
            )
            raise

    return wrapper


def log_exceptions(func):
    """Log a failing library call at ERROR and re-raise it unchanged."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except SphericalRMTException as e:
            logger.error(f"Function {func.__name__} failed: {str(e)}")
            raise

    return wrapper
