"""Backend switch for the hot kernels.

Every kernel in :mod:`limitlab._kernels` exists twice: a numba ``@njit``
version and a pure-numpy version.  Both produce bit-identical output.  Numba is
used when it imports cleanly, unless ``LIMITLAB_DISABLE_NUMBA`` is set to a
truthy value in the environment.
"""

import os
from contextlib import contextmanager

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
    # prefer OpenMP / workqueue; an outdated TBB only produces a warning
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False
    prange = range

    def njit(*args, **kw):
        if len(args) == 1 and callable(args[0]) and not kw:
            return args[0]
        return lambda f: f


def _env_disabled() -> bool:
    return os.environ.get("LIMITLAB_DISABLE_NUMBA", "").strip().lower() in {
        "1", "true", "yes", "on",
    }


_state = {"numba": HAVE_NUMBA and not _env_disabled()}


def use_numba() -> bool:
    return _state["numba"]


def backend_name() -> str:
    return "numba" if _state["numba"] else "numpy"


def set_backend(name: str) -> None:
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not importable")
    _state["numba"] = name == "numba"


@contextmanager
def backend(name: str):
    """Temporarily switch backend (used by tests and the benchmark)."""
    old = backend_name()
    set_backend(name)
    try:
        yield
    finally:
        set_backend(old)


def set_workers(workers: int | None) -> int:
    """Cap numba's thread pool; returns the effective worker count."""
    if not HAVE_NUMBA:
        return 1
    if workers is None or workers <= 0:
        workers = numba.config.NUMBA_NUM_THREADS
    workers = min(workers, numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(workers)
    return workers
