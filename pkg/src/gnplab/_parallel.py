import os

from joblib import Parallel, delayed

THREADS_ENV = "GNPLAB_THREADS"


def default_n_jobs():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _run_chunk(func, idx):
    return [func(i) for i in idx]


def map_trials(func, indices, n_jobs=None, chunk=64):
    """``[func(i) for i in indices]``, optionally spread over processes.

    Results always come back in index order.
    """
    indices = list(indices)
    n_jobs = default_n_jobs() if n_jobs is None else int(n_jobs)
    if n_jobs <= 1 or len(indices) <= chunk:
        for i in indices:
            yield func(i)
        return
    chunks = [indices[s:s + chunk] for s in range(0, len(indices), chunk)]
    par = Parallel(n_jobs=n_jobs, return_as="generator")
    for res in par(delayed(_run_chunk)(func, c) for c in chunks):
        yield from res
