"""Sequential inner loops of the simulator.

Each kernel has a numba version and a numpy version with identical
semantics. The module-level names point at the numba versions unless numba
is missing or ``AOI_NTN_NO_NUMBA=1`` is set.
"""
import bisect

import numpy as np

from .._accel import NUMBA_ENABLED, njit


def loss_server_numpy(arrivals, service):
    """Single server, no waiting room: an arrival is served iff the server is idle.

    Returns ``(accepted, completion)``; ``completion`` is only meaningful
    where ``accepted`` is true.
    """
    n = len(arrivals)
    accepted = np.zeros(n, dtype=np.bool_)
    completion = np.zeros(n)
    k = 0
    while k < n:
        accepted[k] = True
        done = arrivals[k] + service[k]
        completion[k] = done
        # next arrival at or after the completion instant
        k = bisect.bisect_left(arrivals, done, k + 1)
    return accepted, completion


def lindley_numpy(arrivals, service):
    """FCFS single-server departure times for sorted ``arrivals``.

    Uses the cumulative-max form of D_n = max(A_n, D_{n-1}) + S_n.
    """
    if len(arrivals) == 0:
        return np.zeros(0)
    c = np.cumsum(service)
    e = np.maximum.accumulate(arrivals - (c - service))
    return e + c


@njit(cache=True, nogil=True)
def _loss_server_numba(arrivals, service):
    n = arrivals.shape[0]
    accepted = np.zeros(n, dtype=np.bool_)
    completion = np.zeros(n)
    busy = -np.inf
    for k in range(n):
        if arrivals[k] >= busy:
            accepted[k] = True
            busy = arrivals[k] + service[k]
            completion[k] = busy
    return accepted, completion


@njit(cache=True, nogil=True)
def _lindley_numba(arrivals, service):
    n = arrivals.shape[0]
    out = np.empty(n)
    last = -np.inf
    for k in range(n):
        start = arrivals[k] if arrivals[k] > last else last
        last = start + service[k]
        out[k] = last
    return out


if NUMBA_ENABLED:
    loss_server_numba = _loss_server_numba
    lindley_numba = _lindley_numba
    loss_server = _loss_server_numba
    lindley = _lindley_numba
else:
    loss_server_numba = lindley_numba = None
    loss_server = loss_server_numpy
    lindley = lindley_numpy
