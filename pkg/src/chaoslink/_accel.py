"""Hot inner loops, JIT-compiled with numba when available.

Setting the environment variable ``CHAOSLINK_NO_NUMBA=1`` (before first
import) selects the pure-Python/numpy fallback path.  Both paths execute
the same source and produce identical results; the fallback is simply
slower on the million-step runs.
"""

import os

import numpy as np

_disable = os.environ.get("CHAOSLINK_NO_NUMBA", "").strip().lower() in (
    "1", "true", "yes", "on",
)

if not _disable:
    try:
        from numba import njit

        USING_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a hard dependency
        USING_NUMBA = False
else:
    USING_NUMBA = False

if not USING_NUMBA:

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def decorate(func):
            return func

        return decorate


_I16_MIN = -32768
_I16_MAX = 32767


@njit(cache=True)
def logistic_orbit(mu, k, x0, n_steps):
    """Iterate the map, recording n_steps+1 samples.

    Returns (orbit, escape_index); escape_index is the index of the first
    sample outside the open basin (0, k), or -1 if none.  Samples past an
    escape are left at 0.
    """
    out = np.zeros(n_steps + 1)
    out[0] = x0
    if not (0.0 < x0 < k):
        return out, 0
    x = x0
    for i in range(n_steps):
        x = mu * x * (1.0 - x / k)
        out[i + 1] = x
        if not (0.0 < x < k):
            return out, i + 1
    return out, -1


@njit(cache=True)
def lyapunov_sum(mu, k, x0, n_steps, burn_in):
    """Accumulate ln|mu(1 - 2x/k)| along the orbit after burn_in.

    Returns (log_sum, term_count, skipped, escape_index).  Terms with a
    vanishing derivative (orbit exactly at k/2) are skipped and counted.
    """
    x = x0
    for _ in range(burn_in):
        x = mu * x * (1.0 - x / k)
        if not (0.0 < x < k):
            return 0.0, 0, 0, 1
    total = 0.0
    count = 0
    skipped = 0
    for _ in range(n_steps):
        deriv = abs(mu * (1.0 - 2.0 * x / k))
        if deriv > 0.0:
            total += np.log(deriv)
            count += 1
        else:
            skipped += 1
        x = mu * x * (1.0 - x / k)
        if not (0.0 < x < k):
            return total, count, skipped, 1
    return total, count, skipped, -1


@njit(cache=True)
def bifurcation_samples(mus, settle, keep, x0, k):
    """Per mu: settle iterations, then keep recorded samples.

    Returns (samples[len(mus), keep], escaped flags).
    """
    out = np.zeros((mus.size, keep))
    escaped = np.zeros(mus.size, dtype=np.int64)
    for j in range(mus.size):
        mu = mus[j]
        x = x0
        ok = True
        for _ in range(settle):
            x = mu * x * (1.0 - x / k)
            if not (0.0 < x < k):
                ok = False
                break
        if not ok:
            escaped[j] = 1
            continue
        for i in range(keep):
            out[j, i] = x
            x = mu * x * (1.0 - x / k)
            if not (0.0 < x < k):
                escaped[j] = 1
                break
    return out, escaped


@njit(cache=True)
def coupled_sync(mu, k, rho, x0, y0, n_steps):
    """Drive/response pair with the feedback controller, source off.

    Returns (x, y, u, escape_index); u[n] is the control applied on the
    n -> n+1 transition (u[n_steps] is unused and left 0).
    """
    xs = np.zeros(n_steps + 1)
    ys = np.zeros(n_steps + 1)
    us = np.zeros(n_steps + 1)
    xs[0] = x0
    ys[0] = y0
    x = x0
    y = y0
    for n in range(n_steps):
        e = y - x
        u = (mu * (e + 2.0 * x - k) + rho * k) * e / k
        us[n] = u
        y = mu * y * (1.0 - y / k) + u
        x = mu * x * (1.0 - x / k)
        xs[n + 1] = x
        ys[n + 1] = y
        if not (0.0 < x < k):
            return xs, ys, us, n + 1
    return xs, ys, us, -1


@njit(cache=True)
def additive_transmit(mu, k, rho, x0, y0, info, disturbance, guard):
    """Masked transmission with the additive operator.

    info[n] is the information sample composed onto the line at step n;
    disturbance[n] is added to the line signal (zeros for an ideal
    channel).  Returns per-step arrays plus (escape_index, diverge_index).
    Line-related arrays have length n_steps (one entry per transition);
    state arrays have length n_steps + 1.
    """
    n_steps = info.size
    xs = np.zeros(n_steps + 1)
    ys = np.zeros(n_steps + 1)
    zs = np.zeros(n_steps)
    us = np.zeros(n_steps)
    eps = np.zeros(n_steps)
    xs[0] = x0
    ys[0] = y0
    x = x0
    y = y0
    for n in range(n_steps):
        z = x + info[n] + disturbance[n]
        zs[n] = z
        e = y - z
        eps[n] = e
        u = (mu * (e + 2.0 * z - k) + rho * k) * e / k
        us[n] = u
        y = mu * y * (1.0 - y / k) + u
        x = mu * x * (1.0 - x / k)
        xs[n + 1] = x
        ys[n + 1] = y
        if not (0.0 < x < k):
            return xs, ys, zs, us, eps, n + 1, -1
        if abs(y) > guard:
            return xs, ys, zs, us, eps, -1, n + 1
    return xs, ys, zs, us, eps, -1, -1


@njit(cache=True)
def fx_drive_orbit(mu_q, frac, k, x0, n_steps):
    """Quantized drive orbit.  Returns (states, escape_index)."""
    out = np.zeros(n_steps + 1, dtype=np.int64)
    out[0] = x0
    x = np.int64(x0)
    denom = np.int64(frac) * np.int64(k)
    for i in range(n_steps):
        x = (np.int64(mu_q) * x * (np.int64(k) - x)) // denom
        if x > _I16_MAX:
            x = np.int64(_I16_MAX)
        elif x < _I16_MIN:
            x = np.int64(_I16_MIN)
        out[i + 1] = x
        if x <= 0 or x >= k:
            return out, i + 1
    return out, -1


@njit(cache=True)
def fx_sync_run(mu_q, rho_q, frac, k, x0, y0, n_steps):
    """Quantized drive/response pair with quantized control.

    The response update keeps mu_q*y*(k-y) + u's numerator in one wide
    integer and applies the shift/divide and 16-bit saturation once, so
    the float-domain cancellation survives quantization.

    Returns (x, y, first_equal, held, saturations); first_equal is the
    first index with x == y (or -1), held says equality persisted to the
    end, saturations counts clipped response states.
    """
    xs = np.zeros(n_steps + 1, dtype=np.int64)
    ys = np.zeros(n_steps + 1, dtype=np.int64)
    xs[0] = x0
    ys[0] = y0
    x = np.int64(x0)
    y = np.int64(y0)
    mu_w = np.int64(mu_q)
    rho_w = np.int64(rho_q)
    kw = np.int64(k)
    denom = np.int64(frac) * kw
    first = np.int64(-1)
    if x == y:
        first = np.int64(0)
    held = True
    saturations = np.int64(0)
    for n in range(n_steps):
        e = y - x
        wide = mu_w * y * (kw - y) + (mu_w * (e + 2 * x - kw) + rho_w * kw) * e
        q = wide // denom
        if q > _I16_MAX:
            q = np.int64(_I16_MAX)
            saturations += 1
        elif q < _I16_MIN:
            q = np.int64(_I16_MIN)
            saturations += 1
        x = (mu_w * x * (kw - x)) // denom
        if x > _I16_MAX:
            x = np.int64(_I16_MAX)
        elif x < _I16_MIN:
            x = np.int64(_I16_MIN)
        y = q
        xs[n + 1] = x
        ys[n + 1] = y
        if x == y:
            if first < 0:
                first = np.int64(n + 1)
        elif first >= 0:
            held = False
    return xs, ys, first, held, saturations
