"""Compiled inner loops.  Everything here works on plain float arrays."""

import numpy as np
from numba import njit


@njit(cache=True)
def crossing_indices(x, y, h, relative):
    """Grid indices of the crossing times T_0=0 < T_1 < ... on a sampled path.

    T_k is the first grid index after T_{k-1} where |x - x(T_{k-1})| >= h
    (or the same for ``y`` when ``y`` is non-empty).  With ``relative`` the
    move is measured against ``h * x(T_{k-1})`` instead of ``h``.
    """
    n = x.size
    has_y = y.size == n
    out = np.empty(n, dtype=np.int64)
    out[0] = 0
    k = 1
    bx = x[0]
    by = y[0] if has_y else 0.0
    hx = h * bx if relative else h
    hy = h * by if relative else h
    for j in range(1, n):
        hit = abs(x[j] - bx) >= hx
        if has_y and not hit:
            hit = abs(y[j] - by) >= hy
        if hit:
            out[k] = j
            k += 1
            bx = x[j]
            hx = h * bx if relative else h
            if has_y:
                by = y[j]
                hy = h * by if relative else h
    return out[:k]


@njit(cache=True)
def stream_chunk(z_i, z_b, state, rec, rec_count, sd_i, drift_i, sd_b, drift_b, h, budget, use_delta):
    """Advance a long log-space simulation over one chunk of Gaussian draws.

    The path is never stored: log prices evolve step by step, crossings of the
    relative partition (|P/P(T_{k-1}) - 1| >= h for P in {I, S}) are detected
    on the fly and the running functionals are written to ``rec`` at every
    crossing.  ``state`` holds, in order: step count, log I, log S, log I and
    log S at the last crossing, sigma_I, mu_I, sigma_S, mu_S, sigma_cross,
    delta, finished flag.  Returns the new record count.

    Record columns: step, sigma_I, mu_I, log I, sigma_S, mu_S, sigma_cross,
    delta, log S.  With ``z_b`` empty only the index is simulated.
    """
    pair = z_b.size == z_i.size
    up = np.log1p(h)
    dn = np.log1p(-h) if h < 1.0 else -np.inf
    step = state[0]
    li = state[1]
    ls = state[2]
    bi = state[3]
    bs = state[4]
    s_i = state[5]
    m_i = state[6]
    s_s = state[7]
    m_s = state[8]
    s_x = state[9]
    dl = state[10]
    done = state[11]
    cap = rec.shape[0]
    for j in range(z_i.size):
        if done > 0.0 or rec_count >= cap:
            break
        step += 1.0
        li += sd_i * z_i[j] + drift_i
        if pair:
            ls += sd_i * z_i[j] + drift_i + sd_b * z_b[j] + drift_b
        di = li - bi
        hit = di >= up or di <= dn
        ds = 0.0
        if pair:
            ds = ls - bs
            if not hit:
                hit = ds >= up or ds <= dn
        if hit:
            mk = np.expm1(di)
            s_i += mk * mk
            m_i += mk
            if pair:
                sk = np.expm1(ds)
                s_s += sk * sk
                m_s += sk
                s_x += sk * mk
                dl += (sk - mk) * (sk - mk)
                bs = ls
            bi = li
            r = rec_count
            rec[r, 0] = step
            rec[r, 1] = s_i
            rec[r, 2] = m_i
            rec[r, 3] = li
            rec[r, 4] = s_s
            rec[r, 5] = m_s
            rec[r, 6] = s_x
            rec[r, 7] = dl
            rec[r, 8] = ls
            rec_count += 1
            clock = dl if use_delta else s_i
            if clock >= budget:
                done = 1.0
    state[0] = step
    state[1] = li
    state[2] = ls
    state[3] = bi
    state[4] = bs
    state[5] = s_i
    state[6] = m_i
    state[7] = s_s
    state[8] = m_s
    state[9] = s_x
    state[10] = dl
    state[11] = done
    return rec_count
