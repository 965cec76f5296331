"""Numba core of the event-driven SIS simulation.

State is a set of flat arrays owned by the python-level wrapper; every kernel
here is cached machine code operating on those arrays.  Neighbor-count
bookkeeping is integer-exact so audits can demand strict equality.

ibox layout: [n_inf, n_sus, sus_weight, n_recoveries, n_jumps, n_infections,
              n_sojourns, n_sojourns_dropped]
fbox layout: [t, integral of n_inf dt]
"""

import numpy as np
from numba import njit

STATE_S = 0
STATE_I = 1

IB_NINF = 0
IB_NSUS = 1
IB_SW = 2
IB_REC = 3
IB_JMP = 4
IB_INF = 5
IB_SOJ = 6
IB_SOJ_DROP = 7

FB_T = 0
FB_ACC = 1

STATUS_TIME = 0       # reached t_end
STATUS_ABSORBED = 1   # no infected left
STATUS_FROZEN = 2     # total rate 0 with infected present but no possible event
STATUS_BROKEN = 3     # bookkeeping inconsistency (should never happen)
STATUS_EVENTS = 4     # hit the event budget


@njit(cache=True, inline="always")
def _dist2(x1, y1, x2, y2, L):
    dx = abs(x1 - x2)
    if dx > L - dx:
        dx = L - dx
    dy = abs(y1 - y2)
    if dy > L - dy:
        dy = L - dy
    return dx * dx + dy * dy


@njit(cache=True, inline="always")
def _cell_of(x, y, edge, n_side):
    cx = int(x / edge)
    if cx >= n_side:
        cx = n_side - 1
    cy = int(y / edge)
    if cy >= n_side:
        cy = n_side - 1
    return cx * n_side + cy


@njit(cache=True)
def _cell_insert(i, c, head, nxt, prv, cell_id):
    cell_id[i] = c
    h = head[c]
    nxt[i] = h
    prv[i] = -1
    if h >= 0:
        prv[h] = i
    head[c] = i


@njit(cache=True)
def _cell_remove(i, head, nxt, prv, cell_id):
    c = cell_id[i]
    p = prv[i]
    n = nxt[i]
    if p >= 0:
        nxt[p] = n
    else:
        head[c] = n
    if n >= 0:
        prv[n] = p
    cell_id[i] = -1


@njit(cache=True)
def _gather_candidates(x, y, head, nxt, edge, n_side, buf):
    """Fill ``buf`` with particle ids from the 3x3 cell neighborhood (or every
    cell when the grid is too small for the wrap to keep cells distinct).
    Returns the number of candidates."""
    m = 0
    if n_side < 3:
        for c in range(n_side * n_side):
            j = head[c]
            while j >= 0:
                buf[m] = j
                m += 1
                j = nxt[j]
        return m
    cx = int(x / edge)
    if cx >= n_side:
        cx = n_side - 1
    cy = int(y / edge)
    if cy >= n_side:
        cy = n_side - 1
    for dx in range(-1, 2):
        gx = (cx + dx) % n_side
        for dy in range(-1, 2):
            c = gx * n_side + (cy + dy) % n_side
            j = head[c]
            while j >= 0:
                buf[m] = j
                m += 1
                j = nxt[j]
    return m


@njit(cache=True)
def _count_infected_near(i, x, y, pos, state, head, nxt, edge, n_side, L, a2, buf):
    cnt = 0
    m = _gather_candidates(x, y, head, nxt, edge, n_side, buf)
    for t in range(m):
        j = buf[t]
        if j == i:
            continue
        if state[j] == STATE_I and _dist2(x, y, pos[j, 0], pos[j, 1], L) <= a2:
            cnt += 1
    return cnt


@njit(cache=True)
def init_structures(pos, state, cnt, head, nxt, prv, cell_id,
                    inf_list, inf_idx, sus_list, sus_idx, ibox,
                    edge, n_side, L, a):
    """Build cells, neighbor counts, membership lists and totals from scratch."""
    n = pos.shape[0]
    a2 = a * a
    for c in range(head.shape[0]):
        head[c] = -1
    for i in range(n):
        _cell_insert(i, _cell_of(pos[i, 0], pos[i, 1], edge, n_side), head, nxt, prv, cell_id)
    buf = np.empty(n, dtype=np.int64)
    n_inf = 0
    n_sus = 0
    sw = 0
    for i in range(n):
        cnt[i] = _count_infected_near(i, pos[i, 0], pos[i, 1], pos, state,
                                      head, nxt, edge, n_side, L, a2, buf)
        inf_idx[i] = -1
        sus_idx[i] = -1
    for i in range(n):
        if state[i] == STATE_I:
            inf_list[n_inf] = i
            inf_idx[i] = n_inf
            n_inf += 1
        else:
            sus_list[n_sus] = i
            sus_idx[i] = n_sus
            sw += cnt[i]
            n_sus += 1
    ibox[IB_NINF] = n_inf
    ibox[IB_NSUS] = n_sus
    ibox[IB_SW] = sw


@njit(cache=True, inline="always")
def _list_remove(i, lst, idx, size):
    k = idx[i]
    last = lst[size - 1]
    lst[k] = last
    idx[last] = k
    idx[i] = -1
    return size - 1


@njit(cache=True, inline="always")
def _list_append(i, lst, idx, size):
    lst[size] = i
    idx[i] = size
    return size + 1


@njit(cache=True)
def _apply_recovery(j, pos, state, cnt, head, nxt, prv, cell_id,
                    inf_list, inf_idx, sus_list, sus_idx, ibox,
                    edge, n_side, L, a2, buf):
    state[j] = STATE_S
    ibox[IB_NINF] = _list_remove(j, inf_list, inf_idx, ibox[IB_NINF])
    ibox[IB_NSUS] = _list_append(j, sus_list, sus_idx, ibox[IB_NSUS])
    x = pos[j, 0]
    y = pos[j, 1]
    m = _gather_candidates(x, y, head, nxt, edge, n_side, buf)
    for t in range(m):
        k = buf[t]
        if k == j:
            continue
        if _dist2(x, y, pos[k, 0], pos[k, 1], L) <= a2:
            cnt[k] -= 1
            if state[k] == STATE_S:
                ibox[IB_SW] -= 1
    ibox[IB_SW] += cnt[j]
    ibox[IB_REC] += 1


@njit(cache=True)
def _apply_infection(j, pos, state, cnt, head, nxt, prv, cell_id,
                     inf_list, inf_idx, sus_list, sus_idx, ibox,
                     edge, n_side, L, a2, buf):
    ibox[IB_SW] -= cnt[j]
    state[j] = STATE_I
    ibox[IB_NSUS] = _list_remove(j, sus_list, sus_idx, ibox[IB_NSUS])
    ibox[IB_NINF] = _list_append(j, inf_list, inf_idx, ibox[IB_NINF])
    x = pos[j, 0]
    y = pos[j, 1]
    m = _gather_candidates(x, y, head, nxt, edge, n_side, buf)
    for t in range(m):
        k = buf[t]
        if k == j:
            continue
        if _dist2(x, y, pos[k, 0], pos[k, 1], L) <= a2:
            cnt[k] += 1
            if state[k] == STATE_S:
                ibox[IB_SW] += 1
    ibox[IB_INF] += 1


@njit(cache=True)
def _apply_jump(i, xn, yn, pos, state, cnt, head, nxt, prv, cell_id,
                inf_list, inf_idx, sus_list, sus_idx, ibox,
                edge, n_side, L, a2, buf):
    x = pos[i, 0]
    y = pos[i, 1]
    infected = state[i] == STATE_I
    if infected:
        m = _gather_candidates(x, y, head, nxt, edge, n_side, buf)
        for t in range(m):
            k = buf[t]
            if k == i:
                continue
            if _dist2(x, y, pos[k, 0], pos[k, 1], L) <= a2:
                cnt[k] -= 1
                if state[k] == STATE_S:
                    ibox[IB_SW] -= 1
    else:
        ibox[IB_SW] -= cnt[i]
    _cell_remove(i, head, nxt, prv, cell_id)
    pos[i, 0] = xn
    pos[i, 1] = yn
    _cell_insert(i, _cell_of(xn, yn, edge, n_side), head, nxt, prv, cell_id)
    cnt[i] = _count_infected_near(i, xn, yn, pos, state, head, nxt,
                                  edge, n_side, L, a2, buf)
    if infected:
        m = _gather_candidates(xn, yn, head, nxt, edge, n_side, buf)
        for t in range(m):
            k = buf[t]
            if k == i:
                continue
            if _dist2(xn, yn, pos[k, 0], pos[k, 1], L) <= a2:
                cnt[k] += 1
                if state[k] == STATE_S:
                    ibox[IB_SW] += 1
    else:
        ibox[IB_SW] += cnt[i]
    ibox[IB_JMP] += 1


@njit(cache=True)
def advance(pos, state, cnt, head, nxt, prv, cell_id,
            inf_list, inf_idx, sus_list, sus_idx, ibox, fbox,
            s_entry, soj_buf, soj_min_t, collect_soj,
            alpha, beta, gamma, L, a, edge, n_side,
            t_end, max_events):
    """Run the event loop until ``t_end``, absorption, or the event budget.

    The infected-count time integral is accumulated exactly (the trajectory is
    piecewise constant between events).  Returns a STATUS_* code.
    """
    n = pos.shape[0]
    a2 = a * a
    buf = np.empty(n, dtype=np.int64)
    t = fbox[FB_T]
    events = 0
    while True:
        n_inf = ibox[IB_NINF]
        if n_inf == 0:
            fbox[FB_T] = t
            return STATUS_ABSORBED
        r_rec = beta * n_inf
        r_jmp = gamma * n
        r_inf = alpha * ibox[IB_SW]
        total = r_rec + r_jmp + r_inf
        if total <= 0.0:
            if beta > 0.0 or gamma > 0.0:
                fbox[FB_T] = t
                return STATUS_BROKEN
            fbox[FB_ACC] += n_inf * (t_end - t)
            fbox[FB_T] = t_end
            return STATUS_FROZEN
        if max_events >= 0 and events >= max_events:
            fbox[FB_T] = t
            return STATUS_EVENTS
        dt = np.random.exponential(1.0 / total)
        if t + dt >= t_end:
            fbox[FB_ACC] += n_inf * (t_end - t)
            fbox[FB_T] = t_end
            return STATUS_TIME
        fbox[FB_ACC] += n_inf * dt
        t += dt
        events += 1
        u = np.random.random() * total
        if u < r_rec:
            j = inf_list[int(np.random.random() * n_inf)]
            _apply_recovery(j, pos, state, cnt, head, nxt, prv, cell_id,
                            inf_list, inf_idx, sus_list, sus_idx, ibox,
                            edge, n_side, L, a2, buf)
            if collect_soj:
                s_entry[j] = t
        elif u < r_rec + r_jmp:
            i = int(np.random.random() * n)
            xn = np.random.random() * L
            yn = np.random.random() * L
            _apply_jump(i, xn, yn, pos, state, cnt, head, nxt, prv, cell_id,
                        inf_list, inf_idx, sus_list, sus_idx, ibox,
                        edge, n_side, L, a2, buf)
        else:
            # susceptible chosen proportionally to its infected-neighbor count;
            # reuse the residual uniform mass as the selection threshold
            thr = (u - r_rec - r_jmp) / alpha
            acc = 0
            j = -1
            n_sus = ibox[IB_NSUS]
            for m in range(n_sus):
                k = sus_list[m]
                c = cnt[k]
                if c > 0:
                    acc += c
                    j = k
                    if thr < acc:
                        break
            if j < 0:
                fbox[FB_T] = t
                return STATUS_BROKEN
            if collect_soj and s_entry[j] >= soj_min_t:
                ns = ibox[IB_SOJ]
                if ns < soj_buf.shape[0]:
                    soj_buf[ns] = t - s_entry[j]
                    ibox[IB_SOJ] = ns + 1
                else:
                    ibox[IB_SOJ_DROP] += 1
            _apply_infection(j, pos, state, cnt, head, nxt, prv, cell_id,
                             inf_list, inf_idx, sus_list, sus_idx, ibox,
                             edge, n_side, L, a2, buf)


@njit(cache=True)
def audit(pos, state, cnt, head, nxt, ibox, edge, n_side, L, a):
    """Recompute counts from scratch; return the worst absolute discrepancies
    (max |cnt| error, |sus_weight| error, |n_inf| error) as exact integers."""
    n = pos.shape[0]
    a2 = a * a
    buf = np.empty(n, dtype=np.int64)
    max_cnt_err = 0
    sw = 0
    n_inf = 0
    for i in range(n):
        c = _count_infected_near(i, pos[i, 0], pos[i, 1], pos, state,
                                 head, nxt, edge, n_side, L, a2, buf)
        e = abs(c - cnt[i])
        if e > max_cnt_err:
            max_cnt_err = e
        if state[i] == STATE_I:
            n_inf += 1
        else:
            sw += c
    return max_cnt_err, abs(sw - ibox[IB_SW]), abs(n_inf - ibox[IB_NINF])


@njit(cache=True)
def seed_engine(seed):
    np.random.seed(seed)
