"""Compiled tour construction, step-for-step equivalent to ``colony.construct_solution``.

Uniform draws come in precomputed, one row of ``n * m + 1`` values per ant,
so the random stream is owned by numpy on the Python side.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def construct_ants(mach, dur, trails, uniforms, alpha, beta, delay_limit, penalty):
    n, m = mach.shape
    n_ops = n * m
    n_ants = uniforms.shape[0]
    seqs = np.empty((n_ants, n_ops), dtype=np.int64)
    spans = np.empty(n_ants, dtype=np.int64)

    progress = np.empty(n, dtype=np.int64)
    job_ready = np.empty(n, dtype=np.int64)
    machine_ready = np.empty(m, dtype=np.int64)
    cand_job = np.empty(n, dtype=np.int64)
    cand_delay = np.empty(n, dtype=np.int64)
    weights = np.empty(n, dtype=np.float64)

    for k in range(n_ants):
        u = uniforms[k]
        spt = u[0] < 0.5
        progress[:] = 0
        job_ready[:] = 0
        machine_ready[:] = 0

        job = min(int(u[1] * n), n - 1)
        d = dur[job, 0]
        job_ready[job] = d
        machine_ready[mach[job, 0]] = d
        progress[job] = 1
        current = job * m
        seqs[k, 0] = current

        for pos in range(1, n_ops):
            count = 0
            least = -1
            for j in range(n):
                s = progress[j]
                if s == m:
                    continue
                delay = job_ready[j] - machine_ready[mach[j, s]]
                if delay < 0:
                    delay = 0
                cand_job[count] = j
                cand_delay[count] = delay
                count += 1
                if least < 0 or delay < least:
                    least = delay
            threshold = delay_limit if least <= delay_limit else least

            admitted = 0
            for c in range(count):
                if cand_delay[c] <= threshold:
                    cand_job[admitted] = cand_job[c]
                    cand_delay[admitted] = cand_delay[c]
                    admitted += 1

            total = 0.0
            for c in range(admitted):
                j = cand_job[c]
                s = progress[j]
                if spt:
                    base = 1.0 / dur[j, s]
                else:
                    base = float(dur[j, s])
                delay = cand_delay[c]
                if delay > delay_limit:
                    delay = delay_limit
                eta = base * (1.0 - penalty * delay)
                w = trails[current, j * m + s] ** alpha * eta ** beta
                weights[c] = w
                total += w

            pick = admitted - 1
            draw = u[pos + 1]
            cumulative = 0.0
            for c in range(admitted):
                if total > 0.0:
                    cumulative += weights[c] / total
                else:
                    cumulative += 1.0 / admitted
                if draw < cumulative:
                    pick = c
                    break

            j = cand_job[pick]
            s = progress[j]
            mk = mach[j, s]
            start = job_ready[j]
            if machine_ready[mk] > start:
                start = machine_ready[mk]
            end = start + dur[j, s]
            job_ready[j] = end
            machine_ready[mk] = end
            progress[j] = s + 1
            current = j * m + s
            seqs[k, pos] = current

        span = 0
        for mk in range(m):
            if machine_ready[mk] > span:
                span = machine_ready[mk]
        spans[k] = span
    return seqs, spans
