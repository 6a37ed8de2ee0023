"""Exact reference solver and an independent decoder for tiny instances.

Nothing here imports the schedule module: the decoder below is a
longest-path computation on the oriented disjunctive graph, so it can act as
a cross-check on the list-scheduling decoder.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .instance import JobShopInstance

DEFAULT_OP_LIMIT = 12


class OracleSizeError(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    optimal_makespan: int
    optimal_sequence: tuple[tuple[int, int], ...]
    nodes_explored: int

    def to_dict(self) -> dict:
        return {
            "optimal_makespan": self.optimal_makespan,
            "optimal_sequence": [list(k) for k in self.optimal_sequence],
            "nodes_explored": self.nodes_explored,
        }


def independent_decode(instance: JobShopInstance, sequence) -> int:
    """Makespan of ``sequence`` via longest path in the oriented disjunctive graph.

    Conjunctive arcs follow each job's steps; disjunctive arcs are oriented by
    the order operations reach each machine in ``sequence``.
    """
    n, m = instance.jobs, instance.machines
    total = n * m
    seq = [tuple(k) for k in sequence]
    if len(seq) != total or len(set(seq)) != total:
        raise ValueError("sequence must list every operation exactly once")
    position = {}
    for pos, (job, step) in enumerate(seq):
        if not (0 <= job < n and 0 <= step < m):
            raise ValueError(f"operation {(job, step)} not in instance")
        position[(job, step)] = pos
    for job in range(n):
        for step in range(1, m):
            if position[(job, step - 1)] > position[(job, step)]:
                raise ValueError(f"job {job} steps out of order")

    def node(job, step):
        return job * m + step

    succ = [[] for _ in range(total)]
    indeg = [0] * total
    for job in range(n):
        for step in range(1, m):
            succ[node(job, step - 1)].append(node(job, step))
            indeg[node(job, step)] += 1
    last_on_machine = {}
    for job, step in seq:
        mach = instance.rows[job][step].machine
        if mach in last_on_machine:
            succ[last_on_machine[mach]].append(node(job, step))
            indeg[node(job, step)] += 1
        last_on_machine[mach] = node(job, step)

    duration = [instance.rows[v // m][v % m].duration for v in range(total)]
    head = [0] * total  # earliest start
    queue = deque(v for v in range(total) if indeg[v] == 0)
    visited = 0
    while queue:
        v = queue.popleft()
        visited += 1
        finish = head[v] + duration[v]
        for w in succ[v]:
            if finish > head[w]:
                head[w] = finish
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    if visited != total:
        raise ValueError("oriented graph has a cycle")
    return max(head[v] + duration[v] for v in range(total))


def exhaustive_optimum(
    instance: JobShopInstance,
    op_limit: int = DEFAULT_OP_LIMIT,
    prune: bool = True,
) -> OracleResult:
    """Minimum semi-active makespan over all precedence-respecting sequences.

    Depth-first enumeration. With ``prune`` the search cuts subtrees whose
    lower bound (per-machine release plus remaining load, per-job ready time
    plus remaining work) cannot beat the incumbent, and skips partial states
    already expanded; neither can remove the optimum.
    """
    n, m = instance.jobs, instance.machines
    if n * m > op_limit:
        raise OracleSizeError(
            f"{instance.name}: {n}x{m} = {n * m} operations exceeds op_limit {op_limit}"
        )
    mach = [[op.machine for op in row] for row in instance.rows]
    dur = [[op.duration for op in row] for row in instance.rows]
    job_rest = [[sum(row[s:]) for s in range(m + 1)] for row in dur]
    machine_rest = [0] * m
    for j in range(n):
        for s in range(m):
            machine_rest[mach[j][s]] += dur[j][s]

    best = [float("inf"), None]
    explored = 0
    seen = set()
    progress = [0] * n
    job_ready = [0] * n
    machine_ready = [0] * m
    path = []

    def descend(current_max):
        nonlocal explored
        explored += 1
        if len(path) == n * m:
            if current_max < best[0]:
                best[0] = current_max
                best[1] = tuple(path)
            return
        if prune:
            bound = current_max
            for k in range(m):
                bound = max(bound, machine_ready[k] + machine_rest[k])
            for j in range(n):
                bound = max(bound, job_ready[j] + job_rest[j][progress[j]])
            if bound >= best[0]:
                return
            state = (tuple(progress), tuple(job_ready), tuple(machine_ready))
            if state in seen:
                return
            seen.add(state)
        for j in range(n):
            s = progress[j]
            if s == m:
                continue
            k, d = mach[j][s], dur[j][s]
            saved = (job_ready[j], machine_ready[k])
            start = max(job_ready[j], machine_ready[k])
            job_ready[j] = machine_ready[k] = start + d
            progress[j] += 1
            machine_rest[k] -= d
            path.append((j, s))
            descend(max(current_max, start + d))
            path.pop()
            machine_rest[k] += d
            progress[j] -= 1
            job_ready[j], machine_ready[k] = saved

    descend(0)
    return OracleResult(int(best[0]), best[1], explored)
