"""Elitist Ant System for the job-shop problem.

Graph: one node per operation (``job * m + step``) plus a virtual source
node ``n * m`` where every ant starts. Trails live on ordered node pairs,
``trails[from, to]``; the source row holds first-move trails.

Random stream: one ``numpy.random.Generator`` (PCG64) per run, seeded with
``params.seed``. Each ant, in construction order, consumes exactly
``n * m + 1`` uniforms: one for its SPT/LPT rule, one for the first
operation, then one per roulette draw.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import accumulate
from typing import Callable, Sequence

import numpy as np

from .instance import JobShopInstance, Operation
from .schedule import Schedule, build_schedule

SPT = "SPT"
LPT = "LPT"


class ElitistTarget(str, Enum):
    CYCLE = "cycle"
    GLOBAL = "global"


@dataclass(frozen=True)
class ColonyParams:
    """Run parameters. ``beta`` is always ``1 - alpha``.

    ``ants`` and ``elitist_weight`` left as ``None`` resolve per instance to
    ``ceil(n / 2)`` and ``n``.
    """

    alpha: float = 0.2
    rho: float = 0.7
    q: float = 100.0
    elitist_weight: float | None = None
    cycles: int = 1000
    ants: int | None = None
    tau0: float = 1.0
    delay_limit: int = 5
    delay_penalty_per_unit: float = 0.01
    seed: int = 0
    elitist_target: ElitistTarget = ElitistTarget.CYCLE

    def __post_init__(self):
        object.__setattr__(self, "elitist_target", ElitistTarget(self.elitist_target))
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")
        if self.q <= 0:
            raise ValueError("q must be positive")
        if self.elitist_weight is not None and self.elitist_weight < 0:
            raise ValueError("elitist_weight must be >= 0")
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")
        if self.ants is not None and self.ants < 1:
            raise ValueError("ants must be >= 1")
        if self.tau0 <= 0:
            raise ValueError("tau0 must be positive")
        if self.delay_limit < 0:
            raise ValueError("delay_limit must be >= 0")
        if not 0.0 <= self.delay_penalty_per_unit * self.delay_limit < 1.0:
            raise ValueError("delay_penalty_per_unit * delay_limit must lie in [0, 1)")

    @property
    def beta(self) -> float:
        return 1.0 - self.alpha

    def resolved(self, instance: JobShopInstance) -> ColonyParams:
        return replace(
            self,
            ants=self.ants if self.ants is not None else default_ant_count(instance),
            elitist_weight=(
                self.elitist_weight if self.elitist_weight is not None else float(instance.jobs)
            ),
        )


PARAM_FIELDS = {
    "alpha": float, "rho": float, "q": float, "elitist_weight": float, "cycles": int,
    "ants": int, "tau0": float, "delay_limit": int, "delay_penalty_per_unit": float,
    "seed": int, "elitist_target": ElitistTarget,
}


def params_from_mapping(values: dict[str, str], base: ColonyParams | None = None) -> ColonyParams:
    """Build params from string key/values named exactly as the fields."""
    kwargs = {}
    for key, raw in values.items():
        key = key.strip()
        if key not in PARAM_FIELDS:
            raise ValueError(f"unknown colony parameter {key!r}")
        raw = str(raw).strip()
        kwargs[key] = None if raw.lower() in ("", "none", "auto") else PARAM_FIELDS[key](raw)
    return replace(base or ColonyParams(), **kwargs)


def default_ant_count(instance: JobShopInstance) -> int:
    return math.ceil(instance.jobs / 2)


class PheromoneField:
    """Trail intensities plus the per-cycle deposit accumulator."""

    def __init__(self, num_operations: int, tau0: float):
        if tau0 <= 0:
            raise ValueError("tau0 must be positive")
        self.num_operations = num_operations
        self.source = num_operations
        self.trails = np.full((num_operations + 1, num_operations), float(tau0))
        self.deposit_buffer = np.zeros_like(self.trails)

    @classmethod
    def for_instance(cls, instance: JobShopInstance, tau0: float) -> PheromoneField:
        return cls(instance.num_operations, tau0)

    def copy(self) -> PheromoneField:
        other = PheromoneField.__new__(PheromoneField)
        other.num_operations = self.num_operations
        other.source = self.source
        other.trails = self.trails.copy()
        other.deposit_buffer = self.deposit_buffer.copy()
        return other


@dataclass
class AntState:
    instance: JobShopInstance
    rule: str
    tabu: list[tuple[int, int]] = field(default_factory=list)
    job_ready: list[int] = field(default_factory=list)
    machine_ready: list[int] = field(default_factory=list)
    current_node: int = -1

    @classmethod
    def start(cls, instance: JobShopInstance, rule: str) -> AntState:
        return cls(
            instance,
            rule,
            [],
            [0] * instance.jobs,
            [0] * instance.machines,
            instance.num_operations,
        )

    @property
    def progress(self) -> list[int]:
        counts = [0] * self.instance.jobs
        for job, _ in self.tabu:
            counts[job] += 1
        return counts

    def full(self) -> bool:
        return len(self.tabu) == self.instance.num_operations

    def move(self, op: Operation) -> None:
        start = max(self.job_ready[op.job], self.machine_ready[op.machine])
        self.job_ready[op.job] = self.machine_ready[op.machine] = start + op.duration
        self.tabu.append(op.key)
        self.current_node = op.job * self.instance.machines + op.step


def eligible_set(
    instance: JobShopInstance, ant: AntState, delay_limit: int = 5
) -> list[tuple[Operation, int]]:
    """Next operation of every unfinished job whose machine would idle at most ``delay_limit``.

    The delay is ``max(0, job_ready - machine_ready)``: how long the machine
    would sit waiting for the job. If every candidate exceeds the limit, the
    candidates with the smallest delay are admitted so construction always
    proceeds.
    """
    candidates = []
    for job, step in enumerate(ant.progress):
        if step == instance.machines:
            continue
        op = instance.rows[job][step]
        delay = max(0, ant.job_ready[job] - ant.machine_ready[op.machine])
        candidates.append((op, delay))
    admitted = [(op, d) for op, d in candidates if d <= delay_limit]
    if admitted or not candidates:
        return admitted
    least = min(d for _, d in candidates)
    return [(op, d) for op, d in candidates if d == least]


def visibility(op: Operation, rule: str, delay: int, penalty_per_unit: float = 0.01) -> float:
    base = 1.0 / op.duration if rule == SPT else float(op.duration)
    return base * (1.0 - penalty_per_unit * delay)


def transition_probabilities(
    pheromone: PheromoneField,
    from_node: int,
    candidates: Sequence[tuple[int, float]],
    alpha: float,
    beta: float | None = None,
) -> list[float]:
    """Normalized tau^alpha * eta^beta over the candidate nodes only.

    ``candidates`` holds ``(to_node, eta)`` pairs. If every weight
    underflows to zero the distribution falls back to uniform.
    """
    if beta is None:
        beta = 1.0 - alpha
    row = pheromone.trails[from_node]
    weights = [float(row[node]) ** alpha * eta ** beta for node, eta in candidates]
    total = 0.0
    for w in weights:
        total += w
    if total <= 0.0:
        return [1.0 / len(weights)] * len(weights)
    return [w / total for w in weights]


def roulette_index(probabilities: Sequence[float], u: float) -> int:
    """First index whose cumulative probability exceeds ``u``; the last absorbs rounding."""
    for i, c in enumerate(accumulate(probabilities)):
        if u < c:
            return i
    return len(probabilities) - 1


def select_next(probabilities: Sequence[float], rng: np.random.Generator) -> int:
    return roulette_index(probabilities, rng.random())


def _place_first(instance: JobShopInstance, ant: AntState, u: float) -> None:
    job = min(int(u * instance.jobs), instance.jobs - 1)
    ant.move(instance.rows[job][0])


def construct_solution(
    instance: JobShopInstance,
    pheromone: PheromoneField,
    params: ColonyParams,
    rng: np.random.Generator,
) -> tuple[list[tuple[int, int]], Schedule]:
    """One ant's tour, decoded into a schedule."""
    rule = SPT if rng.random() < 0.5 else LPT
    ant = AntState.start(instance, rule)
    _place_first(instance, ant, rng.random())
    m = instance.machines
    while not ant.full():
        options = eligible_set(instance, ant, params.delay_limit)
        cands = [
            (
                op.job * m + op.step,
                visibility(op, rule, min(delay, params.delay_limit), params.delay_penalty_per_unit),
            )
            for op, delay in options
        ]
        probs = transition_probabilities(pheromone, ant.current_node, cands, params.alpha, params.beta)
        ant.move(options[select_next(probs, rng)][0])
    return ant.tabu, build_schedule(instance, ant.tabu)


def path_nodes(instance: JobShopInstance, sequence: Sequence[tuple[int, int]]) -> np.ndarray:
    return np.array([j * instance.machines + s for j, s in sequence], dtype=np.int64)


def _deposit_path(pheromone: PheromoneField, nodes: np.ndarray, amount: float) -> None:
    frm = np.empty_like(nodes)
    frm[0] = pheromone.source
    frm[1:] = nodes[:-1]
    pheromone.deposit_buffer[frm, nodes] += amount


def accumulate_deposits(
    pheromone: PheromoneField,
    cycle_solutions: Sequence[tuple[np.ndarray, int]],
    params: ColonyParams,
    global_best: tuple[np.ndarray, int] | None = None,
) -> int:
    """Add Q/L_k along every ant's path; the cycle-best path gets Q/L_best * e instead.

    Paths are node arrays (see :func:`path_nodes`). Ties on the best makespan
    go to the earliest ant. With ``elitist_target="global"`` every cycle ant
    deposits Q/L_k and ``global_best`` receives the elitist deposit on top.

    Returns:
        Index of the cycle-best ant.
    """
    if not cycle_solutions:
        raise ValueError("no solutions to deposit")
    e = params.elitist_weight if params.elitist_weight is not None else 1.0
    best = min(range(len(cycle_solutions)), key=lambda k: cycle_solutions[k][1])
    elitist_cycle = params.elitist_target == ElitistTarget.CYCLE
    for k, (nodes, makespan) in enumerate(cycle_solutions):
        amount = params.q / makespan
        if elitist_cycle and k == best:
            amount *= e
        _deposit_path(pheromone, np.asarray(nodes), amount)
    if not elitist_cycle:
        nodes, makespan = global_best if global_best is not None else cycle_solutions[best]
        _deposit_path(pheromone, np.asarray(nodes), params.q / makespan * e)
    return best


def update_pheromone(pheromone: PheromoneField, params: ColonyParams) -> None:
    """tau <- rho * tau + delta_tau on every edge, then clear the accumulator."""
    pheromone.trails *= params.rho
    pheromone.trails += pheromone.deposit_buffer
    pheromone.deposit_buffer.fill(0.0)


@dataclass
class BestResult:
    best_sequence: list[tuple[int, int]]
    best_makespan: int
    evaluations_total: int
    evaluations_to_best: int
    per_cycle_best: list[int]
    schedule: Schedule | None = None
    wall_ms: float = 0.0


def _instance_arrays(instance: JobShopInstance) -> tuple[np.ndarray, np.ndarray]:
    mach = np.array([[op.machine for op in row] for row in instance.rows], dtype=np.int64)
    dur = np.array([[op.duration for op in row] for row in instance.rows], dtype=np.int64)
    return mach, dur


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _pick_backend(backend: str) -> str:
    if backend == "auto":
        return "numba" if numba_available() else "python"
    if backend not in ("numba", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def construct_cycle(
    instance: JobShopInstance,
    pheromone: PheromoneField,
    params: ColonyParams,
    rng: np.random.Generator,
    backend: str = "auto",
    arrays: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[list[np.ndarray], list[int]]:
    """Let ``params.ants`` ants build tours against the current trails.

    Returns node paths and makespans in construction order. Every tour
    counts as one objective-function evaluation.
    """
    params = params.resolved(instance)
    if _pick_backend(backend) == "python":
        seqs, spans = [], []
        for _ in range(params.ants):
            seq, sched = construct_solution(instance, pheromone, params, rng)
            seqs.append(path_nodes(instance, seq))
            spans.append(sched.makespan)
        return seqs, spans

    from ._kernel import construct_ants

    mach, dur = arrays if arrays is not None else _instance_arrays(instance)
    uniforms = rng.random((params.ants, instance.num_operations + 1))
    seqs, spans = construct_ants(
        mach, dur, pheromone.trails, uniforms, params.alpha, params.beta,
        params.delay_limit, params.delay_penalty_per_unit,
    )
    return list(seqs), [int(x) for x in spans]


def run(
    instance: JobShopInstance,
    params: ColonyParams | None = None,
    trace: Callable[[dict], None] | None = None,
    backend: str = "auto",
) -> BestResult:
    """Full Elitist Ant System run.

    Each cycle, all ants build against the same frozen trails; deposits are
    accumulated afterwards and applied in one update.

    Args:
        backend: ``"numba"`` (compiled construction), ``"python"`` (the
            step-by-step functions of this module) or ``"auto"``. Both use
            the same random stream and produce the same tours.
        trace: called once per cycle with ``{"cycle", "cycle_best", "global_best"}``.
    """
    params = (params or ColonyParams()).resolved(instance)
    backend = _pick_backend(backend)

    t0 = time.perf_counter()
    rng = np.random.default_rng(params.seed)
    pheromone = PheromoneField.for_instance(instance, params.tau0)
    arrays = _instance_arrays(instance) if backend == "numba" else None

    best_nodes, best_span, evals_to_best = None, None, 0
    per_cycle = []
    evaluations = 0
    for cycle in range(params.cycles):
        seqs, spans = construct_cycle(instance, pheromone, params, rng, backend, arrays)
        for k, span in enumerate(spans):
            evaluations += 1
            if best_span is None or span < best_span:
                best_span, best_nodes, evals_to_best = span, seqs[k], evaluations
        per_cycle.append(min(spans))
        accumulate_deposits(
            pheromone, list(zip(seqs, spans)), params, global_best=(best_nodes, best_span)
        )
        update_pheromone(pheromone, params)
        if trace is not None:
            trace({"cycle": cycle, "cycle_best": per_cycle[-1], "global_best": best_span})

    m = instance.machines
    sequence = [(int(v) // m, int(v) % m) for v in best_nodes]
    schedule = build_schedule(instance, sequence)
    return BestResult(
        best_sequence=sequence,
        best_makespan=int(best_span),
        evaluations_total=evaluations,
        evaluations_to_best=evals_to_best,
        per_cycle_best=per_cycle,
        schedule=schedule,
        wall_ms=(time.perf_counter() - t0) * 1000.0,
    )


def jsonl_trace(stream) -> Callable[[dict], None]:
    def emit(record: dict) -> None:
        stream.write(json.dumps(record) + "\n")

    return emit
