import itertools
import random

import pytest

from eas_jobshop.instance import JobShopInstance
from eas_jobshop.oracle import OracleSizeError, exhaustive_optimum, independent_decode
from eas_jobshop.schedule import build_schedule

from conftest import random_instance, random_sequence


def all_sequences(inst):
    """Every distinct precedence-respecting interleaving, by brute force."""
    tokens = [j for j in range(inst.jobs) for _ in range(inst.machines)]
    for perm in set(itertools.permutations(tokens)):
        step = [0] * inst.jobs
        seq = []
        for j in perm:
            seq.append((j, step[j]))
            step[j] += 1
        yield seq


def test_two_by_two():
    inst = JobShopInstance.from_matrix("2x2", [[(0, 2), (1, 2)], [(1, 3), (0, 1)]])
    brute = min(build_schedule(inst, s).makespan for s in all_sequences(inst))
    assert brute == 5
    res = exhaustive_optimum(inst)
    assert res.optimal_makespan == 5
    assert independent_decode(inst, res.optimal_sequence) == 5


def test_table1_optimum_pinned(table1):
    # 1680 interleavings enumerated with both decoders
    spans = [independent_decode(table1, s) for s in all_sequences(table1)]
    assert len(spans) == 1680
    assert min(spans) == 13
    res = exhaustive_optimum(table1)
    assert res.optimal_makespan == 13
    assert build_schedule(table1, res.optimal_sequence).makespan == 13
    assert res.optimal_makespan >= table1.lower_bound()


def test_single_job_line():
    inst = JobShopInstance.from_matrix("line", [[(0, 2), (1, 5), (2, 1), (3, 4)]])
    res = exhaustive_optimum(inst)
    assert res.optimal_makespan == 12
    assert res.nodes_explored <= 5


def test_round_robin_independent(table1):
    seq = [(j, s) for s in range(3) for j in range(3)]
    assert independent_decode(table1, seq) == 14


def test_size_limit():
    inst = JobShopInstance.from_matrix("big", [[(k, 1) for k in range(4)]] * 4)
    with pytest.raises(OracleSizeError, match="16 operations"):
        exhaustive_optimum(inst)


def test_independent_decode_rejects_bad_order(table1):
    seq = [(0, 1), (0, 0)] + [(j, s) for j in (1, 2) for s in range(3)] + [(0, 2)]
    with pytest.raises(ValueError):
        independent_decode(table1, seq)


def test_decoders_agree_fuzz():
    rng = random.Random(2024)
    for _ in range(300):
        inst = random_instance(rng)
        for _ in range(10):
            seq = random_sequence(inst, rng)
            assert independent_decode(inst, seq) == build_schedule(inst, seq).makespan


def test_pruning_sound_small():
    rng = random.Random(99)
    for _ in range(40):
        inst = random_instance(rng, max_ops=9)
        pruned = exhaustive_optimum(inst)
        full = exhaustive_optimum(inst, prune=False)
        assert pruned.optimal_makespan == full.optimal_makespan
        assert pruned.nodes_explored <= full.nodes_explored
        assert independent_decode(inst, pruned.optimal_sequence) == pruned.optimal_makespan
