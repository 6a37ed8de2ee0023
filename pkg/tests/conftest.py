import random
from pathlib import Path

import pytest

from eas_jobshop.instance import JobShopInstance, load_instance

DATA = Path(__file__).resolve().parents[1] / "src" / "eas_jobshop" / "data"

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def table1() -> JobShopInstance:
    return load_instance(DATA / "table1.txt")


def random_instance(rng: random.Random, max_ops: int = 12, max_duration: int = 9) -> JobShopInstance:
    """Random job shop with n * m <= max_ops, each job visiting every machine once."""
    while True:
        n = rng.randint(1, max_ops)
        m = rng.randint(1, max_ops // n)
        if n * m <= max_ops:
            break
    rows = []
    for _ in range(n):
        machines = list(range(m))
        rng.shuffle(machines)
        rows.append([(k, rng.randint(1, max_duration)) for k in machines])
    return JobShopInstance.from_matrix(f"rand{n}x{m}", rows)


def random_sequence(instance: JobShopInstance, rng: random.Random) -> list[tuple[int, int]]:
    """Uniformly shuffled job tokens, i.e. a random precedence-respecting interleaving."""
    tokens = [j for j in range(instance.jobs) for _ in range(instance.machines)]
    rng.shuffle(tokens)
    step = [0] * instance.jobs
    seq = []
    for j in tokens:
        seq.append((j, step[j]))
        step[j] += 1
    return seq


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
